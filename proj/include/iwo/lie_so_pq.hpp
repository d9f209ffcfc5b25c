#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iwo/errors.hpp"
#include "iwo/exact_linalg.hpp"
#include "iwo/matrix.hpp"
#include "iwo/pseudo_space.hpp"
#include "iwo/rational.hpp"

namespace iwo {

/// An element of so(p,q) = { [[A, B], [B^t, D]] : A in so(p), D in so(q) }.
/// Block accessors use the 1-based indices of the block notation.
class LieElement {
 public:
  /// Validates the so(p,q) block structure; DomainError otherwise.
  LieElement(Signature sig, QMatrix mat) : sig_(sig), mat_(std::move(mat)) {
    if (mat_.rows() != sig_.dim() || mat_.cols() != sig_.dim()) throw ShapeError("LieElement: wrong matrix size for " + sig_.str());
    if (!is_in_so(mat_, sig_)) throw DomainError("matrix is not in so" + sig_.str());
  }

  static LieElement zero(Signature sig) { return LieElement(sig, QMatrix(sig.dim(), sig.dim())); }

  /// X^t eta + eta X = 0 with eta = diag(1 x p, -1 x q).
  static bool is_in_so(const QMatrix& m, const Signature& sig) {
    const auto eta = gram_matrix(sig);
    return (m.transpose() * eta + eta * m).is_zero();
  }

  [[nodiscard]] const Signature& sig() const { return sig_; }
  [[nodiscard]] const QMatrix& matrix() const { return mat_; }

  [[nodiscard]] const Rational& A(int i, int j) const { return at(i, j); }
  [[nodiscard]] const Rational& B(int i, int j) const { return at(i, sig_.p() + j); }
  [[nodiscard]] const Rational& D(int i, int j) const { return at(sig_.p() + i, sig_.p() + j); }

  [[nodiscard]] QVector apply(const QVector& x) const { return matvec(mat_, x); }

  friend LieElement operator+(const LieElement& a, const LieElement& b) { return {a.sig_, a.mat_ + b.mat_, Trusted{}}; }
  friend LieElement operator-(const LieElement& a, const LieElement& b) { return {a.sig_, a.mat_ - b.mat_, Trusted{}}; }
  friend LieElement operator*(const Rational& s, const LieElement& x) { return {x.sig_, s * x.mat_, Trusted{}}; }
  friend bool operator==(const LieElement& a, const LieElement& b) { return a.sig_ == b.sig_ && a.mat_ == b.mat_; }

  friend LieElement bracket(const LieElement& x, const LieElement& y) { return {x.sig_, commutator(x.mat_, y.mat_), Trusted{}}; }

 private:
  struct Trusted {};
  LieElement(Signature sig, QMatrix mat, Trusted) : sig_(sig), mat_(std::move(mat)) {}

  [[nodiscard]] const Rational& at(int i, int j) const { return mat_(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); }

  Signature sig_;
  QMatrix mat_;
};

enum class Subalgebra { so, k, p_cartan, a, k0, n, an, k0an, kprime_an, root_space, custom };

inline const char* to_string(Subalgebra s) {
  switch (s) {
    case Subalgebra::so: return "so";
    case Subalgebra::k: return "k";
    case Subalgebra::p_cartan: return "pCartan";
    case Subalgebra::a: return "a";
    case Subalgebra::k0: return "k0";
    case Subalgebra::n: return "n";
    case Subalgebra::an: return "an";
    case Subalgebra::k0an: return "k0an";
    case Subalgebra::kprime_an: return "kprime_an";
    case Subalgebra::root_space: return "root_space";
    case Subalgebra::custom: return "custom";
  }
  return "?";
}

/// Ordered, linearly independent list of so(p,q) elements.
struct SubalgebraBasis {
  Signature sig;
  Subalgebra label;
  std::vector<LieElement> elements;

  [[nodiscard]] std::size_t size() const { return elements.size(); }
  [[nodiscard]] bool empty() const { return elements.empty(); }

  [[nodiscard]] SpanBasis span() const {
    SpanBasis s(sig.dim() * sig.dim());
    for (const auto& e : elements) s.insert(e.matrix().flatten());
    return s;
  }

  [[nodiscard]] bool contains(const LieElement& x) const { return span().contains(x.matrix().flatten()); }
};

enum class BasisCheck { independence, independence_and_closure };

/// Builds a SubalgebraBasis, hard-failing when the elements are dependent or
/// (if requested) the span is not closed under the bracket.
inline SubalgebraBasis make_basis(Signature sig, Subalgebra label, std::vector<LieElement> elements,
                                  BasisCheck check = BasisCheck::independence_and_closure) {
  SpanBasis span(sig.dim() * sig.dim());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!span.insert(elements[i].matrix().flatten())) {
      throw InvariantViolation(std::string(to_string(label)) + " basis element " + std::to_string(i) + " is linearly dependent");
    }
  }
  if (check == BasisCheck::independence_and_closure) {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      for (std::size_t j = i + 1; j < elements.size(); ++j) {
        if (!span.contains(bracket(elements[i], elements[j]).matrix().flatten())) {
          throw InvariantViolation(std::string(to_string(label)) + " is not closed under the bracket: [X" + std::to_string(i) + ",X" +
                                   std::to_string(j) + "] leaves the span");
        }
      }
    }
  }
  return {sig, label, std::move(elements)};
}

/// Whether every bracket of basis elements stays in the span.
inline bool is_bracket_closed(const SubalgebraBasis& b) {
  const auto span = b.span();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (!span.contains(bracket(b.elements[i], b.elements[j]).matrix().flatten())) return false;
  return true;
}

namespace detail {

inline QMatrix elementary(const Signature& sig, int i, int j) {
  QMatrix m(sig.dim(), sig.dim());
  m(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) = Rational(1);
  return m;
}

/// E_ij - E_ji (rotation generator in the (i,j) plane).
inline LieElement rotation(const Signature& sig, int i, int j) { return {sig, elementary(sig, i, j) - elementary(sig, j, i)}; }

/// E_ij + E_ji with i <= p < j (boost generator).
inline LieElement boost(const Signature& sig, int i, int j) { return {sig, elementary(sig, i, j) + elementary(sig, j, i)}; }

}  // namespace detail

/// Standard basis: A-rotations (i<j<=p), D-rotations, then the pq boosts
/// B_{ij} (row-major in (i,j)). Size p(p-1)/2 + q(q-1)/2 + pq.
inline SubalgebraBasis so_basis(const Signature& sig) {
  const int p = sig.p();
  const int q = sig.q();
  std::vector<LieElement> out;
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j) out.push_back(detail::rotation(sig, i, j));
  for (int i = 1; i <= q; ++i)
    for (int j = i + 1; j <= q; ++j) out.push_back(detail::rotation(sig, p + i, p + j));
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= q; ++j) out.push_back(detail::boost(sig, i, p + j));
  return make_basis(sig, Subalgebra::so, std::move(out), BasisCheck::independence);
}

/// theta(X) = -X^t.
inline LieElement cartan_involution(const LieElement& x) { return {x.sig(), -x.matrix().transpose()}; }

struct CartanDecomposition {
  SubalgebraBasis k;        // +1 eigenspace: block diagonal, so(p) x so(q)
  SubalgebraBasis p_cartan; // -1 eigenspace: off-diagonal B blocks
};

inline CartanDecomposition cartan_decompose(const Signature& sig) {
  std::vector<LieElement> k;
  std::vector<LieElement> pp;
  for (const auto& x : so_basis(sig).elements) {
    const LieElement theta = cartan_involution(x);
    const LieElement plus = Rational(1, 2) * (x + theta);
    const LieElement minus = Rational(1, 2) * (x - theta);
    if (!plus.matrix().is_zero()) k.push_back(plus);
    if (!minus.matrix().is_zero()) pp.push_back(minus);
  }
  return {make_basis(sig, Subalgebra::k, std::move(k)), make_basis(sig, Subalgebra::p_cartan, std::move(pp), BasisCheck::independence)};
}

/// H_c: the a-element with c_i placed at B_{p-i+1, i} (anti-diagonal of the
/// bottom q x q block of B).
inline LieElement a_element(const Signature& sig, std::span<const Rational> c) {
  if (c.size() != static_cast<std::size_t>(sig.q())) throw ShapeError("a_element expects q parameters");
  QMatrix m(sig.dim(), sig.dim());
  for (int i = 1; i <= sig.q(); ++i) {
    const auto row = static_cast<std::size_t>(sig.p() - i);
    const auto col = static_cast<std::size_t>(sig.p() + i - 1);
    m(row, col) = c[static_cast<std::size_t>(i - 1)];
    m(col, row) = c[static_cast<std::size_t>(i - 1)];
  }
  return {sig, std::move(m)};
}

/// Maximal abelian subspace a of the -1 eigenspace; H^{(i)} has c_i = 1.
inline SubalgebraBasis build_a(const Signature& sig) {
  std::vector<LieElement> out;
  for (int i = 1; i <= sig.q(); ++i) {
    std::vector<Rational> c(static_cast<std::size_t>(sig.q()), Rational(0));
    c[static_cast<std::size_t>(i - 1)] = Rational(1);
    out.push_back(a_element(sig, c));
  }
  return make_basis(sig, Subalgebra::a, std::move(out));
}

/// k0 = so(p-q) embedded in the top-left (p-q) x (p-q) block.
inline SubalgebraBasis build_k0(const Signature& sig) {
  std::vector<LieElement> out;
  const int m = sig.p() - sig.q();
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) out.push_back(detail::rotation(sig, i, j));
  return make_basis(sig, Subalgebra::k0, std::move(out));
}

/// Value of f_i on H_c. The functional f_i takes -c_i; this sign fixes which
/// root spaces are called positive.
inline Rational root_coordinate_value(const Rational& c_i) { return -c_i; }

/// alpha(H_c) for alpha = sum_i coeffs[i] f_i.
inline Rational evaluate_root(std::span<const int> coeffs, std::span<const Rational> c) {
  Rational out(0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) out += Rational(coeffs[i]) * root_coordinate_value(c[i]);
  return out;
}

/// Root space g_alpha: the joint solution of ad(H^{(i)}) X = alpha(H^{(i)}) X,
/// solved exactly in so-basis coordinates. Empty when alpha is not a root.
inline SubalgebraBasis root_space(const Signature& sig, std::span<const int> coeffs) {
  if (coeffs.size() != static_cast<std::size_t>(sig.q())) throw ShapeError("root coefficients must have length q");
  const auto so = so_basis(sig);
  const auto a = build_a(sig);
  const std::size_t n2 = sig.dim() * sig.dim();
  QMatrix system(n2 * a.size(), so.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<Rational> c(static_cast<std::size_t>(sig.q()), Rational(0));
    c[i] = Rational(1);
    const Rational eigenvalue = evaluate_root(coeffs, c);
    for (std::size_t k = 0; k < so.size(); ++k) {
      const QMatrix column = commutator(a.elements[i].matrix(), so.elements[k].matrix()) - eigenvalue * so.elements[k].matrix();
      for (std::size_t e = 0; e < n2; ++e) system(i * n2 + e, k) = column.entries()[e];
    }
  }
  std::vector<LieElement> out;
  for (const auto& v : nullspace(system)) {
    QMatrix m(sig.dim(), sig.dim());
    for (std::size_t k = 0; k < so.size(); ++k) {
      if (!v[k].is_zero()) m += v[k] * so.elements[k].matrix();
    }
    out.emplace_back(sig, std::move(m));
  }
  return make_basis(sig, Subalgebra::root_space, std::move(out), BasisCheck::independence);
}

enum class RootKind { single, difference, sum };

/// A restricted root, stored as integer coefficients over (f_1..f_q).
struct RootDatum {
  std::vector<int> coeffs;
  RootKind kind = RootKind::single;
  int i = 0;  // f_i (single) or the first index of f_i +- f_j
  int j = 0;  // second index, 0 for single roots
  bool positive = false;
  std::size_t multiplicity = 0;
  SubalgebraBasis space;

  [[nodiscard]] std::string label() const {
    auto term = [](int c, int idx, bool leading) {
      std::string s = c < 0 ? "-" : (leading ? "" : "+");
      return s + "f" + std::to_string(idx);
    };
    if (kind == RootKind::single) return term(coeffs[static_cast<std::size_t>(i - 1)], i, true);
    return term(coeffs[static_cast<std::size_t>(i - 1)], i, true) + term(coeffs[static_cast<std::size_t>(j - 1)], j, false);
  }
};

/// Lexicographic positivity: the first nonzero coefficient is positive.
inline bool is_lex_positive(std::span<const int> coeffs) {
  for (int c : coeffs) {
    if (c != 0) return c > 0;
  }
  return false;
}

namespace detail {

inline std::vector<int> root_coeffs(int q, int i, int ci, int j = 0, int cj = 0) {
  std::vector<int> out(static_cast<std::size_t>(q), 0);
  out[static_cast<std::size_t>(i - 1)] = ci;
  if (j > 0) out[static_cast<std::size_t>(j - 1)] = cj;
  return out;
}

}  // namespace detail

/// All restricted roots +-f_i +- f_j (i<j) and, when p != q, +-f_l, each with
/// its computed root space. Order: positive roots in the build_n order
/// (f_l ascending, then f_i - f_j, then f_i + f_j, lexicographic in (i,j)),
/// followed by their negatives in the same order.
inline std::vector<RootDatum> restricted_roots(const Signature& sig) {
  const int q = sig.q();
  struct Spec {
    RootKind kind;
    int i;
    int j;
    std::vector<int> coeffs;
  };
  std::vector<Spec> positive;
  if (sig.p() != sig.q()) {
    for (int l = 1; l <= q; ++l) positive.push_back({RootKind::single, l, 0, detail::root_coeffs(q, l, 1)});
  }
  for (int i = 1; i <= q; ++i)
    for (int j = i + 1; j <= q; ++j) positive.push_back({RootKind::difference, i, j, detail::root_coeffs(q, i, 1, j, -1)});
  for (int i = 1; i <= q; ++i)
    for (int j = i + 1; j <= q; ++j) positive.push_back({RootKind::sum, i, j, detail::root_coeffs(q, i, 1, j, 1)});

  std::vector<Spec> all = positive;
  for (const auto& s : positive) {
    auto neg = s.coeffs;
    for (auto& c : neg) c = -c;
    all.push_back({s.kind, s.i, s.j, std::move(neg)});
  }

  std::vector<RootDatum> out;
  out.reserve(all.size());
  for (auto& s : all) {
    auto space = root_space(sig, s.coeffs);
    RootDatum r{s.coeffs, s.kind, s.i, s.j, is_lex_positive(s.coeffs), space.size(), std::move(space)};
    out.push_back(std::move(r));
  }
  return out;
}

/// n = direct sum of the positive root spaces, in restricted_roots order.
/// Size q(p-1); every element nilpotent.
inline SubalgebraBasis build_n(const Signature& sig) {
  std::vector<LieElement> out;
  for (const auto& r : restricted_roots(sig)) {
    if (!r.positive) continue;
    out.insert(out.end(), r.space.elements.begin(), r.space.elements.end());
  }
  return make_basis(sig, Subalgebra::n, std::move(out));
}

/// The linear conditions characterising n in block coordinates:
///   A_{k,p-l+1} = B_{k,l}          1 <= k <= p-q, 1 <= l <= q (absent if p = q)
///   A_{p+1-j,p+1-i} = B_{p+1-j,i}  1 <= i < j <= q
///   D_{i,j} = -B_{p+1-i,j}         1 <= i < j <= q
inline bool satisfies_n_equations(const LieElement& x) {
  const int p = x.sig().p();
  const int q = x.sig().q();
  for (int k = 1; k <= p - q; ++k)
    for (int l = 1; l <= q; ++l)
      if (x.A(k, p - l + 1) != x.B(k, l)) return false;
  for (int i = 1; i <= q; ++i) {
    for (int j = i + 1; j <= q; ++j) {
      if (x.A(p + 1 - j, p + 1 - i) != x.B(p + 1 - j, i)) return false;
      if (x.D(i, j) != -x.B(p + 1 - i, j)) return false;
    }
  }
  return true;
}

/// The subspace of so(p,q) cut out by satisfies_n_equations alone (all other
/// entries free). Reported against n to settle whether those equations
/// characterise n by themselves.
inline SubalgebraBasis n_equation_solution_space(const Signature& sig) {
  const auto so = so_basis(sig);
  const int p = sig.p();
  const int q = sig.q();
  // Each equation is a linear functional of the matrix entries: entry(r1,c1) - s * entry(r2,c2).
  struct Equation {
    int r1, c1, r2, c2;
    int s;
  };
  std::vector<Equation> eqs;
  for (int k = 1; k <= p - q; ++k)
    for (int l = 1; l <= q; ++l) eqs.push_back({k, p - l + 1, k, p + l, 1});
  for (int i = 1; i <= q; ++i) {
    for (int j = i + 1; j <= q; ++j) {
      eqs.push_back({p + 1 - j, p + 1 - i, p + 1 - j, p + i, 1});
      eqs.push_back({p + i, p + j, p + 1 - i, p + j, -1});
    }
  }
  QMatrix system(eqs.size(), so.size());
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    const auto& eq = eqs[e];
    for (std::size_t k = 0; k < so.size(); ++k) {
      const QMatrix& m = so.elements[k].matrix();
      system(e, k) = m(static_cast<std::size_t>(eq.r1 - 1), static_cast<std::size_t>(eq.c1 - 1)) -
                     Rational(eq.s) * m(static_cast<std::size_t>(eq.r2 - 1), static_cast<std::size_t>(eq.c2 - 1));
    }
  }
  std::vector<LieElement> out;
  for (const auto& v : nullspace(system)) {
    QMatrix m(sig.dim(), sig.dim());
    for (std::size_t k = 0; k < so.size(); ++k)
      if (!v[k].is_zero()) m += v[k] * so.elements[k].matrix();
    out.emplace_back(sig, std::move(m));
  }
  return make_basis(sig, Subalgebra::custom, std::move(out), BasisCheck::independence);
}

/// X in n: X satisfies the n equations and lies in span(build_n).
inline bool n_membership(const LieElement& x, const SubalgebraBasis& n) {
  return satisfies_n_equations(x) && n.contains(x);
}

/// Same test against a precomputed span of n (for sweeps).
inline bool n_membership(const LieElement& x, const SpanBasis& n_span) {
  return satisfies_n_equations(x) && n_span.contains(x.matrix().flatten());
}

inline bool n_membership(const LieElement& x) { return n_membership(x, build_n(x.sig())); }

enum class GroupSelector { N, A, K0, AN, K0AN, KprimeAN, SO };

inline const char* to_string(GroupSelector g) {
  switch (g) {
    case GroupSelector::N: return "N";
    case GroupSelector::A: return "A";
    case GroupSelector::K0: return "K0";
    case GroupSelector::AN: return "AN";
    case GroupSelector::K0AN: return "K0AN";
    case GroupSelector::KprimeAN: return "KprimeAN";
    case GroupSelector::SO: return "SO";
  }
  return "?";
}

inline std::optional<GroupSelector> parse_group(std::string_view name) {
  for (auto g : {GroupSelector::N, GroupSelector::A, GroupSelector::K0, GroupSelector::AN, GroupSelector::K0AN, GroupSelector::KprimeAN,
                 GroupSelector::SO}) {
    if (name == to_string(g)) return g;
  }
  return std::nullopt;
}

/// The pieces of the Iwasawa decomposition, built once per signature.
struct IwasawaData {
  Signature sig;
  SubalgebraBasis so;
  SubalgebraBasis a;
  SubalgebraBasis k0;
  SubalgebraBasis n;

  explicit IwasawaData(Signature s) : sig(s), so(so_basis(s)), a(build_a(s)), k0(build_k0(s)), n(build_n(s)) {}
};

/// Basis of the Lie algebra of the selected group. `kprime` is required for
/// KprimeAN (may be empty, i.e. K' trivial) and must lie in k0.
inline SubalgebraBasis group_subalgebra(const IwasawaData& data, GroupSelector group, const std::optional<SubalgebraBasis>& kprime = std::nullopt) {
  if ((group == GroupSelector::KprimeAN) != kprime.has_value()) {
    throw UsageError("a k' basis is required for KprimeAN and only for KprimeAN");
  }
  const Signature& sig = data.sig;
  auto concat = [](std::initializer_list<const SubalgebraBasis*> parts) {
    std::vector<LieElement> out;
    for (const auto* part : parts) out.insert(out.end(), part->elements.begin(), part->elements.end());
    return out;
  };
  switch (group) {
    case GroupSelector::N: return data.n;
    case GroupSelector::A: return data.a;
    case GroupSelector::K0: return data.k0;
    case GroupSelector::SO: return data.so;
    case GroupSelector::AN: return make_basis(sig, Subalgebra::an, concat({&data.a, &data.n}));
    case GroupSelector::K0AN: return make_basis(sig, Subalgebra::k0an, concat({&data.k0, &data.a, &data.n}));
    case GroupSelector::KprimeAN: {
      const auto k0_span = data.k0.span();
      for (const auto& x : kprime->elements) {
        if (!k0_span.contains(x.matrix().flatten())) throw DomainError("k' is not contained in k0");
      }
      return make_basis(sig, Subalgebra::kprime_an, concat({&*kprime, &data.a, &data.n}));
    }
  }
  throw UsageError("unknown group selector");
}

inline SubalgebraBasis group_subalgebra(const Signature& sig, GroupSelector group, const std::optional<SubalgebraBasis>& kprime = std::nullopt) {
  return group_subalgebra(IwasawaData(sig), group, kprime);
}

/// A k' subalgebra of k0 given explicitly by elements (validated as a
/// closed, independent set).
inline SubalgebraBasis make_kprime(const Signature& sig, std::vector<LieElement> elements) {
  return make_basis(sig, Subalgebra::k0, std::move(elements));
}

/// Change-of-basis matrix with columns w_1..w_q, e_1..e_{p-q},
/// e_{p-q+1}+e_{p+q}, ..., e_p+e_{p+1}. In these coordinates every element
/// of n is strictly upper triangular and every element of a is diagonal.
inline QMatrix adapted_basis(const Signature& sig) {
  const int p = sig.p();
  const int q = sig.q();
  std::vector<QVector> cols;
  for (int i = 1; i <= q; ++i) cols.push_back(null_vector(sig, i));
  for (int i = 1; i <= p - q; ++i) cols.push_back(basis_vector(sig, i));
  for (int t = 1; t <= q; ++t) cols.push_back(basis_vector(sig, p - q + t) + basis_vector(sig, p + q - t + 1));
  return QMatrix::from_columns(sig.dim(), cols);
}

/// P^{-1} X P for the adapted basis P.
inline QMatrix in_adapted_basis(const LieElement& x) {
  const auto basis = adapted_basis(x.sig());
  return inverse(basis) * x.matrix() * basis;
}

/// Dimension of the centraliser of a in so(p,q), i.e. of g_0 = k0 + a.
inline std::size_t centralizer_of_a_dim(const Signature& sig) {
  const auto so = so_basis(sig);
  const auto a = build_a(sig);
  const std::size_t n2 = sig.dim() * sig.dim();
  QMatrix system(n2 * a.size(), so.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < so.size(); ++k) {
      const QMatrix column = commutator(a.elements[i].matrix(), so.elements[k].matrix());
      for (std::size_t e = 0; e < n2; ++e) system(i * n2 + e, k) = column.entries()[e];
    }
  }
  return so.size() - rank(system);
}

}  // namespace iwo
