#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "iwo/errors.hpp"
#include "iwo/matrix.hpp"
#include "iwo/rational.hpp"

namespace iwo {

/// Signature (p, q) of R^{p,q}; p >= q >= 1 (R^{q,p} is anti-isometric to R^{p,q}).
class Signature {
 public:
  Signature(int p, int q) : p_(p), q_(q) {
    if (q < 1 || p < q) {
      throw DomainError("invalid signature (" + std::to_string(p) + "," + std::to_string(q) + "): need p >= q >= 1" +
                        (p < q && p >= 1 ? "; swap p and q (R^{q,p} is anti-isometric to R^{p,q})" : ""));
    }
  }

  [[nodiscard]] int p() const { return p_; }
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(p_ + q_); }
  [[nodiscard]] std::string str() const { return "(" + std::to_string(p_) + "," + std::to_string(q_) + ")"; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  int p_;
  int q_;
};

/// e_i in the 1-based standard basis.
inline QVector basis_vector(const Signature& sig, int i) {
  if (i < 1 || static_cast<std::size_t>(i) > sig.dim()) throw DomainError("basis index out of range: " + std::to_string(i));
  return QVector::basis(sig.dim(), static_cast<std::size_t>(i - 1));
}

/// w_i = e_{p-i+1} - e_{p+i}, 1 <= i <= q; normal of the hyperplane Pi_i.
inline QVector null_vector(const Signature& sig, int i) {
  if (i < 1 || i > sig.q()) throw DomainError("null vector index out of range: " + std::to_string(i));
  return basis_vector(sig, sig.p() - i + 1) - basis_vector(sig, sig.p() + i);
}

/// x^i in the 1-based coordinate convention.
inline const Rational& coord(const QVector& x, int i) { return x[static_cast<std::size_t>(i - 1)]; }

/// Diagonal Gram matrix diag(+1 x p, -1 x q).
template <class T = Rational>
Matrix<T> gram_matrix(const Signature& sig) {
  Matrix<T> eta(sig.dim(), sig.dim());
  for (std::size_t i = 0; i < sig.dim(); ++i) eta(i, i) = static_cast<int>(i) < sig.p() ? T(1) : T(-1);
  return eta;
}

inline void require_dim(const QVector& x, const Signature& sig) {
  if (x.dim() != sig.dim()) {
    throw ShapeError("vector of dimension " + std::to_string(x.dim()) + " is not in R^" + sig.str());
  }
}

/// <x,y> = sum_{i<=p} x^i y^i - sum_{j>p} x^j y^j.
template <class T>
T scalar_product(const Vector<T>& x, const Vector<T>& y, const Signature& sig) {
  if (x.dim() != sig.dim() || y.dim() != sig.dim()) throw ShapeError("scalar product: dimension mismatch for " + sig.str());
  T acc(0);
  for (std::size_t i = 0; i < sig.dim(); ++i) {
    if (static_cast<int>(i) < sig.p()) {
      acc += x[i] * y[i];
    } else {
      acc -= x[i] * y[i];
    }
  }
  return acc;
}

enum class CausalTag { zero, spacelike, timelike, lightlike };

inline const char* to_string(CausalTag tag) {
  switch (tag) {
    case CausalTag::zero: return "zero";
    case CausalTag::spacelike: return "spacelike";
    case CausalTag::timelike: return "timelike";
    case CausalTag::lightlike: return "lightlike";
  }
  return "?";
}

struct CausalType {
  CausalTag tag = CausalTag::zero;
  Rational norm;  // <x,x>
  /// Sign of <x, e_{p+1}>; set only for q = 1 and lightlike/timelike x.
  std::optional<int> time_sign;
};

inline CausalType causal_classify(const QVector& x, const Signature& sig) {
  require_dim(x, sig);
  CausalType out;
  out.norm = scalar_product(x, x, sig);
  if (x.is_zero()) {
    out.tag = CausalTag::zero;
  } else if (out.norm.sign() > 0) {
    out.tag = CausalTag::spacelike;
  } else if (out.norm.sign() < 0) {
    out.tag = CausalTag::timelike;
  } else {
    out.tag = CausalTag::lightlike;
  }
  if (sig.q() == 1 && (out.tag == CausalTag::lightlike || out.tag == CausalTag::timelike)) {
    out.time_sign = scalar_product(x, basis_vector(sig, sig.p() + 1), sig).sign();
  }
  return out;
}

/// Name of the q = 1 component a lightlike or timelike vector lies in.
/// Lambda^p_+ is <v,e_{p+1}> < 0, H^{p,0}_+ is <v,e_{p+1}> > 0.
inline std::string component_label(const CausalType& c) {
  if (!c.time_sign) return "";
  const int s = *c.time_sign;
  if (c.tag == CausalTag::lightlike) return s < 0 ? "Lambda+" : "Lambda-";
  if (c.tag == CausalTag::timelike) return s > 0 ? "H+" : "H-";
  return "";
}

enum class StratumCase {
  off_w,        // x outside W^p = intersection of all Pi_i; k defined
  cylinder,     // x in W^p but not in the intersection of all P_j
  isotropic,    // x in W^p and in every P_j, i.e. x in span{w_1..w_q}; l defined
};

inline const char* to_string(StratumCase c) {
  switch (c) {
    case StratumCase::off_w: return "a";
    case StratumCase::cylinder: return "b";
    case StratumCase::isotropic: return "c";
  }
  return "?";
}

struct StratumDescriptor {
  StratumCase stratum_case = StratumCase::off_w;
  std::optional<int> k_index;  // min i with x not in Pi_i
  bool in_all_pi = false;      // x in W^p
  bool in_all_p = false;       // x^j = 0 for j <= p-q (vacuous when p = q)
  std::optional<int> l_index;  // max j with x^{p+j} != 0, case c only
  /// +1/-1 per the sign conventions below, 0 when unset (case b with p > q+1).
  ///   case a: sign of x^{p-k+1} + x^{p+k}
  ///   case b: sign of x^1 when p = q+1
  ///   case c: sign of x^{p+l}
  int sign_label = 0;

  friend bool operator==(const StratumDescriptor&, const StratumDescriptor&) = default;
};

/// <x, w_i> = x^{p-i+1} + x^{p+i}: x lies in Pi_i iff this vanishes.
inline Rational pi_functional(const QVector& x, const Signature& sig, int i) {
  return coord(x, sig.p() - i + 1) + coord(x, sig.p() + i);
}

inline bool in_pi(const QVector& x, const Signature& sig, int i) {
  require_dim(x, sig);
  if (i == 0) return true;  // Pi_0 is the whole space
  if (i < 1 || i > sig.q()) throw DomainError("Pi index out of range: " + std::to_string(i));
  return pi_functional(x, sig, i).is_zero();
}

/// x in P_j (x^j = 0), 1 <= j <= p-q. Undefined when p = q.
inline bool in_p(const QVector& x, const Signature& sig, int j) {
  require_dim(x, sig);
  if (sig.p() == sig.q()) throw UsageError("hyperplanes P_j do not exist when p = q");
  if (j < 1 || j > sig.p() - sig.q()) throw DomainError("P index out of range: " + std::to_string(j));
  return coord(x, j).is_zero();
}

inline bool in_w(const QVector& x, const Signature& sig) {
  for (int i = 1; i <= sig.q(); ++i) {
    if (!in_pi(x, sig, i)) return false;
  }
  return true;
}

inline StratumDescriptor stratum(const QVector& x, const Signature& sig) {
  require_dim(x, sig);
  if (x.is_zero()) throw DomainError("stratum of the zero vector is undefined");
  const int p = sig.p();
  const int q = sig.q();
  StratumDescriptor s;
  for (int i = 1; i <= q; ++i) {
    const Rational value = pi_functional(x, sig, i);
    if (!value.is_zero()) {
      s.k_index = i;
      s.sign_label = value.sign();
      break;
    }
  }
  s.in_all_pi = !s.k_index.has_value();
  s.in_all_p = true;
  for (int j = 1; j <= p - q; ++j) {
    if (!coord(x, j).is_zero()) s.in_all_p = false;
  }
  if (s.k_index) {
    s.stratum_case = StratumCase::off_w;
  } else if (!s.in_all_p) {
    s.stratum_case = StratumCase::cylinder;
    s.sign_label = p == q + 1 ? coord(x, 1).sign() : 0;
  } else {
    s.stratum_case = StratumCase::isotropic;
    for (int j = q; j >= 1; --j) {
      if (!coord(x, p + j).is_zero()) {
        s.l_index = j;
        s.sign_label = coord(x, p + j).sign();
        break;
      }
    }
  }
  return s;
}

enum class QuadricFamily { S, H, Lambda };

inline const char* to_string(QuadricFamily f) {
  switch (f) {
    case QuadricFamily::S: return "S";
    case QuadricFamily::H: return "H";
    case QuadricFamily::Lambda: return "Lambda";
  }
  return "?";
}

struct QuadricLevel {
  QuadricFamily family = QuadricFamily::Lambda;
  Rational radius_squared;  // r^2; 0 on the null cone

  friend bool operator==(const QuadricLevel&, const QuadricLevel&) = default;
};

/// Which SO_o(p,q)-invariant hyperquadric contains x: S^{p-1,q}(r) with
/// r^2 = <x,x>, H^{p,q-1}(r) with r^2 = -<x,x>, or the null cone.
inline QuadricLevel hyperquadric_radius(const QVector& x, const Signature& sig) {
  require_dim(x, sig);
  if (x.is_zero()) throw DomainError("the zero vector lies on no hyperquadric");
  const Rational norm = scalar_product(x, x, sig);
  if (norm.sign() > 0) return {QuadricFamily::S, norm};
  if (norm.sign() < 0) return {QuadricFamily::H, -norm};
  return {QuadricFamily::Lambda, Rational(0)};
}

/// Parses p+q comma-separated rationals ("1/2,-3,0").
inline QVector parse_point(const std::string& text, const Signature& sig) {
  std::vector<Rational> values;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    values.push_back(Rational::parse(std::string_view(text).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  QVector x(std::move(values));
  require_dim(x, sig);
  return x;
}

inline std::string format_point(const QVector& x) {
  std::string out;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (i) out += ',';
    out += x[i].str();
  }
  return out;
}

}  // namespace iwo
