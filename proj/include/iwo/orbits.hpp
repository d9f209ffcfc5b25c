#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iwo/errors.hpp"
#include "iwo/exact_linalg.hpp"
#include "iwo/lie_so_pq.hpp"
#include "iwo/matrix.hpp"
#include "iwo/pseudo_space.hpp"

namespace iwo {

// ---------------------------------------------------------------------------
// Tangent spaces and the rank oracle

/// Independent subset of {X_i x : X_i in basis} spanning the orbit tangent
/// space at x. Its size is dim(basis) - dim(stabiliser algebra at x).
inline std::vector<QVector> tangent_space(const SubalgebraBasis& basis, const QVector& x) {
  require_dim(x, basis.sig);
  SpanBasis span(x.dim());
  std::vector<QVector> out;
  for (const auto& g : basis.elements) {
    QVector v = g.apply(x);
    if (span.insert(v)) out.push_back(std::move(v));
  }
  return out;
}

/// Matrix whose columns are X_i x.
inline QMatrix tangent_matrix(const SubalgebraBasis& basis, const QVector& x) {
  require_dim(x, basis.sig);
  std::vector<QVector> cols;
  cols.reserve(basis.size());
  for (const auto& g : basis.elements) cols.push_back(g.apply(x));
  return QMatrix::from_columns(x.dim(), cols);
}

/// dim G(x) = rank [X_1 x | ... | X_m x], by Bareiss elimination.
inline std::size_t orbit_dim_oracle(const SubalgebraBasis& basis, const QVector& x) { return rank(tangent_matrix(basis, x)); }

/// Basis of the stabiliser algebra {X in span(basis) : X x = 0}, in
/// coordinates over `basis`.
inline std::vector<QVector> stabilizer_coordinates(const SubalgebraBasis& basis, const QVector& x) {
  return nullspace(tangent_matrix(basis, x));
}

/// Common kernel of all basis elements: the directions fixed pointwise by
/// the connected group (and, for nilpotent algebras, the only preserved
/// directions).
inline std::vector<QVector> fixed_directions(const SubalgebraBasis& basis) {
  const std::size_t n = basis.sig.dim();
  QMatrix stacked(n * basis.size(), n);
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const QMatrix& m = basis.elements[b].matrix();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) stacked(b * n + r, c) = m(r, c);
  }
  if (basis.empty()) {
    std::vector<QVector> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back(QVector::basis(n, i));
    return all;
  }
  return nullspace(stacked);
}

// ---------------------------------------------------------------------------
// Closed-form orbit dimensions

/// y: the R^{p-q} part of x (coordinates 1..p-q), embedded back in R^{p+q}.
inline QVector sphere_part(const QVector& x, const Signature& sig) {
  QVector y(sig.dim());
  for (int j = 1; j <= sig.p() - sig.q(); ++j) y[static_cast<std::size_t>(j - 1)] = coord(x, j);
  return y;
}

/// Closed-form dim G(x) from the stratum of x.
///
///            case a (k)    case b             case c (l)
///   N        p+q-k-1       q                  l-1
///   AN       p+q-k         q                  l
///   K0AN     p+q-k         p-1                l
///   K'AN     p+q-k         q + dim K'(y)      l
///   SO       p+q-1 everywhere
///
/// A and K0 have no closed form here; asking for them is a UsageError.
inline std::size_t predict_dim(const Signature& sig, GroupSelector group, const QVector& x,
                               const SubalgebraBasis* kprime = nullptr) {
  require_dim(x, sig);
  if (x.is_zero()) throw DomainError("orbit dimension predictor needs a nonzero point");
  if (group == GroupSelector::A || group == GroupSelector::K0) {
    throw UsageError(std::string("no closed-form predictor for ") + to_string(group) + "; use the rank oracle");
  }
  const auto p = static_cast<std::size_t>(sig.p());
  const auto q = static_cast<std::size_t>(sig.q());
  if (group == GroupSelector::SO) return p + q - 1;
  if (group == GroupSelector::KprimeAN && kprime == nullptr) throw UsageError("KprimeAN prediction needs a k' basis");

  const auto s = stratum(x, sig);
  switch (s.stratum_case) {
    case StratumCase::off_w: {
      const auto k = static_cast<std::size_t>(*s.k_index);
      return group == GroupSelector::N ? p + q - k - 1 : p + q - k;
    }
    case StratumCase::cylinder:
      switch (group) {
        case GroupSelector::N:
        case GroupSelector::AN: return q;
        case GroupSelector::K0AN: return p - 1;
        case GroupSelector::KprimeAN: return q + orbit_dim_oracle(*kprime, sphere_part(x, sig));
        default: break;
      }
      break;
    case StratumCase::isotropic: {
      const auto l = static_cast<std::size_t>(*s.l_index);
      return group == GroupSelector::N ? l - 1 : l;
    }
  }
  throw UsageError("unsupported predictor");
}

// ---------------------------------------------------------------------------
// Orbit descriptors

enum class OrbitForm {
  component_of_intersection,  // case a: a connected component of a quadric level set cut by the Pi-flag
  cylinder_product,           // case b: K'(y) x span{w_j}
  flag_affine,                // case c: span{w_1..w_{l-1}} + R_{+/-} w_l (or a translate for N)
};

inline const char* to_string(OrbitForm f) {
  switch (f) {
    case OrbitForm::component_of_intersection: return "component-of-intersection";
    case OrbitForm::cylinder_product: return "cylinder-product";
    case OrbitForm::flag_affine: return "flag-affine";
  }
  return "?";
}

/// Symbolic description of the orbit through a point. For N, AN, K0AN and
/// K'AN with trivial k', equal descriptors mean equal orbits and vice versa.
/// When `sufficient` is false the descriptor only carries invariants
/// (necessary conditions for two points to share an orbit).
struct OrbitDescriptor {
  GroupSelector group = GroupSelector::AN;
  QuadricLevel quadric;
  StratumCase stratum_case = StratumCase::off_w;
  std::optional<int> k_index;
  std::optional<int> l_index;
  std::size_t dim = 0;
  /// case a: sign of x^{p-k+1}+x^{p+k}; case b with p = q+1: sign of x^1;
  /// case c: sign of r_l in x = sum r_j w_j (the R_+ / R_- ray); else 0.
  int orientation = 0;
  std::optional<int> time_sign;
  OrbitForm form = OrbitForm::component_of_intersection;
  std::optional<QVector> sphere_point;          // y, when the orbit is y + span{w_j}
  std::optional<Rational> level;                // N only: <x,w_k> (case a) or r_l (case c)
  std::optional<std::size_t> kprime_orbit_dim;  // K'AN case b: dim K'(y)
  bool sufficient = true;

  friend bool operator==(const OrbitDescriptor&, const OrbitDescriptor&) = default;
};

inline OrbitDescriptor stratum_orbit_descriptor(const Signature& sig, GroupSelector group, const QVector& x,
                                                const SubalgebraBasis* kprime = nullptr) {
  if (group != GroupSelector::N && group != GroupSelector::AN && group != GroupSelector::K0AN && group != GroupSelector::KprimeAN) {
    throw UsageError(std::string("no orbit descriptor for group ") + to_string(group));
  }
  const auto s = stratum(x, sig);
  const auto causal = causal_classify(x, sig);
  OrbitDescriptor d;
  d.group = group;
  d.quadric = hyperquadric_radius(x, sig);
  d.stratum_case = s.stratum_case;
  d.k_index = s.k_index;
  d.l_index = s.l_index;
  d.dim = predict_dim(sig, group, x, kprime);
  d.time_sign = causal.time_sign;
  const int p = sig.p();
  const int q = sig.q();
  const bool trivial_kprime = group == GroupSelector::KprimeAN && kprime != nullptr && kprime->empty();

  switch (s.stratum_case) {
    case StratumCase::off_w:
      d.form = OrbitForm::component_of_intersection;
      d.orientation = s.sign_label;
      if (group == GroupSelector::N) {
        d.level = pi_functional(x, sig, *s.k_index);
        d.sufficient = false;
      }
      break;
    case StratumCase::cylinder:
      d.form = OrbitForm::cylinder_product;
      if (group == GroupSelector::N || group == GroupSelector::AN || trivial_kprime) {
        d.sphere_point = sphere_part(x, sig);
      } else if (group == GroupSelector::K0AN) {
        d.orientation = p == q + 1 ? coord(x, 1).sign() : 0;
      } else {
        d.kprime_orbit_dim = orbit_dim_oracle(*kprime, sphere_part(x, sig));
        d.orientation = p == q + 1 ? coord(x, 1).sign() : 0;
        d.sufficient = p == q + 1;
      }
      break;
    case StratumCase::isotropic: {
      d.form = OrbitForm::flag_affine;
      const Rational r_l = -coord(x, p + *s.l_index);
      d.orientation = r_l.sign();
      if (group == GroupSelector::N) d.level = r_l;
      break;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Orbit reports

struct OrbitReport {
  Signature sig;
  GroupSelector group;
  QVector point;
  StratumDescriptor stratum;
  std::optional<std::size_t> predicted_dim;  // empty for oracle-only groups
  std::size_t oracle_dim = 0;
  std::vector<QVector> tangent_basis;
  bool agrees = true;  // predicted == oracle (vacuously true without a predictor)
  std::optional<OrbitDescriptor> descriptor;
};

inline OrbitReport orbit_report(const IwasawaData& data, GroupSelector group, const QVector& x,
                                const std::optional<SubalgebraBasis>& kprime = std::nullopt) {
  const Signature& sig = data.sig;
  require_dim(x, sig);
  if (x.is_zero()) throw DomainError("orbit report needs a nonzero point");
  const auto basis = group_subalgebra(data, group, kprime);
  OrbitReport r{sig, group, x, stratum(x, sig), std::nullopt, 0, tangent_space(basis, x), true, std::nullopt};
  r.oracle_dim = orbit_dim_oracle(basis, x);
  const SubalgebraBasis* kp = kprime ? &*kprime : nullptr;
  if (group != GroupSelector::A && group != GroupSelector::K0) {
    r.predicted_dim = predict_dim(sig, group, x, kp);
    r.agrees = *r.predicted_dim == r.oracle_dim;
  }
  if (group == GroupSelector::N || group == GroupSelector::AN || group == GroupSelector::K0AN || group == GroupSelector::KprimeAN) {
    r.descriptor = stratum_orbit_descriptor(sig, group, x, kp);
  }
  return r;
}

/// Compares the AN and K'AN tangent spaces at x outside W^p. AN is contained
/// in K'AN, so equal dimensions mean equal subspaces; both are checked.
/// Overload on prebuilt an and k'+a+n bases, for sweeps.
inline bool tangent_equal_off_W(const SubalgebraBasis& an, const SubalgebraBasis& kprime_an, const QVector& x) {
  require_dim(x, an.sig);
  if (x.is_zero() || in_w(x, an.sig)) throw DomainError("tangent_equal_off_W: point lies in W^p");
  const auto t_an = tangent_space(an, x);
  const auto t_kan = tangent_space(kprime_an, x);
  return t_an.size() == t_kan.size() && same_span(t_an, t_kan, x.dim());
}

inline bool tangent_equal_off_W(const IwasawaData& data, const QVector& x, const SubalgebraBasis& kprime) {
  return tangent_equal_off_W(group_subalgebra(data, GroupSelector::AN), group_subalgebra(data, GroupSelector::KprimeAN, kprime), x);
}

// ---------------------------------------------------------------------------
// Sampling

struct SamplePlan {
  std::uint64_t seed = 7;
  std::size_t per_stratum_count = 50;
  long coordinate_range = 10;  // bound on |numerator| and denominator of random coordinates
};

struct StratumKey {
  StratumCase stratum_case = StratumCase::off_w;
  int index = 0;  // k for case a, l for case c, 0 for case b

  friend bool operator==(const StratumKey&, const StratumKey&) = default;
  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
};

inline StratumKey key_of(const StratumDescriptor& s) {
  switch (s.stratum_case) {
    case StratumCase::off_w: return {s.stratum_case, *s.k_index};
    case StratumCase::cylinder: return {s.stratum_case, 0};
    case StratumCase::isotropic: return {s.stratum_case, *s.l_index};
  }
  return {};
}

inline std::string to_string(const StratumKey& k) {
  switch (k.stratum_case) {
    case StratumCase::off_w: return "a:k=" + std::to_string(k.index);
    case StratumCase::cylinder: return "b";
    case StratumCase::isotropic: return "c:l=" + std::to_string(k.index);
  }
  return "?";
}

struct SampledPoint {
  QVector point;
  StratumKey stratum;
  bool deterministic = false;
  std::string note;
};

struct SampleSet {
  std::vector<SampledPoint> points;
  std::vector<std::string> skipped;
};

namespace detail {

/// Deterministic generator: same (seed, signature) gives the same stream on
/// every platform (no std distributions, whose output is implementation-defined).
class PointRng {
 public:
  PointRng(std::uint64_t seed, const Signature& sig, long range)
      : engine_(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(sig.p()) * 1315423911ULL + static_cast<std::uint64_t>(sig.q())),
        range_(range < 1 ? 1 : range) {}

  long integer(long lo, long hi) { return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  Rational rational() { return Rational(integer(-range_, range_), integer(1, range_)); }

  Rational nonzero_rational() {
    Rational r;
    do {
      r = rational();
    } while (r.is_zero());
    return r;
  }

 private:
  std::mt19937_64 engine_;
  long range_;
};

}  // namespace detail

/// Stratified sample of R^{p,q} \ {0}: a deterministic core hitting every
/// stratum (including the boundary subcase x^{p-k+1} = 0 != x^{p+k}), then
/// `per_stratum_count` random rational points per stratum.
inline SampleSet sample_points(const Signature& sig, const SamplePlan& plan) {
  const int p = sig.p();
  const int q = sig.q();
  SampleSet out;
  auto add = [&](QVector x, StratumKey key, bool deterministic, std::string note) {
    out.points.push_back({std::move(x), key, deterministic, std::move(note)});
  };
  auto e = [&](int i) { return basis_vector(sig, i); };
  auto w = [&](int i) { return null_vector(sig, i); };

  // Deterministic core.
  for (int k = 1; k <= q; ++k) {
    add(e(p - k + 1), {StratumCase::off_w, k}, true, "e_" + std::to_string(p - k + 1));
    add(e(p + k), {StratumCase::off_w, k}, true, "e_" + std::to_string(p + k) + " (x^{p-k+1} = 0)");
    QVector mixed = e(p + k);
    for (int i = 1; i < k; ++i) mixed += Rational(i + 1) * w(i);
    if (p > q) mixed += e(1);
    add(std::move(mixed), {StratumCase::off_w, k}, true, "e_" + std::to_string(p + k) + " + lower flag terms");
  }
  if (p > q) {
    add(e(1), {StratumCase::cylinder, 0}, true, "e_1");
    QVector y = e(1);
    for (int j = 1; j <= q; ++j) y += w(j);
    add(std::move(y), {StratumCase::cylinder, 0}, true, "e_1 + sum w_j");
    if (p - q >= 2) add(e(p - q) - Rational(3) * w(q), {StratumCase::cylinder, 0}, true, "e_{p-q} - 3 w_q");
  } else {
    out.skipped.push_back("case b (W^p outside the P_j) is empty when p = q");
  }
  for (int l = 1; l <= q; ++l) {
    QVector plus(sig.dim());
    for (int j = 1; j <= l; ++j) plus += w(j);
    QVector minus = plus - Rational(2) * w(l);
    std::string head;
    for (int j = 1; j < l; ++j) head += (j > 1 ? "+ w_" : "w_") + std::to_string(j) + " ";
    const std::string last = "w_" + std::to_string(l);
    add(std::move(plus), {StratumCase::isotropic, l}, true, l == 1 ? last : head + "+ " + last);
    add(std::move(minus), {StratumCase::isotropic, l}, true, l == 1 ? "-" + last : head + "- " + last);
  }

  // Random points, constructed inside each stratum; rejection only for the
  // open condition that defines the stratum.
  detail::PointRng rng(plan.seed, sig, plan.coordinate_range);
  for (int k = 1; k <= q; ++k) {
    for (std::size_t n = 0; n < plan.per_stratum_count; ++n) {
      QVector x(sig.dim());
      do {
        for (std::size_t i = 0; i < sig.dim(); ++i) x[i] = rng.rational();
        for (int i = 1; i < k; ++i) x[static_cast<std::size_t>(p + i - 1)] = -coord(x, p - i + 1);
        if (n % 5 == 4) x[static_cast<std::size_t>(p - k)] = Rational(0);  // boundary subcase
      } while (pi_functional(x, sig, k).is_zero());
      add(std::move(x), {StratumCase::off_w, k}, false, "random");
    }
  }
  if (p > q) {
    for (std::size_t n = 0; n < plan.per_stratum_count; ++n) {
      QVector x(sig.dim());
      do {
        x = QVector(sig.dim());
        for (int j = 1; j <= p - q; ++j) x[static_cast<std::size_t>(j - 1)] = rng.rational();
      } while (x.is_zero());
      for (int j = 1; j <= q; ++j) x += rng.rational() * w(j);
      add(std::move(x), {StratumCase::cylinder, 0}, false, "random");
    }
  }
  for (int l = 1; l <= q; ++l) {
    for (std::size_t n = 0; n < plan.per_stratum_count; ++n) {
      QVector x = rng.nonzero_rational() * w(l);
      for (int j = 1; j < l; ++j) x += rng.rational() * w(j);
      add(std::move(x), {StratumCase::isotropic, l}, false, "random");
    }
  }
  return out;
}

/// codim of the largest orbit seen over the stratified sample.
inline std::size_t cohomogeneity_estimate(const IwasawaData& data, GroupSelector group, const SamplePlan& plan,
                                          const std::optional<SubalgebraBasis>& kprime = std::nullopt) {
  const auto basis = group_subalgebra(data, group, kprime);
  std::size_t best = 0;
  for (const auto& s : sample_points(data.sig, plan).points) best = std::max(best, orbit_dim_oracle(basis, s.point));
  return data.sig.dim() - best;
}

// ---------------------------------------------------------------------------
// A-orbits on span{w_1..w_q}

/// Census of the orbits of A acting on span{w_j}. A scales the w_j
/// coefficient by e^{-c_j}, so the orbit of sum r_j w_j is determined by the
/// sign pattern of (r_1..r_q). The enumerator walks the grid {-2..2}^q,
/// classifies points by sign pattern, and cross-checks each class's
/// dimension with the rank oracle. The stated count 2^{2q-1} and its
/// binomial breakdown C(2q,d) are carried alongside for comparison only.
struct AOrbitCensus {
  int q = 0;
  std::size_t enumerated = 0;
  std::vector<std::size_t> enumerated_by_dim;  // index d: number of d-dimensional orbits
  bool dims_consistent = true;                 // every grid point's oracle dim = #nonzero r_j
  std::size_t stated_total = 0;                // 2^{2q-1}
  std::vector<std::size_t> stated_breakdown;   // C(2q, d), d = 0..q
  std::size_t stated_breakdown_sum = 0;
};

inline AOrbitCensus a_orbit_census(const IwasawaData& data) {
  const Signature& sig = data.sig;
  const int q = sig.q();
  AOrbitCensus c;
  c.q = q;
  c.enumerated_by_dim.assign(static_cast<std::size_t>(q + 1), 0);
  std::set<std::vector<int>> patterns;
  std::vector<int> digits(static_cast<std::size_t>(q), -2);
  while (true) {
    QVector x(sig.dim());
    std::vector<int> pattern;
    std::size_t nonzero = 0;
    for (int j = 1; j <= q; ++j) {
      const int r = digits[static_cast<std::size_t>(j - 1)];
      x += Rational(r) * null_vector(sig, j);
      pattern.push_back(r > 0 ? 1 : (r < 0 ? -1 : 0));
      nonzero += r != 0 ? 1 : 0;
    }
    if (orbit_dim_oracle(data.a, x) != nonzero) c.dims_consistent = false;
    if (patterns.insert(pattern).second) ++c.enumerated_by_dim[nonzero];
    std::size_t pos = 0;
    while (pos < digits.size() && digits[pos] == 2) digits[pos++] = -2;
    if (pos == digits.size()) break;
    ++digits[pos];
  }
  c.enumerated = patterns.size();
  c.stated_total = std::size_t{1} << (2 * q - 1);
  auto binom = [](std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  for (int d = 0; d <= q; ++d) {
    c.stated_breakdown.push_back(binom(static_cast<std::size_t>(2 * q), static_cast<std::size_t>(d)));
    c.stated_breakdown_sum += c.stated_breakdown.back();
  }
  return c;
}

}  // namespace iwo
