#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "iwo/errors.hpp"
#include "iwo/lie_so_pq.hpp"
#include "iwo/matrix.hpp"
#include "iwo/pseudo_space.hpp"

namespace iwo {

/// An element of O(p,q): exact (Rational) or numeric (double).
template <class T>
struct GroupElement {
  Signature sig;
  Matrix<T> mat;

  static constexpr bool exact = std::is_same_v<T, Rational>;

  [[nodiscard]] Vector<T> apply(const Vector<T>& x) const { return matvec(mat, x); }
};

using ExactGroupElement = GroupElement<Rational>;
using NumericGroupElement = GroupElement<double>;

/// M^t eta M - eta; zero exactly iff M is in O(p,q).
template <class T>
Matrix<T> opq_defect(const Matrix<T>& m, const Signature& sig) {
  const auto eta = gram_matrix<T>(sig);
  return m.transpose() * eta * m - eta;
}

/// Largest entry of |M^t eta M - eta|.
inline double opq_residual(const RMatrix& m, const Signature& sig) {
  const RMatrix defect = opq_defect(m, sig);
  double worst = 0.0;
  for (double v : defect.entries()) worst = std::max(worst, std::abs(v));
  return worst;
}

inline bool is_in_opq(const QMatrix& m, const Signature& sig) { return opq_defect(m, sig).is_zero(); }

/// exp(X) = sum_{k < p+q} X^k / k!, exact. DomainError unless X^{p+q} = 0.
inline ExactGroupElement exp_nilpotent(const LieElement& x) {
  const std::size_t n = x.sig().dim();
  QMatrix result = QMatrix::identity(n);
  QMatrix power = QMatrix::identity(n);
  Rational factorial(1);
  for (std::size_t k = 1; k < n; ++k) {
    power = power * x.matrix();
    factorial *= Rational(static_cast<long>(k));
    if (power.is_zero()) return {x.sig(), std::move(result)};
    result += (Rational(1) / factorial) * power;
  }
  if (!(power * x.matrix()).is_zero()) throw DomainError("exp_nilpotent: X^{p+q} != 0, element is not nilpotent");
  return {x.sig(), std::move(result)};
}

/// Closed form of exp(H_c): identity on e_1..e_{p-q} and a hyperbolic
/// rotation by c_i in each (e_{p-i+1}, e_{p+i}) plane.
inline NumericGroupElement exp_a(const Signature& sig, std::span<const double> c) {
  if (c.size() != static_cast<std::size_t>(sig.q())) throw ShapeError("exp_a expects q parameters");
  RMatrix m = RMatrix::identity(sig.dim());
  for (int i = 1; i <= sig.q(); ++i) {
    const auto u = static_cast<std::size_t>(sig.p() - i);
    const auto v = static_cast<std::size_t>(sig.p() + i - 1);
    const double ci = c[static_cast<std::size_t>(i - 1)];
    m(u, u) = m(v, v) = std::cosh(ci);
    m(u, v) = m(v, u) = std::sinh(ci);
  }
  return {sig, std::move(m)};
}

/// exp(H_c) with c_i = k_i ln 2, which has rational entries
/// cosh = (2^k + 2^-k)/2, sinh = (2^k - 2^-k)/2.
inline ExactGroupElement exp_a_log2(const Signature& sig, std::span<const int> k) {
  if (k.size() != static_cast<std::size_t>(sig.q())) throw ShapeError("exp_a_log2 expects q exponents");
  QMatrix m = QMatrix::identity(sig.dim());
  for (int i = 1; i <= sig.q(); ++i) {
    const auto u = static_cast<std::size_t>(sig.p() - i);
    const auto v = static_cast<std::size_t>(sig.p() + i - 1);
    const int e = k[static_cast<std::size_t>(i - 1)];
    Rational up(1);
    for (int s = 0; s < std::abs(e); ++s) up *= Rational(2);
    if (e < 0) up = Rational(1) / up;
    const Rational down = Rational(1) / up;
    m(u, u) = m(v, v) = (up + down) / Rational(2);
    m(u, v) = m(v, u) = (up - down) / Rational(2);
  }
  return {sig, std::move(m)};
}

/// Rotation by the angle with the given rational cosine and sine in the
/// (e_i, e_j) plane, i < j <= p-q (an element of K0). Needs cos^2 + sin^2 = 1.
inline ExactGroupElement k0_rotation(const Signature& sig, int i, int j, const Rational& cos, const Rational& sin) {
  if (i < 1 || j <= i || j > sig.p() - sig.q()) throw DomainError("k0_rotation: need 1 <= i < j <= p-q");
  if (cos * cos + sin * sin != Rational(1)) throw DomainError("k0_rotation: cos^2 + sin^2 != 1");
  QMatrix m = QMatrix::identity(sig.dim());
  const auto a = static_cast<std::size_t>(i - 1);
  const auto b = static_cast<std::size_t>(j - 1);
  m(a, a) = m(b, b) = cos;
  m(a, b) = -sin;
  m(b, a) = sin;
  return {sig, std::move(m)};
}

namespace detail {

inline double one_norm(const RMatrix& m) {
  double worst = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double col = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) col += std::abs(m(r, c));
    worst = std::max(worst, col);
  }
  return worst;
}

}  // namespace detail

inline constexpr int kExpSeriesOrder = 12;
inline constexpr double kExpScalingThreshold = 0.5;
inline constexpr double kGroupTolerance = 1e-9;

struct NumericExp {
  NumericGroupElement element;
  double residual = 0.0;  // opq_residual of the result
};

/// exp(tX) by scaling and squaring: halve until ||tX||_1 <= 0.5, sum the
/// Taylor series to order 12, square back.
inline NumericExp exp_generic(const Signature& sig, const RMatrix& x, double t) {
  RMatrix scaled = t * x;
  int squarings = 0;
  double norm = detail::one_norm(scaled);
  while (norm > kExpScalingThreshold) {
    scaled = 0.5 * scaled;
    norm *= 0.5;
    ++squarings;
  }
  const std::size_t n = x.rows();
  RMatrix result = RMatrix::identity(n);
  RMatrix term = RMatrix::identity(n);
  for (int k = 1; k <= kExpSeriesOrder; ++k) {
    term = (1.0 / k) * (term * scaled);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  const double residual = opq_residual(result, sig);
  return {{sig, std::move(result)}, residual};
}

inline NumericExp exp_generic(const LieElement& x, double t) { return exp_generic(x.sig(), to_double(x.matrix()), t); }

struct FlowSample {
  double t = 0.0;
  RVector point;
  double norm_residual = 0.0;  // |<g(t),g(t)> - <x,x>|
};

/// n uniform samples on [t_min, t_max]; a single sample sits at t_min.
inline std::vector<double> t_grid(double t_min, double t_max, std::size_t steps) {
  if (steps == 0) throw UsageError("t grid needs at least one step");
  std::vector<double> out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const auto n = static_cast<double>(steps - 1);
    const auto k = static_cast<double>(i);
    out.push_back(steps == 1 ? t_min : (t_min * (n - k) + t_max * k) / n);
  }
  return out;
}

inline std::vector<double> default_t_grid() { return t_grid(-3.0, 3.0, 61); }

/// g(t) = exp(tX) x on the grid, with the form-invariance residual per sample.
inline std::vector<FlowSample> flow_curve(const LieElement& x_gen, const RVector& x, std::span<const double> grid) {
  const Signature& sig = x_gen.sig();
  if (x.dim() != sig.dim()) throw ShapeError("flow_curve: point is not in R^" + sig.str());
  const RMatrix gen = to_double(x_gen.matrix());
  const double base = scalar_product(x, x, sig);
  std::vector<FlowSample> out;
  out.reserve(grid.size());
  for (double t : grid) {
    RVector y = matvec(exp_generic(sig, gen, t).element.mat, x);
    const double residual = std::abs(scalar_product(y, y, sig) - base);
    out.push_back({t, std::move(y), residual});
  }
  return out;
}

}  // namespace iwo
