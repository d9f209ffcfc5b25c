#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <vector>

#include "iwo/errors.hpp"
#include "iwo/matrix.hpp"
#include "iwo/rational.hpp"

namespace iwo {

namespace detail {

using IntegerMatrix = std::vector<std::vector<mpz_class>>;

/// Scales every row by the lcm of its denominators so the row becomes
/// integral. Row scaling by nonzero constants preserves rank and kernel.
inline IntegerMatrix clear_denominators(const QMatrix& m, std::vector<mpz_class>* row_scales = nullptr) {
  IntegerMatrix out(m.rows(), std::vector<mpz_class>(m.cols()));
  if (row_scales != nullptr) row_scales->clear();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    mpz_class scale = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), m(r, c).gmp().get_den_mpz_t());
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const mpq_class& x = m(r, c).gmp();
      out[r][c] = x.get_num() * (scale / x.get_den());
    }
    if (row_scales != nullptr) row_scales->push_back(scale);
  }
  return out;
}

/// Fraction-free (Bareiss) forward elimination in place. Every division is
/// exact by Sylvester's identity. Returns the pivot columns in order and
/// records the sign of the applied row permutation.
inline std::vector<std::size_t> bareiss_eliminate(IntegerMatrix& a, std::size_t cols, int* permutation_sign = nullptr) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivots;
  mpz_class previous = 1;
  mpz_class scratch;
  int sign = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot_row = r;
    while (pivot_row < rows && a[pivot_row][c] == 0) ++pivot_row;
    if (pivot_row == rows) continue;
    if (pivot_row != r) {
      std::swap(a[pivot_row], a[r]);
      sign = -sign;
    }
    const mpz_class& pivot = a[r][c];
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        scratch = pivot * a[i][j];
        scratch -= a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), scratch.get_mpz_t(), previous.get_mpz_t());
      }
      a[i][c] = 0;
    }
    previous = pivot;
    pivots.push_back(c);
    ++r;
  }
  if (permutation_sign != nullptr) *permutation_sign = sign;
  return pivots;
}

}  // namespace detail

/// Exact rank over Q by fraction-free elimination. The empty matrix has rank 0.
inline std::size_t rank(const QMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  auto a = detail::clear_denominators(m);
  return detail::bareiss_eliminate(a, m.cols()).size();
}

/// Exact determinant via Bareiss; the last pivot of a full-rank square
/// elimination is the determinant of the row-scaled integer matrix.
inline Rational determinant(const QMatrix& m) {
  if (!m.is_square()) throw ShapeError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return Rational(1);
  std::vector<mpz_class> scales;
  auto a = detail::clear_denominators(m, &scales);
  mpz_class scale_product = 1;
  for (const auto& s : scales) scale_product *= s;
  int sign = 1;
  const auto pivots = detail::bareiss_eliminate(a, n, &sign);
  if (pivots.size() < n) return Rational(0);
  mpq_class det(a[n - 1][n - 1] * sign, scale_product);
  return Rational(det);
}

struct RowEchelon {
  QMatrix reduced;                   // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

/// Gauss-Jordan reduction to reduced row echelon form over Q.
inline RowEchelon rref(QMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pivot_row = r;
    while (pivot_row < m.rows() && m(pivot_row, c).is_zero()) ++pivot_row;
    if (pivot_row == m.rows()) continue;
    m.swap_rows(pivot_row, r);
    const Rational inv = Rational(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      const Rational factor = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= factor * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

/// Basis of {v : M v = 0}; one vector per free column, with a 1 in that
/// column. Size is cols(M) - rank(M).
inline std::vector<QVector> nullspace(const QMatrix& m) {
  const auto echelon = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : echelon.pivots) is_pivot[c] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    QVector v(m.cols());
    v[free] = Rational(1);
    for (std::size_t row = 0; row < echelon.pivots.size(); ++row) v[echelon.pivots[row]] = -echelon.reduced(row, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Inverse of a square matrix; DomainError when singular.
inline QMatrix inverse(const QMatrix& m) {
  if (!m.is_square()) throw ShapeError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  QMatrix augmented(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) augmented(r, c) = m(r, c);
    augmented(r, n + r) = Rational(1);
  }
  const auto echelon = rref(std::move(augmented));
  if (echelon.pivots.size() < n || echelon.pivots[n - 1] != n - 1) throw DomainError("matrix is singular");
  QMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = echelon.reduced(r, n + c);
  return out;
}

/// Incrementally maintained echelon basis of a subspace of Q^n. Used for
/// independence tests and span membership without re-eliminating.
class SpanBasis {
 public:
  explicit SpanBasis(std::size_t ambient_dim) : dim_(ambient_dim) {}

  [[nodiscard]] std::size_t ambient_dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }

  /// v minus its projection along the stored pivots; zero iff v is in the span.
  [[nodiscard]] QVector residual(QVector v) const {
    if (v.dim() != dim_) throw ShapeError("span membership: dimension mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational factor = v[pivots_[i]];
      if (factor.is_zero()) continue;
      for (std::size_t c = 0; c < dim_; ++c) {
        if (!rows_[i][c].is_zero()) v[c] -= factor * rows_[i][c];
      }
    }
    return v;
  }

  [[nodiscard]] bool contains(const QVector& v) const { return residual(v).is_zero(); }

  /// Adds v if independent of the current span; returns whether it was added.
  bool insert(const QVector& v) {
    QVector rest = residual(v);
    std::size_t pivot = 0;
    while (pivot < dim_ && rest[pivot].is_zero()) ++pivot;
    if (pivot == dim_) return false;
    const Rational inv = Rational(1) / rest[pivot];
    rest *= inv;
    rows_.push_back(std::move(rest));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<QVector> rows_;
  std::vector<std::size_t> pivots_;
};

/// Rank of a list of vectors (as the rows of a matrix).
inline std::size_t rank_of(std::span<const QVector> vectors, std::size_t ambient_dim) {
  return rank(QMatrix::from_rows(ambient_dim, vectors));
}

/// Whether two lists of vectors span the same subspace.
inline bool same_span(std::span<const QVector> a, std::span<const QVector> b, std::size_t ambient_dim) {
  std::vector<QVector> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  const auto joint = rank_of(both, ambient_dim);
  return joint == rank_of(a, ambient_dim) && joint == rank_of(b, ambient_dim);
}

}  // namespace iwo
