#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iwo/errors.hpp"
#include "iwo/rational.hpp"

namespace iwo {

/// Dense column vector over a field-like scalar (Rational or double).
template <class T>
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : entries_(dim, T(0)) {}
  Vector(std::initializer_list<T> values) : entries_(values) {}
  explicit Vector(std::vector<T> values) : entries_(std::move(values)) {}

  static Vector basis(std::size_t dim, std::size_t index) {
    Vector v(dim);
    v[index] = T(1);
    return v;
  }

  [[nodiscard]] std::size_t dim() const { return entries_.size(); }
  T& operator[](std::size_t i) { return entries_[i]; }
  const T& operator[](std::size_t i) const { return entries_[i]; }
  [[nodiscard]] std::span<const T> entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const T& x) { return x == T(0); });
  }

  Vector& operator+=(const Vector& rhs) {
    require_same_dim(rhs);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] += rhs[i];
    return *this;
  }
  Vector& operator-=(const Vector& rhs) {
    require_same_dim(rhs);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= rhs[i];
    return *this;
  }
  Vector& operator*=(const T& s) {
    for (auto& x : entries_) x *= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(const T& s, Vector v) { return v *= s; }
  friend Vector operator-(Vector v) { return v *= T(-1); }
  friend bool operator==(const Vector& a, const Vector& b) { return a.entries_ == b.entries_; }

 private:
  void require_same_dim(const Vector& rhs) const {
    if (rhs.dim() != dim()) {
      throw ShapeError("vector dimension mismatch: " + std::to_string(dim()) + " vs " + std::to_string(rhs.dim()));
    }
  }

  std::vector<T> entries_;
};

/// Dense row-major matrix. Indices are 0-based here; the Lie-algebra layer
/// converts from the 1-based block notation at its boundary.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ShapeError("ragged matrix literal");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  /// Matrix whose columns are the given vectors (all of dimension `rows`).
  static Matrix from_columns(std::size_t rows, std::span<const Vector<T>> columns) {
    Matrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].dim() != rows) throw ShapeError("column dimension mismatch");
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
  }

  static Matrix from_rows(std::size_t cols, std::span<const Vector<T>> rows) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].dim() != cols) throw ShapeError("row dimension mismatch");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  [[nodiscard]] std::span<const T> entries() const { return entries_; }

  [[nodiscard]] Vector<T> column(std::size_t c) const {
    Vector<T> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  /// Row-major flattening, used to treat matrices as points of R^{n*n}.
  [[nodiscard]] Vector<T> flatten() const { return Vector<T>(entries_); }

  [[nodiscard]] Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const T& x) { return x == T(0); });
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

  Matrix& operator+=(const Matrix& rhs) {
    require_same_shape(rhs);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& rhs) {
    require_same_shape(rhs);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : entries_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const T& s, Matrix m) { return m *= s; }
  friend Matrix operator-(Matrix m) { return m *= T(-1); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw ShapeError("matrix product shape mismatch: " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) +
                       " * " + std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
    }
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    }
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t r = 0; r < m.rows_; ++r) {
      os << (r ? "; " : "");
      for (std::size_t c = 0; c < m.cols_; ++c) os << (c ? " " : "") << m(r, c);
    }
    return os << ']';
  }

 private:
  void require_same_shape(const Matrix& rhs) const {
    if (rhs.rows_ != rows_ || rhs.cols_ != cols_) throw ShapeError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> entries_;
};

template <class T>
std::ostream& operator<<(std::ostream& os, const Vector<T>& v) {
  os << '(';
  for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? "," : "") << v[i];
  return os << ')';
}

/// Exact or floating product M v; rejects M.cols != v.dim with ShapeError.
template <class T>
Vector<T> matvec(const Matrix<T>& m, const Vector<T>& v) {
  if (m.cols() != v.dim()) {
    throw ShapeError("matvec shape mismatch: matrix has " + std::to_string(m.cols()) + " columns, vector has dimension " +
                     std::to_string(v.dim()));
  }
  Vector<T> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    T acc(0);
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

template <class T>
Matrix<T> commutator(const Matrix<T>& a, const Matrix<T>& b) {
  return a * b - b * a;
}

using QVector = Vector<Rational>;
using QMatrix = Matrix<Rational>;
using RVector = Vector<double>;
using RMatrix = Matrix<double>;

inline RMatrix to_double(const QMatrix& m) {
  RMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).to_double();
  return out;
}

inline RVector to_double(const QVector& v) {
  RVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = v[i].to_double();
  return out;
}

}  // namespace iwo
