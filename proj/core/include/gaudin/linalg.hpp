#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <utility>
#include <vector>

#include "gaudin/scalar.hpp"

namespace gaudin {

/// Dense row-major matrix over an arbitrary field.
template <class T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  Matrix operator+(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
  }
  Matrix operator-(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
  }
  Matrix operator*(const Matrix& o) const {
    assert(cols_ == o.rows_);
    Matrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& v = (*this)(i, k);
        if (v == T(0)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += v * o(k, j);
      }
    }
    return m;
  }
  Matrix operator*(const T& s) const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
    return m;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    assert(v.size() == cols_);
    std::vector<T> out(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool is_zero() const {
    for (const auto& v : a_)
      if (!(v == T(0))) return false;
    return true;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> a_;
};

/// Sparse row-major matrix; rows hold (col, value) entries sorted by column.
template <class T>
class SparseMat {
 public:
  SparseMat() : rows_(0), cols_(0) {}
  SparseMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_(rows) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::pair<std::size_t, T>>& row(std::size_t r) const { return row_[r]; }

  void add_entry(std::size_t r, std::size_t c, const T& v) {
    if (v == T(0)) return;
    auto& R = row_[r];
    for (auto& e : R) {
      if (e.first == c) {
        e.second += v;
        if (e.second == T(0)) {
          e = R.back();
          R.pop_back();
          sort_row(R);
        }
        return;
      }
    }
    R.emplace_back(c, v);
    sort_row(R);
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    assert(v.size() == cols_);
    std::vector<T> out(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, val] : row_[r]) out[r] += val * v[c];
    return out;
  }

  SparseMat operator*(const SparseMat& o) const {
    assert(cols_ == o.rows_);
    SparseMat m(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::vector<std::pair<std::size_t, T>> acc;
      for (const auto& [k, v] : row_[r]) {
        for (const auto& [c, w] : o.row_[k]) {
          bool found = false;
          for (auto& e : acc) {
            if (e.first == c) {
              e.second += v * w;
              found = true;
              break;
            }
          }
          if (!found) acc.emplace_back(c, v * w);
        }
      }
      for (auto& e : acc)
        if (!(e.second == T(0))) m.row_[r].push_back(e);
      sort_row(m.row_[r]);
    }
    return m;
  }

  SparseMat operator+(const SparseMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    SparseMat m = *this;
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : o.row_[r]) m.add_entry(r, c, v);
    return m;
  }

  SparseMat operator-(const SparseMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    SparseMat m = *this;
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : o.row_[r]) m.add_entry(r, c, T(0) - v);
    return m;
  }

  SparseMat scaled(const T& s) const {
    SparseMat m(rows_, cols_);
    if (s == T(0)) return m;
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : row_[r]) m.row_[r].emplace_back(c, v * s);
    return m;
  }

  template <class U>
  SparseMat<U> cast() const {
    SparseMat<U> m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : row_[r]) m.add_entry(r, c, FieldTraits<U>::from_rat(v));
    return m;
  }

  Matrix<T> to_dense() const {
    Matrix<T> m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : row_[r]) m(r, c) = v;
    return m;
  }

  bool is_zero() const {
    for (const auto& R : row_)
      if (!R.empty()) return false;
    return true;
  }

 private:
  static void sort_row(std::vector<std::pair<std::size_t, T>>& R) {
    std::sort(R.begin(), R.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  std::size_t rows_, cols_;
  std::vector<std::vector<std::pair<std::size_t, T>>> row_;
};

template <class T>
SparseMat<T> commutator(const SparseMat<T>& a, const SparseMat<T>& b) {
  return a * b - b * a;
}

/// In-place reduced row echelon form over an exact field.
/// Returns the pivot column indices.
template <class T>
std::vector<std::size_t> rref(Matrix<T>& m) {
  static_assert(FieldTraits<T>::is_exact, "rref requires an exact field");
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m(sel, c) == T(0)) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(r, j));
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == T(0)) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Basis of the right nullspace; columns of the returned matrix.
template <class T>
Matrix<T> nullspace(Matrix<T> m) {
  const std::size_t n = m.cols();
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix<T> basis(n, free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t fc = free_cols[k];
    basis(fc, k) = T(1);
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
      basis(pivots[pi], k) = T(0) - m(pi, fc);
  }
  return basis;
}

/// Solves A X = B for square nonsingular A over an exact field.
template <class T>
Matrix<T> solve_exact(Matrix<T> a, Matrix<T> b) {
  static_assert(FieldTraits<T>::is_exact, "solve_exact requires an exact field");
  assert(a.rows() == a.cols() && a.rows() == b.rows());
  const std::size_t n = a.rows(), m = b.cols();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = c;
    while (sel < n && a(sel, c) == T(0)) ++sel;
    if (sel == n) throw Error("solve_exact: singular matrix");
    if (sel != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(sel, j), a(c, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(sel, j), b(c, j));
    }
    const T inv = T(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) a(c, j) = a(c, j) * inv;
    for (std::size_t j = 0; j < m; ++j) b(c, j) = b(c, j) * inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == T(0)) continue;
      const T f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) a(i, j) = a(i, j) - f * a(c, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) = b(i, j) - f * b(c, j);
    }
  }
  return b;
}

}  // namespace gaudin
