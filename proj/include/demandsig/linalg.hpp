#pragma once

#include "demandsig/scalar.hpp"

#include <optional>
#include <vector>

namespace demandsig {

template <Scalar T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, T(0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Gaussian elimination with partial pivoting; nullopt when singular.
template <Scalar T>
std::optional<std::vector<T>> solve_linear_system(DenseMatrix<T> a, std::vector<T> b) {
  const int n = a.rows();
  T scale{0};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) scale = std::max(scale, abs_of(a(r, c)));
  const T singular = tolerance<T>(1e-12) * (scale == T(0) ? T(1) : scale);

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    T best{0};
    for (int r = col; r < n; ++r) {
      T v = abs_of(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
        if constexpr (is_exact_v<T>) break;
      }
    }
    if (pivot < 0 || best <= singular) return std::nullopt;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      if (a(r, col) == T(0)) continue;
      T f = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<T> x(n);
  for (int r = n - 1; r >= 0; --r) {
    T acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

}  // namespace demandsig
