#include "demandsig/lemke.hpp"

namespace demandsig {

namespace {

template <Scalar T>
bool nearly_equal(const T& a, const T& b) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-11 * (1.0 + std::max(std::abs(a), std::abs(b)));
  }
}

}  // namespace

template <Scalar T>
LcpResult<T> solve_lcp(const DenseMatrix<T>& m, const std::vector<T>& q, const LcpOptions& options) {
  const int n = m.rows();
  LcpResult<T> result;
  result.z.assign(n, T(0));

  // Columns: w (0..n-1), z (n..2n-1), z0 (2n). Row i reads I w - M z - z0 = q.
  const int z0 = 2 * n;
  const int width = 2 * n + 1;
  DenseMatrix<T> tab(n, width);
  std::vector<T> rhs = q;
  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i) {
    tab(i, i) = T(1);
    for (int j = 0; j < n; ++j) tab(i, n + j) = -m(i, j);
    tab(i, z0) = T(-1);
    basis[i] = i;
  }

  auto finish = [&]() {
    for (int i = 0; i < n; ++i) {
      if (basis[i] >= n && basis[i] < 2 * n) result.z[basis[i] - n] = rhs[i];
    }
    result.w = q;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) result.w[i] += m(i, j) * result.z[j];
    result.solved = true;
    return result;
  };

  int r = -1;
  for (int i = 0; i < n; ++i) {
    if (rhs[i] < T(0) && (r < 0 || rhs[i] <= rhs[r])) r = i;
  }
  if (r < 0) return finish();

  auto pivot = [&](int row, int col) {
    const T p = tab(row, col);
    std::vector<int> nz;
    for (int j = 0; j < width; ++j) {
      if (tab(row, j) != T(0)) {
        tab(row, j) /= p;
        nz.push_back(j);
      }
    }
    rhs[row] /= p;
    for (int i = 0; i < n; ++i) {
      if (i == row) continue;
      const T f = tab(i, col);
      if (f == T(0)) continue;
      for (int j : nz) tab(i, j) -= f * tab(row, j);
      tab(i, col) = T(0);
      rhs[i] -= f * rhs[row];
    }
    tab(row, col) = T(1);
    const int leaving = basis[row];
    basis[row] = col;
    ++result.pivots;
    return leaving;
  };

  const int max_pivots = options.max_pivots > 0 ? options.max_pivots : 50 * n + 1000;
  const T piv_tol = tolerance<T>(options.pivot_tol);
  int leaving = pivot(r, z0);
  while (true) {
    if (leaving == z0) return finish();
    if (result.pivots >= max_pivots) {
      result.failure = "pivot limit reached";
      return result;
    }
    const int entering = leaving < n ? leaving + n : leaving - n;
    int best = -1;
    T best_ratio{0};
    for (int i = 0; i < n; ++i) {
      const T& a = tab(i, entering);
      if (a <= piv_tol) continue;
      T ratio = rhs[i] / a;
      if constexpr (!is_exact_v<T>) ratio = std::max(ratio, 0.0);
      if (best < 0) {
        best = i;
        best_ratio = ratio;
        continue;
      }
      if (nearly_equal(ratio, best_ratio)) {
        if (basis[best] == z0) continue;
        if (basis[i] == z0) {
          best = i;
          best_ratio = ratio;
          continue;
        }
        // Lexicographic comparison on rows of the basis inverse.
        for (int k = 0; k < n; ++k) {
          T li = tab(i, k) / a;
          T lb = tab(best, k) / tab(best, entering);
          if (nearly_equal(li, lb)) continue;
          if (li < lb) {
            best = i;
            best_ratio = ratio;
          }
          break;
        }
      } else if (ratio < best_ratio) {
        best = i;
        best_ratio = ratio;
      }
    }
    if (best < 0) {
      result.failure = "secondary ray: complementarity problem is infeasible";
      return result;
    }
    leaving = pivot(best, entering);
  }
}

template LcpResult<double> solve_lcp(const DenseMatrix<double>&, const std::vector<double>&,
                                     const LcpOptions&);
template LcpResult<Rational> solve_lcp(const DenseMatrix<Rational>&, const std::vector<Rational>&,
                                       const LcpOptions&);

}  // namespace demandsig
