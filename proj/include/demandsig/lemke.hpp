#pragma once

#include "demandsig/linalg.hpp"

#include <string>
#include <vector>

namespace demandsig {

struct LcpOptions {
  double pivot_tol = 1e-11;
  int max_pivots = 0;  // 0 selects 50 * n + 1000
};

template <Scalar T>
struct LcpResult {
  bool solved = false;
  std::vector<T> z;
  std::vector<T> w;
  int pivots = 0;
  std::string failure;
};

/// Finds z >= 0 with w = q + M z >= 0 and w'z = 0 by Lemke's method with a
/// lexicographic ratio test. Terminates for copositive-plus M.
template <Scalar T>
LcpResult<T> solve_lcp(const DenseMatrix<T>& m, const std::vector<T>& q,
                       const LcpOptions& options = {});

}  // namespace demandsig
