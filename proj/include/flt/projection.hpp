#pragma once

#include <Eigen/Dense>
#include <vector>

#include "flt/fpca.hpp"
#include "flt/sample.hpp"

namespace flt {

// Orthonormal basis of the span of the first k_eff = min(k, rank) score
// columns: the random projection behind the Fisher-type statistic.
struct ProjectionContext {
  int k_requested = 0;
  int k_effective = 0;      // columns kept after the tolerance rule
  Eigen::MatrixXd basis_q;  // n x k_effective, orthonormal
};

struct PhiValue {
  double value = 0.0;
  bool degenerate = false;  // residual numerically zero, value is +inf
};

struct ParametricTestResult {
  int k_requested = 0;
  int k_effective = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool degenerate = false;
};

// In-order modified Gram-Schmidt over the first khat score columns, dropping
// columns whose residual falls below 1e-10 of their original norm. kept_flags
// (optional) records per processed column whether it survived, which gives
// the basis of every smaller prefix for free.
Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& cols,
                                       std::vector<char>* kept_flags = nullptr,
                                       const Eigen::MatrixXd* against = nullptr);

// Requires 1 <= k <= n/2 (the standing assumption of the parametric test).
ProjectionContext build_projection(const FpcaResult& fpca, int k, int n);

// phi = ||Q^T y||^2 / ((||y||^2 - ||Q^T y||^2) / (n - k_eff)).
// y == 0 gives 0; an exact fit is flagged degenerate with value +inf.
PhiValue phi_statistic(const ProjectionContext& ctx, const Eigen::VectorXd& y);

ParametricTestResult parametric_test(const FunctionalSample& sample,
                                     const FpcaResult& fpca, int k,
                                     double alpha);

// n * ||A_k D_n||^2 where D_n = (1/n) sum_i Y_i <X_i, .> and
// A_k = sum_{j<=k_eff} lambda_j^{-1/2} <V_j, .> V_j. Computed from the
// eigenfunctions and quadrature only, so it is an independent route to the
// numerator ||P_k Y||^2 and stays a permanent regression check against it.
double akdelta_norm(const FpcaResult& fpca, const FunctionalSample& sample,
                    int k);

}  // namespace flt
