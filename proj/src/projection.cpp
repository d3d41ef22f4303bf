#include "flt/projection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flt/special.hpp"

namespace flt {

namespace {
constexpr double kDropRelTol = 1e-10;
constexpr double kResidualRelTol = 1e-14;
}  // namespace

Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& cols,
                                       std::vector<char>* kept_flags,
                                       const Eigen::MatrixXd* against) {
  const Eigen::Index n = cols.rows();
  Eigen::MatrixXd q(n, cols.cols());
  Eigen::Index kept = 0;
  if (kept_flags) kept_flags->assign(cols.cols(), 0);
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Eigen::VectorXd v = cols.col(j);
    const double norm0 = v.norm();
    // two MGS passes keep orthogonality well below the drop tolerance
    for (int pass = 0; pass < 2; ++pass) {
      if (against && against->cols() > 0)
        v -= *against * (against->transpose() * v);
      if (kept > 0)
        v -= q.leftCols(kept) * (q.leftCols(kept).transpose() * v);
    }
    const double norm1 = v.norm();
    if (norm0 <= 0.0 || norm1 <= kDropRelTol * norm0) continue;
    q.col(kept++) = v / norm1;
    if (kept_flags) (*kept_flags)[j] = 1;
  }
  return q.leftCols(kept);
}

ProjectionContext build_projection(const FpcaResult& fpca, int k, int n) {
  if (k < 1) throw std::invalid_argument("build_projection: k < 1");
  if (2 * k > n)
    throw std::invalid_argument("build_projection: k exceeds n/2");
  const int khat = std::min(k, fpca.rank);
  if (khat > fpca.components())
    throw std::logic_error(
        "build_projection: FPCA was truncated below the requested dimension");

  ProjectionContext ctx;
  ctx.k_requested = k;
  ctx.basis_q = orthonormalize_columns(fpca.scores.leftCols(khat));
  ctx.k_effective = static_cast<int>(ctx.basis_q.cols());
  return ctx;
}

PhiValue phi_statistic(const ProjectionContext& ctx, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  if (ctx.basis_q.cols() > 0 && ctx.basis_q.rows() != n)
    throw std::invalid_argument("phi_statistic: response length mismatch");
  if (n - ctx.k_effective < 1)
    throw std::invalid_argument("phi_statistic: no residual degrees of freedom");

  PhiValue out;
  if (ctx.k_effective == 0) return out;
  const double total = y.squaredNorm();
  if (total == 0.0) return out;
  const double num = (ctx.basis_q.transpose() * y).squaredNorm();
  const double resid = std::max(total - num, 0.0);
  if (resid <= kResidualRelTol * total) {
    out.value = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  out.value = num / (resid / (n - ctx.k_effective));
  return out;
}

ParametricTestResult parametric_test(const FunctionalSample& sample,
                                     const FpcaResult& fpca, int k,
                                     double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("parametric_test: alpha outside (0,1)");
  const int n = sample.n();
  const ProjectionContext ctx = build_projection(fpca, k, n);
  const PhiValue phi = phi_statistic(ctx, sample.responses);

  ParametricTestResult res;
  res.k_requested = k;
  res.k_effective = ctx.k_effective;
  res.degenerate = phi.degenerate;
  if (ctx.k_effective == 0) {
    res.statistic = 0.0;
    res.threshold = std::numeric_limits<double>::infinity();
    res.p_value = 1.0;
    res.reject = false;
    return res;
  }
  res.statistic = phi.value;
  res.threshold =
      ctx.k_effective *
      fisher_upper_quantile(alpha, ctx.k_effective, n - ctx.k_effective);
  if (phi.degenerate) {
    res.p_value = 0.0;
    res.reject = true;
    return res;
  }
  res.p_value = fisher_upper_tail(phi.value / ctx.k_effective,
                                  ctx.k_effective, n - ctx.k_effective);
  res.reject = res.statistic - res.threshold > 0.0;
  return res;
}

double akdelta_norm(const FpcaResult& fpca, const FunctionalSample& sample,
                    int k) {
  if (k < 1) throw std::invalid_argument("akdelta_norm: k < 1");
  const int khat = std::min(k, fpca.rank);
  if (khat > fpca.components())
    throw std::logic_error(
        "akdelta_norm: FPCA was truncated below the requested dimension");
  const int n = sample.n();
  // Delta(t) = (1/n) sum_i Y_i X_i(t)
  const Eigen::VectorXd delta =
      sample.curves.transpose() * sample.responses / n;
  const Eigen::VectorXd weighted = sample.grid.weights.asDiagonal() * delta;
  double out = 0.0;
  for (int j = 0; j < khat; ++j) {
    const double coef = fpca.eigenfunctions.row(j) * weighted;
    out += coef * coef / fpca.eigenvalues(j);
  }
  return n * out;
}

}  // namespace flt
