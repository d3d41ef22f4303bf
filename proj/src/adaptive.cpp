#include "flt/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flt/special.hpp"

namespace flt {

DimensionCollection dimension_collection(int n, int kbar_override) {
  if (n < 4) throw std::invalid_argument("dimension_collection: n < 4");
  int kbar;
  if (kbar_override > 0) {
    if ((kbar_override & (kbar_override - 1)) != 0 || 2 * kbar_override > n)
      throw std::invalid_argument(
          "dimension_collection: override must be a power of two <= n/2");
    kbar = kbar_override;
  } else {
    int log2n = 0;
    while ((1 << (log2n + 1)) <= n) ++log2n;
    kbar = 1 << (log2n - 1);
  }
  DimensionCollection out;
  out.kbar = kbar;
  for (int k = 1; k <= kbar; k *= 2) out.dims.push_back(k);
  return out;
}

CalibrationWeight bonferroni_weight(double alpha,
                                    const DimensionCollection& collection) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("bonferroni_weight: alpha outside (0,1)");
  CalibrationWeight w;
  w.method = CalibrationMethod::P1;
  w.alpha = alpha;
  w.weight = alpha / static_cast<double>(collection.dims.size());
  return w;
}

void ProjectionFamily::build_dims(const FpcaResult& fpca,
                                  const DimensionCollection& collection) {
  std::vector<char> kept;
  const int khat_max = std::min(collection.kbar, fpca.rank);
  if (khat_max > fpca.components())
    throw std::logic_error(
        "ProjectionFamily: FPCA was truncated below the collection maximum");
  if (2 * collection.kbar > n_)
    throw std::invalid_argument("ProjectionFamily: kbar exceeds n/2");

  q_ = orthonormalize_columns(fpca.scores.leftCols(khat_max), &kept,
                              qv_.cols() > 0 ? &qv_ : nullptr);
  // width of each prefix of score columns
  std::vector<int> prefix_width(khat_max + 1, 0);
  for (int j = 0; j < khat_max; ++j)
    prefix_width[j + 1] = prefix_width[j] + (kept[j] ? 1 : 0);

  const int rv = static_cast<int>(qv_.cols());
  for (int k : collection.dims) {
    if (k > fpca.rank) continue;  // skipped, not clamped
    const int width = prefix_width[std::min(k, khat_max)];
    dims_.push_back(k);
    width_.push_back(width);
    dof_num_.push_back(width);
    dof_den_.push_back(n_ - (rv + width));
    if (n_ - (rv + width) < 1)
      throw std::invalid_argument(
          "ProjectionFamily: no residual degrees of freedom");
  }
}

ProjectionFamily::ProjectionFamily(const FpcaResult& fpca,
                                   const DimensionCollection& collection,
                                   int n)
    : n_(n), qv_(n, 0) {
  build_dims(fpca, collection);
}

ProjectionFamily::ProjectionFamily(const FpcaResult& fpca,
                                   const DimensionCollection& collection,
                                   const FunctionalSample& sample,
                                   const Eigen::MatrixXd& subspace_basis)
    : n_(sample.n()) {
  const int pv = static_cast<int>(subspace_basis.rows());
  if (pv == 0) {
    qv_.resize(n_, 0);
    build_dims(fpca, collection);
    return;
  }
  if (subspace_basis.cols() != sample.p())
    throw std::invalid_argument("subspace basis does not match the grid");
  if (2 * pv >= n_)
    throw std::invalid_argument("subspace dimension must be below n/2");

  // linear independence of the basis functions themselves, under quadrature
  const Eigen::MatrixXd weighted =
      subspace_basis * sample.grid.weights.asDiagonal();
  const Eigen::MatrixXd gram = weighted * subspace_basis.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.eigenvalues()(0) <=
      kRankRelTol * std::max(es.eigenvalues()(pv - 1), 0.0))
    throw std::invalid_argument("subspace basis is rank-deficient on the grid");

  // score columns <X_i, xi_j>
  const Eigen::MatrixXd vcols = sample.curves * weighted.transpose();
  qv_ = orthonormalize_columns(vcols);
  build_dims(fpca, collection);
}

std::vector<PhiValue> ProjectionFamily::phi_all(const Eigen::VectorXd& y) const {
  if (y.size() != n_)
    throw std::invalid_argument("ProjectionFamily: response length mismatch");
  const double total = y.squaredNorm();
  const double sub = qv_.cols() > 0 ? (qv_.transpose() * y).squaredNorm() : 0.0;
  const Eigen::VectorXd c = q_.transpose() * y;

  std::vector<PhiValue> out(dims_.size());
  double prefix = 0.0;
  int col = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    for (; col < width_[j]; ++col) prefix += c(col) * c(col);
    PhiValue& phi = out[j];
    if (dof_num_[j] == 0 || total == 0.0) continue;
    const double resid = std::max(total - sub - prefix, 0.0);
    if (resid <= 1e-14 * total) {
      phi.value = std::numeric_limits<double>::infinity();
      phi.degenerate = true;
      continue;
    }
    phi.value = prefix / (resid / dof_den_[j]);
  }
  return out;
}

double ProjectionFamily::min_p_value(const Eigen::VectorXd& y) const {
  double out;
  min_p_block(y, &out);
  return out;
}

void ProjectionFamily::min_p_block(const Eigen::MatrixXd& ys, double* out) const {
  if (ys.rows() != n_)
    throw std::invalid_argument("ProjectionFamily: response length mismatch");
  const Eigen::MatrixXd c = q_.transpose() * ys;
  const Eigen::RowVectorXd totals = ys.colwise().squaredNorm();
  Eigen::RowVectorXd subs = Eigen::RowVectorXd::Zero(ys.cols());
  if (qv_.cols() > 0) subs = (qv_.transpose() * ys).colwise().squaredNorm();

  for (Eigen::Index r = 0; r < ys.cols(); ++r) {
    double minp = 1.0;
    double prefix = 0.0;
    int col = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      for (; col < width_[j]; ++col) prefix += c(col, r) * c(col, r);
      if (dof_num_[j] == 0 || totals(r) == 0.0) continue;
      const double resid = std::max(totals(r) - subs(r) - prefix, 0.0);
      double p = 0.0;  // exact fit: smallest possible p-value
      if (resid > 1e-14 * totals(r)) {
        const double phi = prefix / (resid / dof_den_[j]);
        p = fisher_upper_tail(phi / dof_num_[j], dof_num_[j], dof_den_[j]);
      }
      minp = std::min(minp, p);
    }
    out[r] = minp;
  }
}

namespace {

CalibrationWeight mc_weight_impl(const ProjectionFamily& family, double alpha,
                                 int replicates, RngStream stream,
                                 bool parallel) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("monte_carlo_weight: alpha outside (0,1)");
  if (replicates < 100)
    throw std::invalid_argument("monte_carlo_weight: need at least 100 replicates");

  // fixed-size blocks keep the work in matrix products; block boundaries do
  // not depend on the thread count, so the result never does either
  constexpr int kBlock = 128;
  std::vector<double> minp(replicates);
  const int blocks = (replicates + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (parallel)
  for (int blk = 0; blk < blocks; ++blk) {
    const int begin = blk * kBlock;
    const int end = std::min(begin + kBlock, replicates);
    Eigen::MatrixXd z(family.n(), end - begin);
    for (int b = begin; b < end; ++b) {
      RngEngine eng(stream.child(b));
      for (int i = 0; i < family.n(); ++i) z(i, b - begin) = eng.normal();
    }
    family.min_p_block(z, &minp[begin]);
  }

  const int idx =
      std::max(1, static_cast<int>(std::floor(alpha * replicates))) - 1;
  std::nth_element(minp.begin(), minp.begin() + idx, minp.end());

  CalibrationWeight w;
  w.method = CalibrationMethod::P2;
  w.alpha = alpha;
  w.weight = minp[idx];
  w.mc_replicates = replicates;
  w.mc_stream = stream;
  return w;
}

}  // namespace

CalibrationWeight monte_carlo_weight(const ProjectionFamily& family,
                                     double alpha, int replicates,
                                     RngStream stream) {
  return mc_weight_impl(family, alpha, replicates, stream, true);
}

CalibrationWeight monte_carlo_weight_serial(const ProjectionFamily& family,
                                            double alpha, int replicates,
                                            RngStream stream) {
  return mc_weight_impl(family, alpha, replicates, stream, false);
}

AdaptiveTestResult evaluate_adaptive(const ProjectionFamily& family,
                                     const Eigen::VectorXd& responses,
                                     const CalibrationWeight& weight) {
  AdaptiveTestResult res;
  res.weight = weight;
  res.supremum_margin = -std::numeric_limits<double>::infinity();

  // weight 0 or 1 can arise from a degenerate Monte-Carlo calibration; the
  // Fisher quantile needs an argument strictly inside (0,1)
  const double w = std::min(std::max(weight.weight, 1e-12), 1.0 - 1e-12);
  const std::vector<PhiValue> phis = family.phi_all(responses);
  for (std::size_t j = 0; j < family.dims().size(); ++j) {
    DimensionDecision d;
    d.k = family.dims()[j];
    d.k_effective = family.dof_num()[j];
    if (d.k_effective == 0) continue;
    const int m = family.dof_den()[j];
    d.statistic = phis[j].value;
    d.degenerate = phis[j].degenerate;
    d.threshold =
        d.k_effective * fisher_upper_quantile(w, d.k_effective, m);
    if (d.degenerate) {
      d.margin = std::numeric_limits<double>::infinity();
      d.p_value = 0.0;
    } else {
      d.margin = d.statistic - d.threshold;
      d.p_value = fisher_upper_tail(d.statistic / d.k_effective,
                                    d.k_effective, m);
    }
    if (d.margin > res.supremum_margin) {
      res.supremum_margin = d.margin;
      res.selected_k = d.k;
    }
    res.per_k.push_back(d);
  }
  res.reject = res.supremum_margin > 0.0;
  return res;
}

AdaptiveTestResult adaptive_test(const FunctionalSample& sample,
                                 const FpcaResult& fpca, double alpha,
                                 CalibrationMethod method, int mc_replicates,
                                 RngStream stream, int kbar_override) {
  const DimensionCollection collection =
      dimension_collection(sample.n(), kbar_override);
  const ProjectionFamily family(fpca, collection, sample.n());
  const CalibrationWeight weight =
      method == CalibrationMethod::P1
          ? bonferroni_weight(alpha, collection)
          : monte_carlo_weight(family, alpha, mc_replicates, stream);
  return evaluate_adaptive(family, sample.responses, weight);
}

AdaptiveTestResult subspace_test(const FunctionalSample& sample,
                                 const FpcaResult& fpca,
                                 const Eigen::MatrixXd& subspace_basis,
                                 double alpha, CalibrationMethod method,
                                 int mc_replicates, RngStream stream,
                                 int kbar_override) {
  const DimensionCollection collection =
      dimension_collection(sample.n(), kbar_override);
  const ProjectionFamily family(fpca, collection, sample, subspace_basis);
  const CalibrationWeight weight =
      method == CalibrationMethod::P1
          ? bonferroni_weight(alpha, collection)
          : monte_carlo_weight(family, alpha, mc_replicates, stream);
  return evaluate_adaptive(family, sample.responses, weight);
}

}  // namespace flt
