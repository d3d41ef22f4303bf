#include "flt/fpca.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace flt {

namespace {

// Largest weighted-magnitude coordinate positive; ties -> smallest index.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v, const Eigen::VectorXd& w) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index l = 0; l < v.size(); ++l) {
    const double mag = w(l) * std::fabs(v(l));
    if (mag > best_mag) {
      best_mag = mag;
      best = l;
    }
  }
  if (v(best) < 0.0) v = -v;
}

int numerical_rank(const Eigen::VectorXd& lambda) {
  if (lambda.size() == 0 || lambda(0) <= 0.0) return 0;
  const double tol = lambda(0) * kRankRelTol;
  int r = 0;
  while (r < lambda.size() && lambda(r) > tol) ++r;
  return r;
}

}  // namespace

FpcaResult fpca(const FunctionalSample& sample, int max_components) {
  const int n = sample.n();
  const int p = sample.p();
  if (max_components < 1)
    throw std::invalid_argument("fpca: max_components < 1");
  if (max_components > n)
    throw std::invalid_argument("fpca: max_components exceeds the sample size");

  const Eigen::MatrixXd& x = sample.curves;
  const Eigen::VectorXd& w = sample.grid.weights;

  FpcaResult res;
  if (p > n) {
    // Gram route: M_il = <X_i,X_l>/n, eigenfunction V = X^T u / ||X^T u||.
    Eigen::MatrixXd gram = x * w.asDiagonal() * x.transpose() / n;
    gram = 0.5 * (gram + gram.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("fpca: Gram eigendecomposition did not converge");

    res.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    res.rank = numerical_rank(res.eigenvalues);
    const int keep = std::min(max_components, res.rank);
    res.eigenfunctions.resize(keep, p);
    for (int j = 0; j < keep; ++j) {
      const Eigen::VectorXd u = es.eigenvectors().col(n - 1 - j);
      Eigen::VectorXd v = x.transpose() * u;
      v /= std::sqrt(static_cast<double>(n) * res.eigenvalues(j));
      fix_sign(v, w);
      res.eigenfunctions.row(j) = v.transpose();
    }
  } else {
    // Covariance route: symmetrize (1/n) X^T X W with S = W^{1/2},
    // B = (1/n) S X^T X S, then V = S^{-1} u.
    const Eigen::VectorXd s = w.cwiseSqrt();
    Eigen::MatrixXd b =
        s.asDiagonal() * (x.transpose() * x) * s.asDiagonal() / n;
    b = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("fpca: covariance eigendecomposition did not converge");

    res.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    res.rank = numerical_rank(res.eigenvalues);
    const int keep = std::min(max_components, res.rank);
    res.eigenfunctions.resize(keep, p);
    for (int j = 0; j < keep; ++j) {
      Eigen::VectorXd v =
          es.eigenvectors().col(p - 1 - j).cwiseQuotient(s);
      fix_sign(v, w);
      res.eigenfunctions.row(j) = v.transpose();
    }
  }

  // Scores by the same quadrature as every other inner product.
  res.scores = x * w.asDiagonal() * res.eigenfunctions.transpose();
  return res;
}

}  // namespace flt
