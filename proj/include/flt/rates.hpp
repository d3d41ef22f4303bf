#pragma once

#include <Eigen/Dense>
#include <functional>

namespace flt {

// Smoothness class for the slope: the rate formulas only see the products
// c_k = a_k^2 * lambda_k, given parametrically or as explicit tables.
struct EllipsoidSpec {
  enum class Regime { polynomial, exponential, tabulated };

  Regime regime = Regime::polynomial;
  double s = 0.0;       // decay parameter of the parametric regimes
  double radius = 0.0;  // R
  Eigen::VectorXd a;        // tabulated only
  Eigen::VectorXd lambda;   // tabulated only

  static EllipsoidSpec polynomial(double s, double radius);
  static EllipsoidSpec exponential(double s, double radius);
  static EllipsoidSpec tabulated(Eigen::VectorXd a, Eigen::VectorXd lambda,
                                 double radius);

  double weighted_eigenvalue(int k) const;  // a_k^2 * lambda_k, k >= 1
  int table_size() const;                   // 0 for parametric regimes

  // The paper's polynomial-regime guarantee needs s > 7/2; smaller s is
  // still computable but flagged.
  bool outside_paper_guarantee() const {
    return regime == Regime::polynomial && s <= 3.5;
  }
};

struct RateScan {
  double value = 0.0;
  int argmax_k = 1;
};

inline int default_rate_scan_bound(double n) {
  return static_cast<int>(std::max(1e4, 10.0 * n));
}

// sup over 1 <= k <= k_max of min(c * sqrt(k)/n, R^2 a_k^2 lambda_k) by
// direct scan. Errors if the scan ends before the two branches have crossed
// (the min-branch must be on its decreasing side over the last 10% of the
// range).
RateScan separation_rate(const EllipsoidSpec& spec, double n, double c,
                         int k_max);

// Smallest k with R^2 a_k^2 lambda_k <= sqrt(k)/n.
int optimal_dimension(const EllipsoidSpec& spec, double n, int k_max);

// Same scan with sqrt(k) replaced by sqrt(max(1, loglog(k v 3))) * sqrt(k):
// the adaptation-penalized rate. The floor at 1 keeps the penalized rate
// above the plain one for every k, not just asymptotically.
RateScan adaptive_rate(const EllipsoidSpec& spec, double n, double c,
                       int k_max);

struct SequenceCheck {
  bool holds = true;
  int first_violation = 0;  // 0 when the property holds
};

// Diagnostic: is (j * lambda_j * (log^{1+gamma} j v 1)) strictly decreasing
// up to k_max? lambda is 1-based.
SequenceCheck check_assumption_b2(const std::function<double(int)>& lambda,
                                  double gamma, int k_max);

struct RateReport {
  double rho_sq = 0.0;
  int rho_argmax = 1;
  int k_star = 1;
  double rho_tilde_sq = 0.0;
  int rho_tilde_argmax = 1;
  double constant_c = 1.0;
  EllipsoidSpec::Regime regime = EllipsoidSpec::Regime::polynomial;
  bool outside_guarantee = false;
};

RateReport rate_report(const EllipsoidSpec& spec, double n, double c,
                       int k_max = 0);

}  // namespace flt
