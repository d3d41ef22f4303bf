#include "flt/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flt {

EllipsoidSpec EllipsoidSpec::polynomial(double s, double radius) {
  if (s <= 0.5) throw std::invalid_argument("EllipsoidSpec: need s > 1/2");
  if (radius < 0.0) throw std::invalid_argument("EllipsoidSpec: R < 0");
  EllipsoidSpec e;
  e.regime = Regime::polynomial;
  e.s = s;
  e.radius = radius;
  return e;
}

EllipsoidSpec EllipsoidSpec::exponential(double s, double radius) {
  if (s <= 0.0) throw std::invalid_argument("EllipsoidSpec: need s > 0");
  if (radius < 0.0) throw std::invalid_argument("EllipsoidSpec: R < 0");
  EllipsoidSpec e;
  e.regime = Regime::exponential;
  e.s = s;
  e.radius = radius;
  return e;
}

EllipsoidSpec EllipsoidSpec::tabulated(Eigen::VectorXd a,
                                       Eigen::VectorXd lambda, double radius) {
  if (a.size() == 0 || a.size() != lambda.size())
    throw std::invalid_argument("EllipsoidSpec: empty or mismatched tables");
  if (radius < 0.0) throw std::invalid_argument("EllipsoidSpec: R < 0");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(a(i) > 0.0) || !(lambda(i) > 0.0))
      throw std::invalid_argument("EllipsoidSpec: tables must be positive");
    if (i > 0 && a(i) > a(i - 1))
      throw std::invalid_argument("EllipsoidSpec: (a_k) must be nonincreasing");
    if (i > 0 && a(i) * a(i) * lambda(i) > a(i - 1) * a(i - 1) * lambda(i - 1))
      throw std::invalid_argument(
          "EllipsoidSpec: (a_k^2 lambda_k) must be nonincreasing");
  }
  EllipsoidSpec e;
  e.regime = Regime::tabulated;
  e.radius = radius;
  e.a = std::move(a);
  e.lambda = std::move(lambda);
  return e;
}

double EllipsoidSpec::weighted_eigenvalue(int k) const {
  if (k < 1) throw std::invalid_argument("weighted_eigenvalue: k < 1");
  switch (regime) {
    case Regime::polynomial:
      return std::pow(static_cast<double>(k), -s);
    case Regime::exponential:
      return std::exp(-s * k);
    case Regime::tabulated:
      if (k > a.size())
        throw std::out_of_range("weighted_eigenvalue: beyond the table");
      return a(k - 1) * a(k - 1) * lambda(k - 1);
  }
  return 0.0;
}

int EllipsoidSpec::table_size() const {
  return regime == Regime::tabulated ? static_cast<int>(a.size()) : 0;
}

namespace {

RateScan scan_rate(const EllipsoidSpec& spec, double n, double c, int k_max,
                   bool loglog_penalty) {
  if (n < 2.0) throw std::invalid_argument("separation_rate: n < 2");
  if (c < 0.0) throw std::invalid_argument("separation_rate: negative constant");
  if (k_max < 1) throw std::invalid_argument("separation_rate: k_max < 1");
  if (spec.table_size() > 0) k_max = std::min(k_max, spec.table_size());

  const double r2 = spec.radius * spec.radius;
  RateScan best;
  best.value = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  bool tail_monotone = true;
  const int tail_start = k_max - std::max(1, k_max / 10);
  for (int k = 1; k <= k_max; ++k) {
    double variance = c * std::sqrt(static_cast<double>(k)) / n;
    if (loglog_penalty) {
      const double ll = std::log(std::log(static_cast<double>(std::max(k, 3))));
      variance *= std::sqrt(std::max(1.0, ll));
    }
    const double v = std::min(variance, r2 * spec.weighted_eigenvalue(k));
    if (v > best.value) {
      best.value = v;
      best.argmax_k = k;
    }
    if (k >= tail_start) {
      if (v > prev * (1.0 + 1e-12)) tail_monotone = false;
      prev = v;
    }
  }
  // trivial suprema need no crossing
  if (best.value > 0.0 && !tail_monotone)
    throw std::runtime_error(
        "separation_rate: scan bound too small, the branches have not crossed");
  return best;
}

}  // namespace

RateScan separation_rate(const EllipsoidSpec& spec, double n, double c,
                         int k_max) {
  return scan_rate(spec, n, c, k_max, false);
}

RateScan adaptive_rate(const EllipsoidSpec& spec, double n, double c,
                       int k_max) {
  return scan_rate(spec, n, c, k_max, true);
}

int optimal_dimension(const EllipsoidSpec& spec, double n, int k_max) {
  if (n < 2.0) throw std::invalid_argument("optimal_dimension: n < 2");
  if (k_max < 1) throw std::invalid_argument("optimal_dimension: k_max < 1");
  if (spec.table_size() > 0) k_max = std::min(k_max, spec.table_size());
  const double r2 = spec.radius * spec.radius;
  for (int k = 1; k <= k_max; ++k) {
    if (r2 * spec.weighted_eigenvalue(k) <=
        std::sqrt(static_cast<double>(k)) / n)
      return k;
  }
  throw std::runtime_error("optimal_dimension: crossing not found within bound");
}

SequenceCheck check_assumption_b2(const std::function<double(int)>& lambda,
                                  double gamma, int k_max) {
  if (gamma <= 0.0) throw std::invalid_argument("check_assumption_b2: gamma <= 0");
  SequenceCheck out;
  double prev = 0.0;
  for (int j = 1; j <= k_max; ++j) {
    const double lam = lambda(j);
    if (!(lam > 0.0))
      throw std::invalid_argument("check_assumption_b2: lambda must be positive");
    const double logpart =
        std::max(std::pow(std::log(static_cast<double>(j)), 1.0 + gamma), 1.0);
    const double v = j * lam * logpart;
    if (j > 1 && v >= prev) {
      out.holds = false;
      out.first_violation = j;
      return out;
    }
    prev = v;
  }
  return out;
}

RateReport rate_report(const EllipsoidSpec& spec, double n, double c,
                       int k_max) {
  if (k_max <= 0) k_max = default_rate_scan_bound(n);
  RateReport rep;
  const RateScan plain = separation_rate(spec, n, c, k_max);
  const RateScan penalized = adaptive_rate(spec, n, c, k_max);
  rep.rho_sq = plain.value;
  rep.rho_argmax = plain.argmax_k;
  rep.rho_tilde_sq = penalized.value;
  rep.rho_tilde_argmax = penalized.argmax_k;
  rep.k_star = optimal_dimension(spec, n, k_max);
  rep.constant_c = c;
  rep.regime = spec.regime;
  rep.outside_guarantee = spec.outside_paper_guarantee();
  return rep;
}

}  // namespace flt
