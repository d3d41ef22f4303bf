#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "flt/rng.hpp"
#include "flt/special.hpp"

using namespace flt;

// Independent oracle: chi-square upper quantile by bisection over the tail.
static double chi2_upper_quantile_oracle(double alpha, int k) {
  double lo = 0.0, hi = 1.0;
  while (chi2_upper_tail(hi, k) > alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_upper_tail(mid, k) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST_CASE("fisher upper tail basics") {
  CHECK(fisher_upper_tail(0.0, 3, 10) == 1.0);
  // F(1,1) is a squared Cauchy: 0.05 upper point is tan^2(0.475 pi)
  const double q = std::tan(0.475 * std::numbers::pi);
  CHECK(fisher_upper_tail(q * q, 1, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK_THROWS_AS(fisher_upper_tail(-1.0, 2, 2), std::domain_error);
  CHECK_THROWS_AS(fisher_upper_tail(1.0, 0, 2), std::domain_error);
}

TEST_CASE("fisher quantile examples") {
  // F(k,k) has median 1 by reciprocal symmetry
  CHECK(fisher_upper_quantile(0.5, 5, 5) == doctest::Approx(1.0).epsilon(1e-9));
  const double cauchy_sq = std::pow(std::tan(0.475 * std::numbers::pi), 2);
  CHECK(fisher_upper_quantile(0.05, 1, 1) ==
        doctest::Approx(cauchy_sq).epsilon(1e-7));
  // huge m: degenerates to the chi2(1) upper quantile
  CHECK(fisher_upper_quantile(0.05, 1, 1000000) ==
        doctest::Approx(chi2_upper_quantile_oracle(0.05, 1)).epsilon(1e-4));
  CHECK_THROWS_AS(fisher_upper_quantile(0.0, 2, 2), std::domain_error);
  CHECK_THROWS_AS(fisher_upper_quantile(1.0, 2, 2), std::domain_error);
}

TEST_CASE("fisher tail/quantile round trip on the (k,m,alpha) grid") {
  const std::vector<double> alphas{0.001, 0.01, 0.05, 0.5, 0.95};
  for (int k = 1; k <= 64; ++k)
    for (int m = 1; m <= 64; ++m)
      for (const double a : alphas) {
        const double x = fisher_upper_quantile(a, k, m);
        CHECK(fisher_upper_tail(x, k, m) == doctest::Approx(a).epsilon(1e-8));
      }
}

TEST_CASE("fisher reciprocal symmetry") {
  for (const int k : {1, 2, 5, 17, 40})
    for (const int m : {1, 3, 8, 33, 64})
      for (const double x : {0.05, 0.4, 1.0, 2.5, 19.0}) {
        const double lhs = fisher_upper_tail(x, k, m);
        const double rhs = 1.0 - fisher_upper_tail(1.0 / x, m, k);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      }
}

TEST_CASE("tails are nonincreasing") {
  double prev_f = 2.0, prev_c = 2.0;
  for (double x = 0.0; x < 30.0; x += 0.37) {
    const double f = fisher_upper_tail(x, 4, 11);
    const double c = chi2_upper_tail(x, 4);
    CHECK(f <= prev_f);
    CHECK(c <= prev_c);
    prev_f = f;
    prev_c = c;
  }
}

TEST_CASE("chi2 upper tail examples") {
  CHECK(chi2_upper_tail(0.0, 4) == 1.0);
  // chi2(1): tail via the normal CDF
  const double x = 3.8415;
  CHECK(chi2_upper_tail(x, 1) ==
        doctest::Approx(2.0 * (1.0 - normal_cdf(std::sqrt(x)))).epsilon(1e-10));
  CHECK(chi2_upper_tail(x, 1) == doctest::Approx(0.05).epsilon(1e-4));
  // chi2(2) is exponential with mean 2
  CHECK(chi2_upper_tail(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the CDF") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
  for (const double p : {1e-10, 1e-4, 0.2, 0.7, 0.9999, 1.0 - 1e-12})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("gaussian sampler moments at 1e6 draws") {
  const auto draws = sample_standard_normal(RngStream{20260810, 0}, 1000000);
  double mean = 0.0;
  for (const double v : draws) mean += v;
  mean /= draws.size();
  double var = 0.0;
  for (const double v : draws) var += (v - mean) * (v - mean);
  var /= draws.size() - 1;
  CHECK(std::fabs(mean) < 0.004);
  CHECK(var > 0.994);
  CHECK(var < 1.006);
}

TEST_CASE("gaussian sampler passes Kolmogorov-Smirnov at 1e5 draws") {
  auto draws = sample_standard_normal(RngStream{77, 3}, 100000);
  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = normal_cdf(draws[i]);
    d = std::max(d, std::fabs(cdf - (i + 1) / n));
    d = std::max(d, std::fabs(cdf - i / n));
  }
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("streams are deterministic and order-independent") {
  const RngStream s{123, 45};
  CHECK(sample_standard_normal(s, 64) == sample_standard_normal(s, 64));
  // children do not collide with each other or the parent
  RngEngine parent(s), c0(s.child(0)), c1(s.child(1));
  bool all_equal = true;
  for (int i = 0; i < 16; ++i) {
    const auto a = parent.next_u64(), b = c0.next_u64(), c = c1.next_u64();
    if (a != b || b != c) all_equal = false;
  }
  CHECK_FALSE(all_equal);
  // same child id gives the same stream
  RngEngine x(s.child(7)), y(s.child(7));
  for (int i = 0; i < 16; ++i) CHECK(x.next_u64() == y.next_u64());
}
