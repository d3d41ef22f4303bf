#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "flt/experiment.hpp"
#include "flt/process.hpp"

using namespace flt;

namespace {

double quadrature_norm(const Eigen::VectorXd& f, const Grid& g) {
  return std::sqrt(inner_product(f, f, g));
}

}  // namespace

TEST_CASE("Brownian preset matches the closed-form eigensystem") {
  const Grid g = Grid::uniform(200);
  const ProcessSpec process = ProcessSpec::brownian(g);
  CHECK(process.truncation() == 100);
  CHECK(process.lambdas(0) ==
        doctest::Approx(1.0 / (0.25 * std::numbers::pi * std::numbers::pi))
            .epsilon(1e-14));
  // V_j(0) = 0 for every j, so every simulated curve starts at 0
  const Eigen::MatrixXd x = simulate_design(process, 50, RngStream{41, 0});
  CHECK(x.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulated scores carry the right variances and no correlation") {
  const int n = 5000;
  const Grid g = Grid::uniform(200);
  const ProcessSpec process = ProcessSpec::brownian(g);
  const Eigen::MatrixXd x = simulate_design(process, n, RngStream{42, 0});

  const Eigen::VectorXd s1 =
      x * (g.weights.asDiagonal() * process.basis.row(0).transpose());
  const Eigen::VectorXd s2 =
      x * (g.weights.asDiagonal() * process.basis.row(1).transpose());
  const double var1 = s1.squaredNorm() / n - std::pow(s1.mean(), 2);
  const double lambda1 = process.lambdas(0);
  CHECK(std::fabs(var1 - lambda1) < 4.0 * lambda1 * std::sqrt(2.0 / n));

  const double corr =
      (s1.dot(s2) / n - s1.mean() * s2.mean()) /
      std::sqrt(var1 * (s2.squaredNorm() / n - std::pow(s2.mean(), 2)));
  CHECK(std::fabs(corr) < 0.05);
}

TEST_CASE("custom process validation") {
  const Grid g = Grid::uniform(50);
  Eigen::VectorXd lambdas(2);
  lambdas << 1.0, 0.5;
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 50);  // not orthonormal
  CHECK_THROWS_AS(ProcessSpec::custom(g, lambdas, bad), std::invalid_argument);

  const ProcessSpec brown = ProcessSpec::brownian(g, 2);
  CHECK_NOTHROW(ProcessSpec::custom(g, brown.lambdas, brown.basis));
}

TEST_CASE("theta_KL: amplitude is the exact norm, coefficients decay as stated") {
  const Grid g = Grid::uniform(1000);
  const ProcessSpec process = ProcessSpec::brownian(g);

  CHECK(make_theta_kl(0.0, 1.0, process).cwiseAbs().maxCoeff() == 0.0);

  // the rough end of the family is where normalization errors would show
  for (const double xi : {0.1, 0.5, 1.0}) {
    const Eigen::VectorXd theta = make_theta_kl(0.7, xi, process);
    CHECK(quadrature_norm(theta, g) == doctest::Approx(0.7).epsilon(1e-6));
  }

  // eigen-coefficients proportional to j^{-xi-1/2}, nothing past the cutoff
  const Eigen::VectorXd theta = make_theta_kl(1.0, 1.0, process);
  double partial = 0.0;
  for (int j = 1; j <= 100; ++j) partial += std::pow(j, -3.0);
  const double scale = 1.0 / std::sqrt(partial);
  for (const int j : {1, 2, 10, 100}) {
    const double coef = inner_product(theta, process.basis.row(j - 1).transpose(), g);
    CHECK(coef == doctest::Approx(scale * std::pow(j, -1.5)).epsilon(1e-4));
  }
  Eigen::VectorXd v101(1000);
  for (int i = 0; i < 1000; ++i)
    v101(i) = std::numbers::sqrt2 * std::sin(100.5 * std::numbers::pi * g.points(i));
  CHECK(std::fabs(inner_product(theta, v101, g)) < 1e-4);
}

TEST_CASE("theta_G: normalization, symmetry, concentration") {
  const Grid g = Grid::uniform(1000);
  const Eigen::VectorXd theta = make_theta_g(1.0, 0.05, g);
  CHECK(quadrature_norm(theta, g) == doctest::Approx(1.0).epsilon(1e-6));

  // dyadic symmetric grid: exact mirror symmetry
  const Grid sym = Grid::uniform(129);
  const Eigen::VectorXd ts = make_theta_g(2.0, 0.02, sym);
  for (int i = 0; i < 129; ++i) CHECK(ts(i) == ts(128 - i));

  const Eigen::VectorXd narrow = make_theta_g(1.0, 0.01, g);
  const Eigen::VectorXd wide = make_theta_g(1.0, 0.05, g);
  CHECK(narrow.maxCoeff() > wide.maxCoeff());
}

TEST_CASE("bias term: truncation, full energy, closed form") {
  const Grid g = Grid::uniform(500);
  const ProcessSpec process = ProcessSpec::brownian(g);
  const SlopeSpec kl = SlopeSpec::kl(1.0, 1.0);

  CHECK(bias_term(process, kl, 100) == 0.0);
  CHECK(bias_term(process, kl, 200) == 0.0);

  // closed form: (B^2 / (pi^2 S)) sum_{j=k+1}^{100} (j-0.5)^{-2} j^{-2xi-1},
  // S the normalizer sum of the family
  double series = 0.0;
  for (int j = 1; j <= 100; ++j) series += std::pow(j, -3.0);
  auto closed_form = [&](int k) {
    double sum = 0.0;
    for (int j = k + 1; j <= 100; ++j)
      sum += std::pow(j - 0.5, -2.0) * std::pow(j, -3.0);
    return sum / (std::numbers::pi * std::numbers::pi * series);
  };
  CHECK(bias_term(process, kl, 4) == doctest::Approx(closed_form(4)).epsilon(1e-10));
  CHECK(bias_term(process, kl, 0) == doctest::Approx(closed_form(0)).epsilon(1e-10));

  // the generic quadrature route agrees with the analytic coefficients
  const SlopeSpec as_custom =
      SlopeSpec::custom(make_theta_kl(1.0, 1.0, process));
  CHECK(bias_term(process, as_custom, 4) ==
        doctest::Approx(closed_form(4)).epsilon(1e-8));
}

TEST_CASE("signal energy of simulated designs matches the spectral sum") {
  const Grid g = Grid::uniform(200);
  const ProcessSpec process = ProcessSpec::brownian(g);
  const Eigen::VectorXd theta = make_theta_kl(1.0, 1.0, process);
  const double expected = bias_term(process, SlopeSpec::kl(1.0, 1.0), 0);

  const int n = 10000;
  const Eigen::MatrixXd x = simulate_design(process, n, RngStream{43, 0});
  const Eigen::VectorXd signal = x * (g.weights.asDiagonal() * theta);
  const double var = signal.squaredNorm() / n - std::pow(signal.mean(), 2);
  CHECK(std::fabs(var - expected) < 0.05 * expected);
}

TEST_CASE("run_experiment: determinism and serial/parallel identity") {
  ExperimentPlan plan;
  plan.process = ProcessSpec::brownian(Grid::uniform(100), 40);
  plan.slope = SlopeSpec::kl(0.5, 1.0);
  plan.n = 32;
  plan.trials = 60;
  plan.mc_replicates = 150;
  plan.seed = 909;

  const ExperimentResult a = run_experiment(plan);
  const ExperimentResult b = run_experiment(plan);
  const ExperimentResult c = run_experiment_serial(plan);
  CHECK(a.p1.rejections == b.p1.rejections);
  CHECK(a.p2.rejections == b.p2.rejections);
  CHECK(a.p1.rejections == c.p1.rejections);
  CHECK(a.p2.rejections == c.p2.rejections);
}

TEST_CASE("zero-slope cells sit at the nominal level") {
  ExperimentPlan plan;
  plan.process = ProcessSpec::brownian(Grid::uniform(150), 60);
  plan.slope = SlopeSpec::zero();
  plan.n = 100;
  plan.trials = 300;
  plan.mc_replicates = 300;
  plan.seed = 4242;

  const ExperimentResult res = run_experiment(plan);
  const double se = std::sqrt(0.05 * 0.95 / plan.trials);
  const double p2 = res.p2.percent / 100.0;
  CHECK(p2 > 0.05 - 3.0 * se);
  CHECK(p2 < 0.05 + 3.0 * se);
  // Bonferroni stays below the level (plus noise)
  CHECK(res.p1.percent / 100.0 < 0.05 + 3.0 * se);
  CHECK(res.p1.percent <= res.p2.percent);
}

TEST_CASE("power is nondecreasing in the signal norm") {
  std::vector<double> power;
  for (const double b : {0.1, 0.5, 1.0}) {
    ExperimentPlan plan;
    plan.process = ProcessSpec::brownian(Grid::uniform(150), 60);
    plan.slope = SlopeSpec::kl(b, 1.0);
    plan.n = 100;
    plan.trials = 200;
    plan.run_p2 = false;
    plan.seed = 5150;
    power.push_back(run_experiment(plan).p1.percent / 100.0);
  }
  const double se = std::sqrt(0.25 / 200.0);  // worst-case binomial SE
  CHECK(power[1] >= power[0] - 2.0 * se);
  CHECK(power[2] >= power[1] - 2.0 * se);
  CHECK(power[2] > power[0]);  // the pattern itself
}

TEST_CASE("single-trial boundary") {
  ExperimentPlan plan;
  plan.process = ProcessSpec::brownian(Grid::uniform(80), 30);
  plan.slope = SlopeSpec::zero();
  plan.n = 16;
  plan.trials = 1;
  plan.run_p2 = false;
  plan.seed = 3;
  const ExperimentResult res = run_experiment(plan);
  CHECK((res.p1.percent == 0.0 || res.p1.percent == 100.0));
  CHECK(res.p1.ci_half_width == 0.0);
}

TEST_CASE("desk-scale grid matches the production grid within noise") {
  auto run_with_grid = [](int points) {
    ExperimentPlan plan;
    plan.process = ProcessSpec::brownian(Grid::uniform(points));
    plan.slope = SlopeSpec::kl(0.5, 1.0);
    plan.n = 100;
    plan.trials = 300;
    plan.run_p2 = false;
    plan.seed = 60;
    return run_experiment(plan).p1.percent / 100.0;
  };
  const double coarse = run_with_grid(200);
  const double fine = run_with_grid(1000);
  const double se = std::sqrt(2.0 * 0.25 / 300.0);
  CHECK(std::fabs(coarse - fine) <= 3.0 * se);
}
