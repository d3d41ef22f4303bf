#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "flt/adaptive.hpp"
#include "flt/process.hpp"
#include "flt/special.hpp"

using namespace flt;

namespace {

FunctionalSample brownian_sample(int n, int p, const Eigen::VectorXd& theta,
                                 double noise_sd, RngStream stream,
                                 const ProcessSpec& process) {
  const Eigen::MatrixXd x = simulate_design(process, n, stream.child(0));
  RngEngine eng(stream.child(1));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = noise_sd * eng.normal();
  if (theta.size() > 0)
    y += x * (process.grid.weights.asDiagonal() * theta);
  (void)p;
  return FunctionalSample(process.grid, x, y);
}

}  // namespace

TEST_CASE("dimension collection") {
  CHECK(dimension_collection(100).dims == std::vector<int>{1, 2, 4, 8, 16, 32});
  CHECK(dimension_collection(500).dims ==
        std::vector<int>{1, 2, 4, 8, 16, 32, 64, 128});
  CHECK(dimension_collection(4).dims == std::vector<int>{1, 2});
  CHECK(dimension_collection(100).kbar == 32);

  CHECK(dimension_collection(16, 8).dims == std::vector<int>{1, 2, 4, 8});
  CHECK_THROWS_AS(dimension_collection(16, 3), std::invalid_argument);
  CHECK_THROWS_AS(dimension_collection(16, 16), std::invalid_argument);
  CHECK_THROWS_AS(dimension_collection(3), std::invalid_argument);
}

TEST_CASE("bonferroni weight") {
  const DimensionCollection c100 = dimension_collection(100);
  CHECK(bonferroni_weight(0.05, c100).weight ==
        doctest::Approx(0.05 / 6.0).epsilon(1e-15));
  const DimensionCollection single = dimension_collection(4, 1);
  CHECK(bonferroni_weight(0.05, single).weight == 0.05);
}

TEST_CASE("monte carlo weight: determinism and serial/parallel equality") {
  const Grid g = Grid::uniform(120);
  const ProcessSpec process = ProcessSpec::brownian(g, 40);
  const FunctionalSample sample =
      brownian_sample(64, 120, Eigen::VectorXd(), 1.0, RngStream{21, 0}, process);
  const DimensionCollection collection = dimension_collection(64);
  const FpcaResult res = fpca(sample, collection.kbar);
  const ProjectionFamily family(res, collection, 64);

  const CalibrationWeight a =
      monte_carlo_weight(family, 0.05, 500, RngStream{21, 1});
  const CalibrationWeight b =
      monte_carlo_weight(family, 0.05, 500, RngStream{21, 1});
  const CalibrationWeight c =
      monte_carlo_weight_serial(family, 0.05, 500, RngStream{21, 1});
  CHECK(a.weight == b.weight);
  CHECK(a.weight == c.weight);
  CHECK_THROWS_AS(monte_carlo_weight(family, 0.05, 50, RngStream{21, 2}),
                  std::invalid_argument);
}

TEST_CASE("monte carlo weight of a single-dimension collection is the level") {
  const Grid g = Grid::uniform(80);
  const ProcessSpec process = ProcessSpec::brownian(g, 30);
  const FunctionalSample sample =
      brownian_sample(40, 80, Eigen::VectorXd(), 1.0, RngStream{22, 0}, process);
  const DimensionCollection single = dimension_collection(40, 1);
  const FpcaResult res = fpca(sample, 4);
  const ProjectionFamily family(res, single, 40);

  const int b = 5000;
  const double alpha = 0.05;
  const CalibrationWeight w =
      monte_carlo_weight(family, alpha, b, RngStream{22, 1});
  const double slack = 3.0 * std::sqrt(alpha * (1.0 - alpha) / b);
  CHECK(w.weight > alpha - slack);
  CHECK(w.weight < alpha + slack);
}

TEST_CASE("monte carlo weight dominates the Bonferroni weight up to MC error") {
  // q_{X,alpha} >= alpha/|K| - 2/sqrt(B), exercised where the bound bites
  RngEngine pick(RngStream{23, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 24 + static_cast<int>(pick.uniform_01() * 40);
    const double alpha = (rep % 3 == 0) ? 0.5 : (rep % 3 == 1 ? 0.3 : 0.05);
    const int b = (rep % 2 == 0) ? 1000 : 8000;
    const Grid g = Grid::uniform(50);
    const ProcessSpec process = ProcessSpec::brownian(g, 25);
    const FunctionalSample sample = brownian_sample(
        n, 50, Eigen::VectorXd(), 1.0,
        RngStream{24, static_cast<std::uint64_t>(rep)}, process);
    const DimensionCollection collection = dimension_collection(n);
    const FpcaResult res = fpca(sample, collection.kbar);
    const ProjectionFamily family(res, collection, n);
    const CalibrationWeight w = monte_carlo_weight(
        family, alpha, b, RngStream{25, static_cast<std::uint64_t>(rep)});
    CHECK(w.weight >=
          alpha / collection.dims.size() - 2.0 / std::sqrt(static_cast<double>(b)));
  }
}

TEST_CASE("adaptive test: audit trail covers the rank-limited collection") {
  // rank-3 design: duplicate three independent curves
  const Grid g = Grid::uniform(30);
  Eigen::MatrixXd base(3, 30);
  RngEngine eng(RngStream{26, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 30; ++j) base(i, j) = eng.normal();
  Eigen::MatrixXd x(12, 30);
  for (int i = 0; i < 12; ++i) x.row(i) = base.row(i % 3);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y(i) = eng.normal();
  const FunctionalSample sample(g, x, y);
  const FpcaResult res = fpca(sample, 6);
  CHECK(res.rank == 3);

  const AdaptiveTestResult r = adaptive_test(
      sample, res, 0.05, CalibrationMethod::P1, 0, RngStream{26, 1});
  // K_12 = {1,2,4}; k=4 exceeds the rank and is skipped, not clamped
  REQUIRE(r.per_k.size() == 2);
  CHECK(r.per_k[0].k == 1);
  CHECK(r.per_k[1].k == 2);
  // the Bonferroni weight still counts the whole collection
  CHECK(r.weight.weight == doctest::Approx(0.05 / 3.0).epsilon(1e-15));
}

TEST_CASE("adaptive test is a pure function of its inputs") {
  const Grid g = Grid::uniform(100);
  const ProcessSpec process = ProcessSpec::brownian(g, 50);
  const Eigen::VectorXd theta = make_theta_kl(0.4, 0.5, process);
  const FunctionalSample sample =
      brownian_sample(48, 100, theta, 1.0, RngStream{27, 0}, process);
  const FpcaResult res = fpca(sample, dimension_collection(48).kbar);

  const AdaptiveTestResult a = adaptive_test(
      sample, res, 0.05, CalibrationMethod::P2, 400, RngStream{27, 1});
  const AdaptiveTestResult b = adaptive_test(
      sample, res, 0.05, CalibrationMethod::P2, 400, RngStream{27, 1});
  CHECK(a.reject == b.reject);
  CHECK(a.supremum_margin == b.supremum_margin);
  CHECK(a.selected_k == b.selected_k);
  CHECK(a.weight.weight == b.weight.weight);
  REQUIRE(a.per_k.size() == b.per_k.size());
  for (std::size_t i = 0; i < a.per_k.size(); ++i) {
    CHECK(a.per_k[i].statistic == b.per_k[i].statistic);
    CHECK(a.per_k[i].threshold == b.per_k[i].threshold);
    CHECK(a.per_k[i].margin == b.per_k[i].margin);
  }
  CHECK(a.reject == (a.supremum_margin > 0.0));
}

TEST_CASE("whenever T1 rejects, T2 rejects (up to MC error)") {
  const int datasets = 500;
  const int b = 5000;
  const Grid g = Grid::uniform(60);
  const ProcessSpec process = ProcessSpec::brownian(g, 40);

  int t1_rejects = 0;
  int violations = 0;
  for (int d = 0; d < datasets; ++d) {
    RngEngine amp(RngStream{28, static_cast<std::uint64_t>(d)});
    // mix of null and signal datasets so both decisions occur
    const double signal = (d % 2 == 0) ? 0.0 : 1.2 * amp.uniform_01();
    const Eigen::VectorXd theta =
        signal > 0.0 ? make_theta_kl(signal, 0.5, process)
                     : Eigen::VectorXd::Zero(60);
    const FunctionalSample sample = brownian_sample(
        50, 60, theta, 1.0, RngStream{29, static_cast<std::uint64_t>(d)},
        process);
    const DimensionCollection collection = dimension_collection(50);
    const FpcaResult res = fpca(sample, collection.kbar);
    const ProjectionFamily family(res, collection, 50);

    const AdaptiveTestResult t1 = evaluate_adaptive(
        family, sample.responses, bonferroni_weight(0.05, collection));
    if (!t1.reject) continue;
    ++t1_rejects;
    const CalibrationWeight w = monte_carlo_weight(
        family, 0.05, b, RngStream{30, static_cast<std::uint64_t>(d)});
    const AdaptiveTestResult t2 = evaluate_adaptive(family, sample.responses, w);
    if (!t2.reject) ++violations;
  }
  CHECK(t1_rejects > 50);  // the mix actually produced rejections
  CHECK(violations <= datasets / 100);
}

TEST_CASE("P2 is conditionally exact for a fixed design") {
  const int n = 60;
  const Grid g = Grid::uniform(80);
  const ProcessSpec process = ProcessSpec::brownian(g, 40);
  const Eigen::MatrixXd x = simulate_design(process, n, RngStream{31, 0});
  const FunctionalSample design(g, x, Eigen::VectorXd::Zero(n));
  const DimensionCollection collection = dimension_collection(n);
  const FpcaResult res = fpca(design, collection.kbar);
  const ProjectionFamily family(res, collection, n);
  const CalibrationWeight w =
      monte_carlo_weight(family, 0.05, 2000, RngStream{31, 1});

  const int reps = 10000;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    RngEngine eng(RngStream{31, 2}.child(r));
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps(i) = eng.normal();
    if (evaluate_adaptive(family, eps, w).reject) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  const double slack = 3.0 * std::sqrt(0.05 * 0.95 / reps);
  CHECK(rate > 0.05 - slack);
  CHECK(rate < 0.05 + slack);
}

TEST_CASE("subspace test with an empty basis reduces to the adaptive test") {
  const Grid g = Grid::uniform(90);
  const ProcessSpec process = ProcessSpec::brownian(g, 40);
  const Eigen::VectorXd theta = make_theta_kl(0.6, 1.0, process);
  const FunctionalSample sample =
      brownian_sample(44, 90, theta, 1.0, RngStream{32, 0}, process);
  const FpcaResult res = fpca(sample, dimension_collection(44).kbar);

  const AdaptiveTestResult plain = adaptive_test(
      sample, res, 0.05, CalibrationMethod::P2, 300, RngStream{32, 1});
  const AdaptiveTestResult sub = subspace_test(
      sample, res, Eigen::MatrixXd(0, 90), 0.05, CalibrationMethod::P2, 300,
      RngStream{32, 1});
  REQUIRE(plain.per_k.size() == sub.per_k.size());
  for (std::size_t i = 0; i < plain.per_k.size(); ++i) {
    CHECK(plain.per_k[i].statistic == sub.per_k[i].statistic);
    CHECK(plain.per_k[i].threshold == sub.per_k[i].threshold);
  }
  CHECK(plain.reject == sub.reject);
  CHECK(plain.weight.weight == sub.weight.weight);
}

TEST_CASE("subspace test dimensions in the typical situation") {
  const int n = 50;
  const Grid g = Grid::uniform(70);
  const ProcessSpec process = ProcessSpec::brownian(g, 30);
  const FunctionalSample sample =
      brownian_sample(n, 70, Eigen::VectorXd(), 1.0, RngStream{33, 0}, process);
  const DimensionCollection collection = dimension_collection(n, 8);
  const FpcaResult res = fpca(sample, collection.kbar);

  Eigen::MatrixXd basis(2, 70);
  basis.row(0) = make_theta_g(1.0, 0.1, g).transpose();
  basis.row(1) = make_theta_g(1.0, 0.3, g).transpose();
  const ProjectionFamily family(res, collection, sample, basis);
  CHECK(family.subspace_dim() == 2);
  // K = {1,2,4,8}: tested dimension k, residual dof n - (k + 2)
  for (std::size_t j = 0; j < family.dims().size(); ++j) {
    CHECK(family.dof_num()[j] == family.dims()[j]);
    CHECK(family.dof_den()[j] == n - family.dims()[j] - 2);
  }
}

TEST_CASE("subspace test rejects rank-deficient bases") {
  const Grid g = Grid::uniform(40);
  const ProcessSpec process = ProcessSpec::brownian(g, 20);
  const FunctionalSample sample =
      brownian_sample(30, 40, Eigen::VectorXd(), 1.0, RngStream{34, 0}, process);
  const FpcaResult res = fpca(sample, 8);

  Eigen::MatrixXd dup(2, 40);
  dup.row(0) = make_theta_g(1.0, 0.1, g).transpose();
  dup.row(1) = 2.0 * dup.row(0);
  CHECK_THROWS_AS(subspace_test(sample, res, dup, 0.05, CalibrationMethod::P1,
                                0, RngStream{34, 1}),
                  std::invalid_argument);

  Eigen::MatrixXd wide(15, 40);  // 15 >= 30/2
  wide.setRandom();
  CHECK_THROWS_AS(subspace_test(sample, res, wide, 0.05, CalibrationMethod::P1,
                                0, RngStream{34, 2}),
                  std::invalid_argument);
}

TEST_CASE("subspace test holds its level under the composite null") {
  // theta inside the tested subspace: rejections should match the level
  const int n = 60;
  const int trials = 2000;
  const Grid g = Grid::uniform(80);
  const ProcessSpec process = ProcessSpec::brownian(g, 40);
  Eigen::MatrixXd basis(1, 80);
  basis.row(0) = make_theta_g(1.0, 0.2, g).transpose();
  const Eigen::VectorXd theta = 1.5 * basis.row(0).transpose();
  const DimensionCollection collection = dimension_collection(n);

  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    const FunctionalSample sample = brownian_sample(
        n, 80, theta, 1.0, RngStream{35, static_cast<std::uint64_t>(t)},
        process);
    const FpcaResult res = fpca(sample, collection.kbar);
    const ProjectionFamily family(res, collection, sample, basis);
    const CalibrationWeight w = monte_carlo_weight_serial(
        family, 0.05, 300, RngStream{36, static_cast<std::uint64_t>(t)});
    if (evaluate_adaptive(family, sample.responses, w).reject) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / trials;
  const double slack = 3.0 * std::sqrt(0.05 * 0.95 / trials);
  CHECK(rate > 0.05 - slack);
  CHECK(rate < 0.05 + slack);
}
