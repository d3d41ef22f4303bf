#include "flt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flt {

namespace {

struct TrialOutcome {
  bool reject_p1 = false;
  bool reject_p2 = false;
};

struct TrialKernel {
  const ExperimentPlan& plan;
  Eigen::VectorXd theta;         // slope on the grid
  Eigen::VectorXd theta_w;       // weights .* theta, for <X_i, theta>
  DimensionCollection collection;
  bool has_signal;

  explicit TrialKernel(const ExperimentPlan& plan_)
      : plan(plan_),
        theta(slope_on_grid(plan_.slope, plan_.process)),
        theta_w(plan_.process.grid.weights.asDiagonal() * theta),
        collection(dimension_collection(plan_.n, plan_.kbar_override)),
        has_signal(theta.squaredNorm() > 0.0) {}

  TrialOutcome run(int trial) const {
    const RngStream trial_stream{plan.seed, static_cast<std::uint64_t>(trial)};
    const Eigen::MatrixXd x =
        simulate_design(plan.process, plan.n, trial_stream.child(0));

    Eigen::VectorXd y(plan.n);
    {
      RngEngine noise(trial_stream.child(1));
      for (int i = 0; i < plan.n; ++i) y(i) = plan.noise_sd * noise.normal();
    }
    if (has_signal) y += x * theta_w;

    // simulated data stays uncentered: the model is generated centered
    const FunctionalSample sample(plan.process.grid, x, y);
    const FpcaResult pca = fpca(sample, std::min(collection.kbar, plan.n));
    const ProjectionFamily family(pca, collection, plan.n);

    TrialOutcome out;
    if (plan.run_p1) {
      const CalibrationWeight w = bonferroni_weight(plan.alpha, collection);
      out.reject_p1 = evaluate_adaptive(family, y, w).reject;
    }
    if (plan.run_p2) {
      // serial: trials are the parallel unit
      const CalibrationWeight w = monte_carlo_weight_serial(
          family, plan.alpha, plan.mc_replicates, trial_stream.child(2));
      out.reject_p2 = evaluate_adaptive(family, y, w).reject;
    }
    return out;
  }
};

void finalize(MethodTally& tally, bool ran, int trials) {
  tally.ran = ran;
  if (!ran) return;
  const double p = static_cast<double>(tally.rejections) / trials;
  tally.percent = 100.0 * p;
  tally.ci_half_width = 100.0 * 1.96 * std::sqrt(p * (1.0 - p) / trials);
}

ExperimentResult run_impl(const ExperimentPlan& plan, bool parallel) {
  if (plan.trials < 1) throw std::invalid_argument("run_experiment: trials < 1");
  if (!plan.run_p1 && !plan.run_p2)
    throw std::invalid_argument("run_experiment: no method requested");
  const auto t0 = std::chrono::steady_clock::now();

  const TrialKernel kernel(plan);
  long long rej1 = 0;
  long long rej2 = 0;
  std::string failure;

#pragma omp parallel for schedule(dynamic) reduction(+ : rej1, rej2) \
    if (parallel)
  for (int t = 0; t < plan.trials; ++t) {
    try {
      const TrialOutcome out = kernel.run(t);
      rej1 += out.reject_p1 ? 1 : 0;
      rej2 += out.reject_p2 ? 1 : 0;
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty())
        failure = "trial " + std::to_string(t) + ": " + e.what();
    }
  }
  if (!failure.empty()) throw std::runtime_error("run_experiment: " + failure);

  ExperimentResult res;
  res.trials = plan.trials;
  res.p1.rejections = rej1;
  res.p2.rejections = rej2;
  finalize(res.p1, plan.run_p1, plan.trials);
  finalize(res.p2, plan.run_p2, plan.trials);
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  return run_impl(plan, true);
}

ExperimentResult run_experiment_serial(const ExperimentPlan& plan) {
  return run_impl(plan, false);
}

}  // namespace flt
