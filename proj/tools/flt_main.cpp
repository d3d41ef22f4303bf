// flt: adaptive slope tests for the functional linear model.
//
//   flt test      run the adaptive test on curves/responses CSV files
//   flt simulate  run a simulation plan and tabulate rejection rates
//   flt rates     tabulate minimax separation rates over n
//
// Exit codes: 0 completed, 2 input error, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "flt/adaptive.hpp"
#include "flt/csv_io.hpp"
#include "flt/errors.hpp"
#include "flt/experiment.hpp"
#include "flt/plan_io.hpp"
#include "flt/rates.hpp"

namespace {

using nlohmann::json;

struct TestOptions {
  std::string curves_path;
  std::string responses_path;
  std::string out_path;
  double alpha = 0.05;
  std::string method = "p2";
  int mc_replicates = 1000;
  std::uint64_t seed = 0;
  int kbar = 0;
  bool no_center = false;
};

int cmd_test(const TestOptions& opt) {
  const flt::CurvesFile curves = flt::read_curves_csv(opt.curves_path);
  const Eigen::VectorXd responses =
      flt::read_responses_csv(opt.responses_path);
  if (responses.size() != curves.curves.rows())
    throw flt::InputError("responses rows (" + std::to_string(responses.size()) +
                          ") do not match curves rows (" +
                          std::to_string(curves.curves.rows()) + ")");
  if (curves.curves.rows() < 4) throw flt::InputError("need n >= 4 curves");

  flt::FunctionalSample sample(flt::Grid::from_points(curves.grid_points),
                               curves.curves, responses);
  if (!opt.no_center) sample = flt::center_sample(sample);

  const flt::DimensionCollection collection =
      flt::dimension_collection(sample.n(), opt.kbar);
  const flt::FpcaResult pca =
      flt::fpca(sample, std::min(collection.kbar, sample.n()));
  const flt::CalibrationMethod method = opt.method == "p1"
                                            ? flt::CalibrationMethod::P1
                                            : flt::CalibrationMethod::P2;
  const flt::AdaptiveTestResult result =
      flt::adaptive_test(sample, pca, opt.alpha, method, opt.mc_replicates,
                         flt::RngStream{opt.seed, 0}, opt.kbar);

  const json config{{"command", "test"},
                    {"curves", opt.curves_path},
                    {"responses", opt.responses_path},
                    {"alpha", opt.alpha},
                    {"method", opt.method},
                    {"mc_replicates", opt.mc_replicates},
                    {"seed", opt.seed},
                    {"kbar", collection.kbar},
                    {"centered", !opt.no_center},
                    {"n", sample.n()},
                    {"grid_points", sample.p()}};
  flt::atomic_write_text(
      opt.out_path,
      flt::format_test_report(result, pca.rank, collection.kbar,
                              config.dump()));
  std::cout << (result.reject ? "reject" : "no rejection")
            << " (supremum margin " << result.supremum_margin
            << ", selected k " << result.selected_k << ")\n";
  return 0;
}

struct SimulateOptions {
  std::string plan_path;
  std::string out_path;
  int trials = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

int cmd_simulate(const SimulateOptions& opt) {
  const flt::SimulationPlan plan = flt::read_plan_file(
      opt.plan_path, opt.trials, opt.seed, opt.has_seed);

  std::vector<std::string> rows;
  auto done = flt::read_existing_results(opt.out_path, &rows);
  auto has_row = [&done](const std::string& cell, const std::string& method) {
    for (const auto& [c, m] : done)
      if (c == cell && m == method) return true;
    return false;
  };

  auto flush = [&rows, &opt]() {
    std::ostringstream os;
    os << flt::results_csv_header() << '\n';
    for (const auto& r : rows) os << r << '\n';
    flt::atomic_write_text(opt.out_path, os.str());
  };
  flush();  // validates writability before the long run

  for (const auto& cell : plan.cells) {
    flt::ExperimentPlan run = cell.plan;
    run.run_p1 = cell.plan.run_p1 && !has_row(cell.name, "p1");
    run.run_p2 = cell.plan.run_p2 && !has_row(cell.name, "p2");
    if (!run.run_p1 && !run.run_p2) {
      std::cout << cell.name << ": already complete, skipping\n";
      continue;
    }
    const flt::ExperimentResult res = flt::run_experiment(run);
    const Eigen::VectorXd theta = flt::slope_on_grid(run.slope, run.process);
    const double norm = std::sqrt(
        flt::inner_product(theta, theta, run.process.grid));

    for (const auto* method : {"p1", "p2"}) {
      const flt::MethodTally& tally =
          std::string(method) == "p1" ? res.p1 : res.p2;
      if (!tally.ran) continue;
      flt::ResultRow row;
      row.cell = cell.name;
      row.method = method;
      row.n = run.n;
      row.slope_label = cell.slope_label;
      row.slope_param = cell.slope_param;
      row.slope_norm = norm;
      row.trials = res.trials;
      row.rejections = tally.rejections;
      row.percent = tally.percent;
      row.ci_half_width = tally.ci_half_width;
      row.alpha = run.alpha;
      row.mc_replicates = run.mc_replicates;
      row.grid_points = cell.grid_points;
      row.seed = run.seed;
      row.elapsed_seconds = res.elapsed_seconds;
      rows.push_back(flt::format_result_row(row));
      std::cout << cell.name << " " << method << ": " << tally.percent
                << "% (+- " << tally.ci_half_width << ") in "
                << res.elapsed_seconds << "s\n";
    }
    flush();
  }
  return 0;
}

struct RatesOptions {
  std::string regime = "poly";
  double s = 4.0;
  double radius = 1.0;
  double c = 1.0;
  std::vector<double> n_list;
  int k_max = 0;
  std::string out_path;
};

int cmd_rates(const RatesOptions& opt) {
  const flt::EllipsoidSpec spec =
      opt.regime == "poly" ? flt::EllipsoidSpec::polynomial(opt.s, opt.radius)
                           : flt::EllipsoidSpec::exponential(opt.s, opt.radius);
  std::ostringstream os;
  os.precision(12);
  os << "n,rho_sq,rho_argmax,k_star,rho_tilde_sq,rho_tilde_argmax,C,regime,"
        "outside_guarantee\n";
  for (const double n : opt.n_list) {
    if (n < 2.0) throw flt::InputError("rates: n must be >= 2");
    const flt::RateReport rep = flt::rate_report(spec, n, opt.c, opt.k_max);
    os << n << ',' << rep.rho_sq << ',' << rep.rho_argmax << ',' << rep.k_star
       << ',' << rep.rho_tilde_sq << ',' << rep.rho_tilde_argmax << ','
       << rep.constant_c << ',' << opt.regime << ','
       << (rep.outside_guarantee ? 1 : 0) << '\n';
  }
  flt::atomic_write_text(opt.out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("FLT_THREADS")) {
#ifdef _OPENMP
    const int t = std::atoi(threads);
    if (t > 0) omp_set_num_threads(t);
#else
    (void)threads;
#endif
  }

  CLI::App app{"Adaptive tests of the null slope in the functional linear model"};
  app.require_subcommand(1);

  TestOptions t;
  CLI::App* test = app.add_subcommand("test", "test theta = 0 on CSV data");
  test->add_option("--curves", t.curves_path, "curves CSV (first row = grid)")
      ->required();
  test->add_option("--responses", t.responses_path, "single-column responses CSV")
      ->required();
  test->add_option("--alpha", t.alpha, "level");
  test->add_option("--method", t.method, "calibration: p1 (Bonferroni) or p2")
      ->check(CLI::IsMember({"p1", "p2"}));
  test->add_option("--B", t.mc_replicates, "Monte-Carlo replicates for p2");
  test->add_option("--seed", t.seed, "RNG seed");
  test->add_option("--kbar", t.kbar, "override the largest dimension (power of 2)");
  test->add_flag("--no-center", t.no_center, "skip empirical centering");
  test->add_option("--out", t.out_path, "report file (JSON)")->required();

  SimulateOptions s;
  CLI::App* sim = app.add_subcommand("simulate", "run a simulation plan");
  sim->add_option("--plan", s.plan_path, "plan file (JSON)")->required();
  sim->add_option("--trials", s.trials, "override trials for every cell");
  auto* seed_opt = sim->add_option("--seed", s.seed, "override seed for every cell");
  sim->add_option("--out", s.out_path, "results CSV (resumable by cell)")
      ->required();

  RatesOptions r;
  CLI::App* rates = app.add_subcommand("rates", "separation-rate table");
  rates->add_option("--regime", r.regime, "poly or exp")
      ->check(CLI::IsMember({"poly", "exp"}));
  rates->add_option("--s", r.s, "decay parameter")->required();
  rates->add_option("--R", r.radius, "ellipsoid radius")->required();
  rates->add_option("--C", r.c, "rate constant C(alpha,beta)");
  rates->add_option("--n-list", r.n_list, "sample sizes")->required();
  rates->add_option("--kmax", r.k_max, "scan bound (default max(1e4, 10n))");
  rates->add_option("--out", r.out_path, "rates CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*test) return cmd_test(t);
    if (*sim) {
      s.has_seed = seed_opt->count() > 0;
      return cmd_simulate(s);
    }
    if (*rates) return cmd_rates(r);
  } catch (const flt::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
