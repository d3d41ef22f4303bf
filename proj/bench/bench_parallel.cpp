// Compares the OpenMP kernels against their serial reference paths and
// checks that both produce identical results. Usage: flt_bench [n] [trials]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flt/adaptive.hpp"
#include "flt/experiment.hpp"
#include "flt/fpca.hpp"
#include "flt/process.hpp"

namespace {

template <typename F>
double time_call(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 200;
  const int trials = argc > 2 ? std::atoi(argv[2]) : 40;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  const flt::Grid grid = flt::Grid::uniform(1000);
  const flt::ProcessSpec process = flt::ProcessSpec::brownian(grid);

  // Monte-Carlo calibration on one fixed design
  {
    const Eigen::MatrixXd x =
        flt::simulate_design(process, n, flt::RngStream{7, 0});
    const flt::FunctionalSample sample(grid, x, Eigen::VectorXd::Ones(n));
    const flt::DimensionCollection collection = flt::dimension_collection(n);
    const flt::FpcaResult pca = flt::fpca(sample, collection.kbar);
    const flt::ProjectionFamily family(pca, collection, n);

    const int b = 4000;
    flt::CalibrationWeight ws, wp;
    // warm up thread pool and allocator before timing
    flt::monte_carlo_weight(family, 0.05, 200, flt::RngStream{7, 2});
    const double ts = time_call([&] {
      ws = flt::monte_carlo_weight_serial(family, 0.05, b, flt::RngStream{7, 1});
    });
    const double tp = time_call([&] {
      wp = flt::monte_carlo_weight(family, 0.05, b, flt::RngStream{7, 1});
    });
    std::printf("monte_carlo_weight  n=%d B=%d   serial %7.3fs  parallel %7.3fs"
                "  speedup %.2fx  identical %s\n",
                n, b, ts, tp, ts / tp, ws.weight == wp.weight ? "yes" : "NO");
  }

  // full experiment cell
  {
    flt::ExperimentPlan plan;
    plan.process = process;
    plan.slope = flt::SlopeSpec::kl(0.5, 1.0);
    plan.n = n;
    plan.trials = trials;
    plan.mc_replicates = 500;
    plan.seed = 11;
    flt::ExperimentResult rs, rp;
    const double ts = time_call([&] { rs = flt::run_experiment_serial(plan); });
    const double tp = time_call([&] { rp = flt::run_experiment(plan); });
    const bool same = rs.p1.rejections == rp.p1.rejections &&
                      rs.p2.rejections == rp.p2.rejections;
    std::printf("run_experiment      n=%d T=%d   serial %7.3fs  parallel %7.3fs"
                "  speedup %.2fx  identical %s\n",
                n, trials, ts, tp, ts / tp, same ? "yes" : "NO");
  }
  return 0;
}
