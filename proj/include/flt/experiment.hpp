#pragma once

#include <cstdint>

#include "flt/adaptive.hpp"
#include "flt/process.hpp"

namespace flt {

// One cell of a simulation study: process, slope, noise level, sample size,
// methods, trial count, seed.
struct ExperimentPlan {
  ProcessSpec process;
  SlopeSpec slope;
  double noise_sd = 1.0;
  int n = 100;
  double alpha = 0.05;
  bool run_p1 = true;
  bool run_p2 = true;
  int trials = 1000;
  int mc_replicates = 1000;
  std::uint64_t seed = 0;
  int kbar_override = 0;
};

struct MethodTally {
  bool ran = false;
  long long rejections = 0;
  double percent = 0.0;
  double ci_half_width = 0.0;  // 1.96 * sqrt(p(1-p)/trials)
};

struct ExperimentResult {
  MethodTally p1;
  MethodTally p2;
  int trials = 0;
  double elapsed_seconds = 0.0;
};

// Runs the trials and tallies rejections. Trial t draws everything from the
// stream (seed, t): curves from child 0, noise from child 1, Monte-Carlo
// replicate b of the P2 calibration from child(2).child(b). Results are
// therefore identical whatever the schedule; a failed trial aborts the whole
// run with the trial index in the message.
ExperimentResult run_experiment(const ExperimentPlan& plan);
// Reference loop without OpenMP; must produce identical tallies.
ExperimentResult run_experiment_serial(const ExperimentPlan& plan);

}  // namespace flt
