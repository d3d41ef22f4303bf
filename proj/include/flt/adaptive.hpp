#pragma once

#include <Eigen/Dense>
#include <vector>

#include "flt/fpca.hpp"
#include "flt/projection.hpp"
#include "flt/rng.hpp"
#include "flt/sample.hpp"

namespace flt {

// Dyadic candidate dimensions {1, 2, 4, ..., kbar}, kbar = 2^(floor(log2 n)-1)
// unless overridden by another power of two <= n/2.
struct DimensionCollection {
  std::vector<int> dims;
  int kbar = 0;
};

DimensionCollection dimension_collection(int n, int kbar_override = 0);

enum class CalibrationMethod { P1, P2 };

struct CalibrationWeight {
  CalibrationMethod method = CalibrationMethod::P1;
  double alpha = 0.0;
  double weight = 0.0;
  int mc_replicates = 0;  // P2 only
  RngStream mc_stream{};  // P2 only
};

CalibrationWeight bonferroni_weight(double alpha,
                                    const DimensionCollection& collection);

// Projection machinery for every candidate dimension at once, sharing one
// FPCA. An optional null-subspace basis turns the plain statistic into the
// partial one: the tested space becomes the orthogonal complement of the
// subspace columns inside their sum with the score span.
//
// All dimensions are prefixes of a single orthonormal basis, so evaluating
// the whole collection against one response costs a single matrix-vector
// product. Instances are immutable after construction and shared across
// threads: this is the hot path of the Monte-Carlo calibration.
class ProjectionFamily {
 public:
  // Dimensions above Rank(FPCA) are skipped, never clamped, so no dimension
  // is tested twice.
  ProjectionFamily(const FpcaResult& fpca, const DimensionCollection& collection,
                   int n);
  // Subspace variant: basis rows are functions on the grid; their score
  // columns <X_i, xi_j> are projected out.
  ProjectionFamily(const FpcaResult& fpca, const DimensionCollection& collection,
                   const FunctionalSample& sample,
                   const Eigen::MatrixXd& subspace_basis);

  int n() const { return n_; }
  int subspace_dim() const { return static_cast<int>(qv_.cols()); }
  const std::vector<int>& dims() const { return dims_; }
  // numerator dimension per entry of dims(): dim of the tested space
  const std::vector<int>& dof_num() const { return dof_num_; }
  // denominator residual dof per entry: n - dim(subspace + score span)
  const std::vector<int>& dof_den() const { return dof_den_; }

  std::vector<PhiValue> phi_all(const Eigen::VectorXd& y) const;
  // inf over the collection of the Fisher upper tail of phi/dof_num: the
  // replicate statistic of the Monte-Carlo calibration.
  double min_p_value(const Eigen::VectorXd& y) const;
  // same statistic for a block of response columns at once (one matrix
  // product per block instead of one per replicate)
  void min_p_block(const Eigen::MatrixXd& ys, double* out) const;

 private:
  void build_dims(const FpcaResult& fpca, const DimensionCollection& collection);

  int n_ = 0;
  Eigen::MatrixXd qv_;  // n x r_v orthonormal basis of the subspace columns
  Eigen::MatrixXd q_;   // n x width_max, prefix-nested tested directions
  std::vector<int> dims_;
  std::vector<int> width_;  // kept columns of q_ per dim (= dof_num_)
  std::vector<int> dof_num_;
  std::vector<int> dof_den_;
};

// Empirical alpha-quantile (order statistic floor(alpha*B), conservative
// side) of the minimum p-value over the collection, from B standard Gaussian
// response vectors. Deterministic given (stream, B); replicates run in
// parallel, each on its own child stream.
CalibrationWeight monte_carlo_weight(const ProjectionFamily& family,
                                     double alpha, int replicates,
                                     RngStream stream);
// Reference implementation: plain loop, no OpenMP. Must match bit for bit.
CalibrationWeight monte_carlo_weight_serial(const ProjectionFamily& family,
                                            double alpha, int replicates,
                                            RngStream stream);

struct DimensionDecision {
  int k = 0;
  int k_effective = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

struct AdaptiveTestResult {
  std::vector<DimensionDecision> per_k;
  double supremum_margin = 0.0;
  bool reject = false;
  int selected_k = 0;  // argmax dimension, 0 when nothing was testable
  CalibrationWeight weight;
};

// Decision given a precomputed family and calibration weight.
AdaptiveTestResult evaluate_adaptive(const ProjectionFamily& family,
                                     const Eigen::VectorXd& responses,
                                     const CalibrationWeight& weight);

AdaptiveTestResult adaptive_test(const FunctionalSample& sample,
                                 const FpcaResult& fpca, double alpha,
                                 CalibrationMethod method, int mc_replicates,
                                 RngStream stream, int kbar_override = 0);

// Test of "theta lies in the span of the given basis functions". An empty
// basis (0 rows) reduces exactly to adaptive_test.
AdaptiveTestResult subspace_test(const FunctionalSample& sample,
                                 const FpcaResult& fpca,
                                 const Eigen::MatrixXd& subspace_basis,
                                 double alpha, CalibrationMethod method,
                                 int mc_replicates, RngStream stream,
                                 int kbar_override = 0);

}  // namespace flt
