#pragma once

#include <Eigen/Dense>

#include "flt/grid.hpp"

namespace flt {

// n discretized curves on a common grid plus the length-n response vector.
struct FunctionalSample {
  Grid grid;
  Eigen::MatrixXd curves;     // n x p, row i = X_i on the grid
  Eigen::VectorXd responses;  // length n

  FunctionalSample(Grid g, Eigen::MatrixXd x, Eigen::VectorXd y);

  int n() const { return static_cast<int>(curves.rows()); }
  int p() const { return static_cast<int>(curves.cols()); }
};

// Removes the empirical mean from every curve coordinate and from the
// responses.
FunctionalSample center_sample(const FunctionalSample& sample);

}  // namespace flt
