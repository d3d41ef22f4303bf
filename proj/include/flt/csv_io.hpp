#pragma once

#include <Eigen/Dense>
#include <string>

namespace flt {

// Curves file: first row = grid points, each following row = one curve.
struct CurvesFile {
  Eigen::VectorXd grid_points;
  Eigen::MatrixXd curves;
};

CurvesFile read_curves_csv(const std::string& path);
// Single column, one response per row, aligned with the curves by index.
Eigen::VectorXd read_responses_csv(const std::string& path);

void write_curves_csv(const std::string& path,
                      const Eigen::VectorXd& grid_points,
                      const Eigen::MatrixXd& curves);
void write_responses_csv(const std::string& path, const Eigen::VectorXd& y);

// Writes via a temporary file in the same directory, then renames.
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace flt
