#include "flt/sample.hpp"

#include <stdexcept>

namespace flt {

FunctionalSample::FunctionalSample(Grid g, Eigen::MatrixXd x, Eigen::VectorXd y)
    : grid(std::move(g)), curves(std::move(x)), responses(std::move(y)) {
  if (curves.cols() != grid.points.size())
    throw std::invalid_argument("FunctionalSample: curves do not match the grid");
  if (curves.rows() < 4)
    throw std::invalid_argument("FunctionalSample: need n >= 4 observations");
  if (responses.size() != curves.rows())
    throw std::invalid_argument("FunctionalSample: responses/curves length mismatch");
  if (!curves.allFinite() || !responses.allFinite())
    throw std::invalid_argument("FunctionalSample: non-finite entries");
}

FunctionalSample center_sample(const FunctionalSample& sample) {
  Eigen::MatrixXd x = sample.curves;
  x.rowwise() -= x.colwise().mean();
  Eigen::VectorXd y = sample.responses.array() - sample.responses.mean();
  return FunctionalSample(sample.grid, std::move(x), std::move(y));
}

}  // namespace flt
