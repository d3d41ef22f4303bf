#include "flt/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace flt {

Grid::Grid(Eigen::VectorXd pts, Eigen::VectorXd wts)
    : points(std::move(pts)), weights(std::move(wts)) {
  const auto p = points.size();
  if (p < 2) throw std::invalid_argument("Grid: need at least 2 points");
  if (weights.size() != p)
    throw std::invalid_argument("Grid: points/weights length mismatch");
  for (Eigen::Index i = 0; i + 1 < p; ++i)
    if (!(points(i) < points(i + 1)))
      throw std::invalid_argument("Grid: points must be strictly increasing");
  if ((weights.array() <= 0.0).any())
    throw std::invalid_argument("Grid: weights must be positive");
  const double len = points(p - 1) - points(0);
  if (std::fabs(weights.sum() - len) > 1e-12 * std::max(1.0, len))
    throw std::invalid_argument("Grid: weights do not sum to the domain length");
}

Grid Grid::from_points(Eigen::VectorXd pts) {
  const auto p = pts.size();
  if (p < 2) throw std::invalid_argument("Grid: need at least 2 points");
  Eigen::VectorXd w(p);
  w(0) = 0.5 * (pts(1) - pts(0));
  for (Eigen::Index i = 1; i + 1 < p; ++i) w(i) = 0.5 * (pts(i + 1) - pts(i - 1));
  w(p - 1) = 0.5 * (pts(p - 1) - pts(p - 2));
  return Grid(std::move(pts), std::move(w));
}

Grid Grid::uniform(int p, double a, double b) {
  if (p < 2) throw std::invalid_argument("Grid: need at least 2 points");
  return from_points(Eigen::VectorXd::LinSpaced(p, a, b));
}

double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                     const Grid& grid) {
  if (f.size() != grid.points.size() || g.size() != grid.points.size())
    throw std::invalid_argument("inner_product: length mismatch with grid");
  return (f.array() * g.array() * grid.weights.array()).sum();
}

}  // namespace flt
