#pragma once

#include <Eigen/Dense>

namespace flt {

// Discretization of the curve domain: strictly increasing points plus
// positive quadrature weights. The weights define the inner product
// <f,g> = sum_i w_i f(t_i) g(t_i) used everywhere in the library.
struct Grid {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  // two-point unit grid; placeholder so plan/process types stay aggregates
  Grid() : points(Eigen::Vector2d{0.0, 1.0}), weights(Eigen::Vector2d{0.5, 0.5}) {}
  Grid(Eigen::VectorXd pts, Eigen::VectorXd wts);

  // Trapezoid weights from the point spacing.
  static Grid from_points(Eigen::VectorXd pts);
  // p evenly spaced points on [a,b], trapezoid weights.
  static Grid uniform(int p, double a = 0.0, double b = 1.0);

  int size() const { return static_cast<int>(points.size()); }
  double length() const { return points(points.size() - 1) - points(0); }
};

double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                     const Grid& grid);

}  // namespace flt
