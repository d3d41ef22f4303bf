#pragma once

#include <Eigen/Dense>

#include "flt/grid.hpp"
#include "flt/rng.hpp"

namespace flt {

// Covariance eigen-system of the input process, discretized on a grid.
// Curves are simulated from the truncated Karhunen-Loeve expansion
// X = sum_{j<=J} sqrt(lambda_j) eta^(j) V_j with standard normal scores.
struct ProcessSpec {
  Grid grid;
  Eigen::VectorXd lambdas;  // J, positive nonincreasing
  Eigen::MatrixXd basis;    // J x p, quadrature-orthonormal rows

  // Brownian motion on [0,1]: lambda_j = ((j-0.5) pi)^-2,
  // V_j(t) = sqrt(2) sin((j-0.5) pi t).
  static ProcessSpec brownian(Grid grid, int truncation = 100);
  static ProcessSpec custom(Grid grid, Eigen::VectorXd lambdas,
                            Eigen::MatrixXd basis);

  int truncation() const { return static_cast<int>(lambdas.size()); }
};

// n simulated curves (rows) on the process grid. Row i consumes the draws
// i*J .. (i+1)*J-1 of the stream.
Eigen::MatrixXd simulate_design(const ProcessSpec& process, int n,
                                RngStream stream);

// Slope with eigenbasis coefficients proportional to j^(-xi-0.5) over the
// truncation, normalized so that b is exactly its L2 norm.
Eigen::VectorXd make_theta_kl(double b, double xi, const ProcessSpec& process);

// Gaussian bump of width tau centered at 1/2, normalized to L2 norm b.
Eigen::VectorXd make_theta_g(double b, double tau, const Grid& grid);

struct SlopeSpec {
  enum class Family { zero, kl, gauss, custom };
  Family family = Family::zero;
  double b = 0.0;
  double xi = 0.0;
  double tau = 0.0;
  Eigen::VectorXd values;  // custom only

  static SlopeSpec zero() { return {}; }
  static SlopeSpec kl(double b, double xi);
  static SlopeSpec gauss(double b, double tau);
  static SlopeSpec custom(Eigen::VectorXd values);
};

Eigen::VectorXd slope_on_grid(const SlopeSpec& slope,
                              const ProcessSpec& process);

// sum_{j>k} lambda_j <theta, V_j>^2: the part of the signal energy the
// k-dimensional projection cannot see. Analytic coefficients for the KL
// family, quadrature against the process basis otherwise.
double bias_term(const ProcessSpec& process, const SlopeSpec& slope, int k);

}  // namespace flt
