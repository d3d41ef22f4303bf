#pragma once

#include <Eigen/Dense>

#include "flt/sample.hpp"

namespace flt {

// Empirical Karhunen-Loeve basis: eigenpairs of the empirical covariance
// operator G h = (1/n) sum_i <X_i,h> X_i under the grid inner product.
//
// eigenvalues holds the full spectrum (descending, min(n,p) entries), so the
// numerical rank and the trace identity refer to the whole operator;
// eigenfunctions and scores are truncated to the requested number of
// components.
struct FpcaResult {
  Eigen::VectorXd eigenvalues;    // nonincreasing, >= 0, full spectrum
  Eigen::MatrixXd eigenfunctions; // r_keep x p, quadrature-orthonormal rows
  int rank = 0;                   // #{ lambda_j > lambda_1 * 1e-12 }
  Eigen::MatrixXd scores;         // n x r_keep, scores(i,j) = <X_i, V_j>

  int components() const { return static_cast<int>(eigenfunctions.rows()); }
};

constexpr double kRankRelTol = 1e-12;

// Functional PCA of the (not re-centered) sample. Diagonalizes the n x n
// Gram matrix <X_i,X_l>/n when p > n, otherwise the symmetrized weighted
// p x p covariance; the two routes agree (see tests). Keeps at most
// max_components eigenpairs.
//
// Sign convention: each eigenfunction is flipped so that its coordinate of
// largest weighted magnitude is positive, ties broken by smallest index.
FpcaResult fpca(const FunctionalSample& sample, int max_components);

}  // namespace flt
