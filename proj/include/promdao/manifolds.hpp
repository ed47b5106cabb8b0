// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "promdao/errors.hpp"

namespace promdao {

// Result of energy-truncated SVD compression of a snapshot matrix. The basis
// holds the leading left singular vectors; singular_values keeps the full
// numerical-rank spectrum (descending) so callers can report the decay.
struct TruncationResult {
  Eigen::MatrixXd basis;
  int kept_dim = 0;
  Eigen::VectorXd singular_values;
};

// Compresses snapshots to the smallest basis whose tail energy ratio
// sum_{j>n} s_j^2 / sum_j s_j^2 drops to `tolerance` or below. Singular values
// below 1e-14 * s_1 are treated as rank deficiency and excluded from the
// energy sums. Each basis column is sign-fixed so its largest-magnitude entry
// is positive.
TruncationResult truncate_svd(const Eigen::MatrixXd& snapshots, double tolerance);

// Solves min_{Q orthogonal} ||reference - other * Q||_F. Both inputs must have
// orthonormal columns (checked to 1e-8). Q = U * Z^T from the SVD of
// other^T * reference.
Eigen::MatrixXd procrustes(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& other);

struct ManifoldKind {
  enum class Tag { Euclidean, GeneralLinear, Spd };
  Tag tag = Tag::Euclidean;
  int rows = 0;
  int cols = 0;

  static ManifoldKind euclidean(int m, int n) { return {Tag::Euclidean, m, n}; }
  static ManifoldKind general_linear(int n) { return {Tag::GeneralLinear, n, n}; }
  static ManifoldKind spd(int n) { return {Tag::Spd, n, n}; }
};

// Log/Exp maps:
//   Euclidean:  Log_X(Y) = Y - X,                    Exp_X(G) = X + G
//   GL(n):      Log_X(Y) = log(Y X^-1),              Exp_X(G) = exp(G) X
//   SPD(n):     Log_X(Y) = log(X^-1/2 Y X^-1/2),     Exp_X(G) = X^1/2 exp(G) X^1/2
// SPD outputs are symmetrized; SPD tangents are symmetrized before use.
Eigen::MatrixXd manifold_log(const ManifoldKind& kind, const Eigen::MatrixXd& base,
                             const Eigen::MatrixXd& point);
Eigen::MatrixXd manifold_exp(const ManifoldKind& kind, const Eigen::MatrixXd& base,
                             const Eigen::MatrixXd& tangent);

struct EigPairs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // unit-norm columns, conjugate pairs adjacent
};

// Full spectrum of a dense nonsymmetric real matrix. Per-pair residual
// ||M v - lambda v||_2 / ||M||_F <= 1e-8.
EigPairs general_eig(const Eigen::MatrixXd& m);

// Frechet derivative of the matrix exponential at A in direction E, computed
// as the top-right block of exp([[A, E], [0, A]]).
Eigen::MatrixXd exp_frechet(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e);

// Ratio of extreme singular values; +inf for singular input.
double condition_estimate(const Eigen::MatrixXd& m);

bool has_orthonormal_columns(const Eigen::MatrixXd& m, double tol = 1e-8);

// Thin Householder QR orthonormalization with the R-diagonal sign fixed
// positive, so span is preserved and W^T M has positive-diagonal triangular
// form when W = orthonormalize(M).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m);

}  // namespace promdao
