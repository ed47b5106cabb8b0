// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "promdao/hdm.hpp"

namespace promdao {

enum class AsMethod { None, Classical, Alternative };

// Active-subspace ROB V_mu for the design parameters: mu ~ V_mu * mu_r.
struct AsBasis {
  Eigen::MatrixXd V_mu;  // N_D x n_G, orthonormal columns
  int n_G = 0;
  Eigen::VectorXd singular_values;
  AsMethod method = AsMethod::None;

  static AsBasis identity(int dim);
};

struct GradientSnapshotSet {
  std::vector<Eigen::VectorXd> points;
  Eigen::MatrixXd gradients;  // N_D x N_S
};

struct IncrementSnapshotSet {
  Eigen::VectorXd mu0;
  Eigen::MatrixXd increments;  // N_D x (N_S - 1), column k = traj[k+1] - traj[k]
  std::vector<Eigen::VectorXd> trajectory;
};

// ceil(alpha * beta * log10(dim)) gradient samples for the classical method.
int classical_sample_count(double alpha, double beta, int dim);

using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct ClassicalAsResult {
  AsBasis basis;
  GradientSnapshotSet snapshots;
};

// Latin-hypercube gradient sampling over the box followed by energy-truncated
// SVD compression. dim_override, when positive, forces the retained dimension
// (capped at the numerical rank).
ClassicalAsResult build_classical_as(const ObjectiveFn& objective, const DesignSpace& space,
                                     double alpha, double beta, double tolerance,
                                     std::uint64_t seed, int dim_override = -1);

struct TrajectoryResult {
  std::vector<Eigen::VectorXd> iterates;
  bool converged = false;
};

using AuxiliarySolver = std::function<TrajectoryResult(const Eigen::VectorXd&)>;

struct AlternativeAsResult {
  AsBasis basis;
  IncrementSnapshotSet snapshots;
  bool optimizer_failed = false;  // partial snapshots retained when set
};

// Runs the auxiliary optimization from mu0, stacks [mu0, dmu^0, dmu^1, ...]
// and compresses the increment snapshot matrix.
AlternativeAsResult build_alternative_as(const AuxiliarySolver& solver,
                                         const Eigen::VectorXd& mu0, double tolerance,
                                         int dim_override = -1);

Eigen::VectorXd lift(const AsBasis& basis, const Eigen::VectorXd& mu_r);

}  // namespace promdao
