// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/asub.hpp"

#include <cmath>

#include "promdao/manifolds.hpp"
#include "promdao/rng.hpp"

namespace promdao {

namespace {

AsBasis compress_snapshots(const Eigen::MatrixXd& snapshots, double tolerance, int dim_override,
                           AsMethod method) {
  TruncationResult svd = truncate_svd(snapshots, tolerance);
  int kept = svd.kept_dim;
  if (dim_override > 0) {
    kept = std::min(dim_override, static_cast<int>(svd.singular_values.size()));
  }
  AsBasis basis;
  basis.V_mu = svd.basis.leftCols(std::min(kept, static_cast<int>(svd.basis.cols())));
  if (kept > basis.V_mu.cols()) {
    // Override asked for more columns than the energy cut kept; recompute.
    TruncationResult full = truncate_svd(snapshots, 0.0);
    basis.V_mu = full.basis.leftCols(std::min(kept, static_cast<int>(full.basis.cols())));
  }
  basis.n_G = static_cast<int>(basis.V_mu.cols());
  basis.singular_values = svd.singular_values;
  basis.method = method;
  return basis;
}

}  // namespace

AsBasis AsBasis::identity(int dim) {
  AsBasis basis;
  basis.V_mu = Eigen::MatrixXd::Identity(dim, dim);
  basis.n_G = dim;
  basis.singular_values = Eigen::VectorXd::Ones(dim);
  basis.method = AsMethod::None;
  return basis;
}

int classical_sample_count(double alpha, double beta, int dim) {
  require(alpha > 0.0 && beta > 0.0, Errc::InvalidParameter,
          "classical_sample_count: alpha and beta must be positive");
  require(dim >= 2, Errc::InvalidParameter, "classical_sample_count: dim must be >= 2");
  return static_cast<int>(std::ceil(alpha * beta * std::log10(static_cast<double>(dim)) - 1e-9));
}

ClassicalAsResult build_classical_as(const ObjectiveFn& objective, const DesignSpace& space,
                                     double alpha, double beta, double tolerance,
                                     std::uint64_t seed, int dim_override) {
  space.validate();
  const int dim = space.dim();
  const int n_samples = classical_sample_count(alpha, beta, dim);

  // Latin hypercube: per-dimension stratum permutation with midpoint jitter.
  Rng rng(seed);
  Eigen::MatrixXd unit(dim, n_samples);
  for (int d = 0; d < dim; ++d) {
    const std::vector<int> perm = rng.permutation(n_samples);
    for (int s = 0; s < n_samples; ++s) {
      const double jitter = 0.5 * (rng.uniform() - 0.5);
      unit(d, s) = (perm[s] + 0.5 + jitter) / n_samples;
    }
  }

  ClassicalAsResult result;
  result.snapshots.gradients.resize(dim, n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd mu(dim);
    for (int d = 0; d < dim; ++d) {
      mu(d) = space.lower(d) + unit(d, s) * (space.upper(d) - space.lower(d));
    }
    Eigen::VectorXd grad;
    objective(mu, &grad);
    require(grad.size() == dim, Errc::DimensionMismatch,
            "build_classical_as: objective returned a gradient of wrong size");
    result.snapshots.points.push_back(mu);
    result.snapshots.gradients.col(s) = grad;
  }

  result.basis =
      compress_snapshots(result.snapshots.gradients, tolerance, dim_override, AsMethod::Classical);
  return result;
}

AlternativeAsResult build_alternative_as(const AuxiliarySolver& solver,
                                         const Eigen::VectorXd& mu0, double tolerance,
                                         int dim_override) {
  TrajectoryResult run = solver(mu0);
  require(!run.iterates.empty(), Errc::InvalidParameter,
          "build_alternative_as: empty optimization trajectory");
  const int dim = static_cast<int>(mu0.size());
  const int n_inc = static_cast<int>(run.iterates.size()) - 1;

  AlternativeAsResult result;
  result.optimizer_failed = !run.converged;
  result.snapshots.mu0 = mu0;
  result.snapshots.trajectory = run.iterates;
  result.snapshots.increments.resize(dim, n_inc);
  Eigen::MatrixXd stacked(dim, n_inc + 1);
  stacked.col(0) = mu0;
  for (int k = 0; k < n_inc; ++k) {
    result.snapshots.increments.col(k) = run.iterates[k + 1] - run.iterates[k];
    stacked.col(k + 1) = result.snapshots.increments.col(k);
  }

  result.basis = compress_snapshots(stacked, tolerance, dim_override, AsMethod::Alternative);
  return result;
}

Eigen::VectorXd lift(const AsBasis& basis, const Eigen::VectorXd& mu_r) {
  require(mu_r.size() == basis.n_G, Errc::DimensionMismatch,
          "lift: generalized coordinates have wrong dimension");
  return basis.V_mu * mu_r;
}

}  // namespace promdao
