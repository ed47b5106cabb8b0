// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "promdao/database.hpp"
#include "promdao/manifolds.hpp"

namespace promdao {

enum class RbfKernel { ThinPlate, Gaussian };

struct RbfConfig {
  RbfKernel kernel = RbfKernel::ThinPlate;
  double shape = 1.0;           // Gaussian shape parameter
  double regularization = 1e-12;  // ridge on the kernel matrix
};

// Vector-valued RBF interpolant over scattered centers. The thin-plate kernel
// r^2 log(r) carries an affine polynomial tail (constant tail when there are
// fewer centers than dim+1), so affine fields are reproduced exactly.
class RbfModel {
 public:
  RbfModel(std::vector<Eigen::VectorXd> centers, const Eigen::MatrixXd& values,
           RbfConfig config = {});

  Eigen::VectorXd evaluate(const Eigen::VectorXd& query) const;
  // d(outputs)/d(query): dim x n_outputs.
  Eigen::MatrixXd gradient(const Eigen::VectorXd& query) const;

  int n_outputs() const { return static_cast<int>(coefficients_.cols()); }

 private:
  std::vector<Eigen::VectorXd> centers_;
  RbfConfig config_;
  int tail_dim_ = 0;
  Eigen::MatrixXd coefficients_;  // (N + tail) x Q
};

// One step of manifold interpolation: log everything at the reference entry,
// interpolate tangent matrices entry-by-entry, exp back.
Eigen::MatrixXd interpolate_block(const std::vector<Eigen::MatrixXd>& values,
                                  const ManifoldKind& kind, int ref_index,
                                  const std::vector<Eigen::VectorXd>& centers,
                                  const Eigen::VectorXd& query, const RbfConfig& config = {});

// Block manifold assignment for the reduced tuple.
struct BlockManifoldMap {
  ManifoldKind fluid_a, fluid_h;      // GL(n_f)
  ManifoldKind coupling_r, coupling_g;  // Euclidean n_f x n_s
  ManifoldKind coupling_p;            // Euclidean n_s x n_f
  ManifoldKind struct_d, struct_omega2;  // SPD(n_s)

  static BlockManifoldMap standard(int nf, int ns);
};

// Caches the tangent logs and RBF coefficients of a consistent database so
// repeated queries only pay for evaluation.
class TupleInterpolator {
 public:
  explicit TupleInterpolator(const PromDatabase& db, RbfConfig config = {});

  PromTuple tuple(const Eigen::VectorXd& query) const;

  // d(calA_r)/d(mu_r[j]) and d(calB_r)/d(mu_r[j]) for j = 1..n_G, through the
  // Frechet derivative of the exponential map for GL/SPD blocks.
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> sensitivities(
      const Eigen::VectorXd& query) const;

  int n_entries() const { return static_cast<int>(centers_.size()); }
  int query_dim() const { return dim_; }
  int nf() const { return nf_; }
  int ns() const { return ns_; }

 private:
  struct Block {
    ManifoldKind kind;
    Eigen::MatrixXd ref;
    Eigen::MatrixXd ref_sqrt;  // SPD only
    std::vector<RbfModel> model;  // empty for constant databases
  };

  Eigen::MatrixXd block_value(const Block& block, const Eigen::VectorXd& query) const;
  Eigen::MatrixXd block_derivative(const Block& block, const Eigen::VectorXd& query,
                                   int coord) const;

  std::vector<Eigen::VectorXd> centers_;
  int dim_ = 0, nf_ = 0, ns_ = 0;
  std::vector<Block> blocks_;  // A, H, R, G, P, D, Omega2
};

PromTuple interpolate_tuple(const PromDatabase& db, const Eigen::VectorXd& query,
                            const RbfConfig& config = {});

std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> tuple_sensitivities(
    const PromDatabase& db, const Eigen::VectorXd& query, const RbfConfig& config = {});

}  // namespace promdao
