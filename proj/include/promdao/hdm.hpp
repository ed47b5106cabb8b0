// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "promdao/errors.hpp"

namespace promdao {

// Box-bounded design space. Unbounded sides are encoded as +-1e30.
struct DesignSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& mu, double tol = 1e-8) const;
  void validate() const;
};

enum class ParamRole { FluidShape, StructStiffness, StructDamping };

struct HdmConfig {
  int nf = 0;
  int ns = 0;
  DesignSpace space;
  std::uint64_t seed = 0;
  std::vector<ParamRole> roles;
  // Rank of the planted low-dimensional objective structure; -1 selects the
  // default ceil(dim/2).
  int planted_rank = -1;

  void validate() const;
};

// Parametric operators of the linearized FSI system
//   A w' + H w + R u' + G u = 0
//   M u'' + D u' + K u = P w
struct FsiOperators {
  Eigen::MatrixXd A, H, R, G, M, D, K, P;
};

// Block first-order form: calA q' + calB q = 0 with q = [w; u'; u],
//   calA = [A 0 0; 0 M 0; 0 0 M]
//   calB = [H R G; -P D K; 0 -M 0]
struct BlockOperators {
  Eigen::MatrixXd calA, calB;
  int nf = 0;
  int ns = 0;
  int nq() const { return nf + 2 * ns; }
};

BlockOperators assemble_blocks(const FsiOperators& ops);

// ||(lambda * calA + calB) q||_2 for a unit-norm mode q.
double hdm_residual(const BlockOperators& blocks, std::complex<double> lambda,
                    const Eigen::VectorXcd& q);

std::uint64_t hdm_config_digest(const HdmConfig& config);

// Synthetic parametric linearized FSI testbed. Deterministic in the seed:
// fluid block is an upwind convection-diffusion operator, structural blocks
// form a damped spring chain, and the dense coupling blocks are scaled so the
// baseline (mu = 0) least-damped mode sits just above neutral (its damping
// ratio lands in (0, 2 * 4.75e-3)).
class FsiHdm {
 public:
  explicit FsiHdm(HdmConfig config);

  FsiOperators operators(const Eigen::VectorXd& mu) const;
  BlockOperators blocks(const Eigen::VectorXd& mu) const;

  // Smooth rational surrogate objective (maximized by the MDAO problem),
  // carrying a hidden low-rank structure: the objective only varies inside
  // span(planted_basis()).
  double objective(const Eigen::VectorXd& mu, Eigen::VectorXd* grad = nullptr) const;

  // Two surrogate inequality constraints g(mu) <= 0 (quadratic "stress",
  // linear "weight"), feasible at mu = 0 with margin >= 0.1.
  Eigen::VectorXd constraints(const Eigen::VectorXd& mu, Eigen::MatrixXd* jac = nullptr) const;

  const HdmConfig& config() const { return config_; }
  const DesignSpace& space() const { return config_.space; }
  int dim() const { return config_.space.dim(); }
  std::uint64_t digest() const { return digest_; }
  double coupling_gamma0() const { return gamma0_; }
  const Eigen::MatrixXd& planted_basis() const { return planted_basis_; }

 private:
  double fluid_shape_mean(const Eigen::VectorXd& mu) const;
  double struct_damping_mean(const Eigen::VectorXd& mu) const;
  FsiOperators operators_with_gamma(const Eigen::VectorXd& mu, double gamma) const;
  void check_in_bounds(const Eigen::VectorXd& mu) const;

  HdmConfig config_;
  std::uint64_t digest_ = 0;
  std::vector<int> fluid_shape_idx_, stiffness_idx_, damping_idx_;
  Eigen::VectorXd base_stiffness_;     // per spring, in [1, 2]
  std::vector<int> spring_group_;      // spring -> index into stiffness_idx_
  Eigen::MatrixXd coupling_R0_, coupling_G0_, coupling_P0_;
  double gamma0_ = 0.0;

  Eigen::MatrixXd planted_basis_;      // hidden orthonormal V*
  Eigen::VectorXd objective_a_;        // in range(V*)
  Eigen::MatrixXd objective_B_;        // PSD with range(V*)
  Eigen::MatrixXd stress_C_;           // PSD
  Eigen::VectorXd stress_c_;
  Eigen::VectorXd weight_w_;
  double stress_offset_ = 0.0;
  double weight_offset_ = 0.0;
};

}  // namespace promdao
