// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/hdm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "promdao/manifolds.hpp"
#include "promdao/rng.hpp"

namespace promdao {

namespace {

// Damping-ratio target used to calibrate the baseline coupling strength.
constexpr double kZetaRef = 4.75e-3;

// Least-damped modal damping ratio of calA q' + calB q = 0, from the spectrum
// of N = calA^-1 calB (a mode decays when Re(eig(N)) > 0).
double min_damping_ratio(const BlockOperators& blocks) {
  const Eigen::MatrixXd n_op = blocks.calA.partialPivLu().solve(blocks.calB);
  const EigPairs eig = general_eig(n_op);
  double zmin = 1.0;
  for (int i = 0; i < eig.values.size(); ++i) {
    const double mag = std::abs(eig.values(i));
    if (mag < 1e-14 * n_op.norm()) continue;
    zmin = std::min(zmin, eig.values(i).real() / mag);
  }
  return zmin;
}

void digest_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;  // FNV-1a
  }
}

template <typename T>
void digest_value(std::uint64_t& h, const T& v) {
  digest_bytes(h, &v, sizeof(T));
}

}  // namespace

bool DesignSpace::contains(const Eigen::VectorXd& mu, double tol) const {
  if (mu.size() != lower.size()) return false;
  for (int i = 0; i < mu.size(); ++i) {
    const double slack = tol * std::max(1.0, upper(i) - lower(i));
    if (mu(i) < lower(i) - slack || mu(i) > upper(i) + slack) return false;
  }
  return true;
}

void DesignSpace::validate() const {
  require(lower.size() == upper.size() && lower.size() > 0, Errc::InvalidConfig,
          "design space bounds have inconsistent dimensions");
  require(lower.allFinite() && upper.allFinite(), Errc::InvalidConfig,
          "design space bounds must be finite (use +-1e30 for unbounded)");
  for (int i = 0; i < lower.size(); ++i) {
    require(lower(i) < upper(i), Errc::InvalidConfig, "design space has an empty interval");
  }
}

void HdmConfig::validate() const {
  space.validate();
  require(nf >= 4 * ns && ns >= 1, Errc::InvalidConfig, "requires nf >= 4*ns and ns >= 1");
  require(static_cast<int>(roles.size()) == space.dim(), Errc::InvalidConfig,
          "one parameter role per design dimension required");
  int n_shape = 0, n_stiff = 0, n_damp = 0;
  for (ParamRole r : roles) {
    if (r == ParamRole::FluidShape) ++n_shape;
    if (r == ParamRole::StructStiffness) ++n_stiff;
    if (r == ParamRole::StructDamping) ++n_damp;
  }
  require(n_shape >= 1 && n_stiff >= 1 && n_damp >= 1, Errc::InvalidConfig,
          "at least one parameter per role required");
  for (int i = 0; i < space.dim(); ++i) {
    if (roles[i] != ParamRole::FluidShape) {
      require(space.lower(i) > -0.99, Errc::InvalidConfig,
              "structural parameter lower bound must stay above -0.99");
    }
  }
  require(planted_rank == -1 || (planted_rank >= 1 && planted_rank <= space.dim()),
          Errc::InvalidConfig, "planted_rank out of range");
}

BlockOperators assemble_blocks(const FsiOperators& ops) {
  const int nf = static_cast<int>(ops.A.rows());
  const int ns = static_cast<int>(ops.M.rows());
  require(ops.A.cols() == nf && ops.H.rows() == nf && ops.H.cols() == nf, Errc::DimensionMismatch,
          "assemble_blocks: fluid blocks");
  require(ops.R.rows() == nf && ops.R.cols() == ns && ops.G.rows() == nf && ops.G.cols() == ns,
          Errc::DimensionMismatch, "assemble_blocks: coupling blocks");
  require(ops.M.cols() == ns && ops.D.rows() == ns && ops.D.cols() == ns && ops.K.rows() == ns &&
              ops.K.cols() == ns,
          Errc::DimensionMismatch, "assemble_blocks: structural blocks");
  require(ops.P.rows() == ns && ops.P.cols() == nf, Errc::DimensionMismatch,
          "assemble_blocks: P block");

  BlockOperators blocks;
  blocks.nf = nf;
  blocks.ns = ns;
  const int nq = blocks.nq();
  blocks.calA = Eigen::MatrixXd::Zero(nq, nq);
  blocks.calA.topLeftCorner(nf, nf) = ops.A;
  blocks.calA.block(nf, nf, ns, ns) = ops.M;
  blocks.calA.block(nf + ns, nf + ns, ns, ns) = ops.M;

  blocks.calB = Eigen::MatrixXd::Zero(nq, nq);
  blocks.calB.topLeftCorner(nf, nf) = ops.H;
  blocks.calB.block(0, nf, nf, ns) = ops.R;
  blocks.calB.block(0, nf + ns, nf, ns) = ops.G;
  blocks.calB.block(nf, 0, ns, nf) = -ops.P;
  blocks.calB.block(nf, nf, ns, ns) = ops.D;
  blocks.calB.block(nf, nf + ns, ns, ns) = ops.K;
  blocks.calB.block(nf + ns, nf, ns, ns) = -ops.M;
  return blocks;
}

double hdm_residual(const BlockOperators& blocks, std::complex<double> lambda,
                    const Eigen::VectorXcd& q) {
  require(q.size() == blocks.nq(), Errc::DimensionMismatch, "hdm_residual: mode size");
  require(std::abs(q.norm() - 1.0) <= 1e-12, Errc::InvalidParameter,
          "hdm_residual: mode must be unit norm");
  return (lambda * (blocks.calA * q) + blocks.calB * q).norm();
}

std::uint64_t hdm_config_digest(const HdmConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  digest_value(h, config.nf);
  digest_value(h, config.ns);
  digest_value(h, config.seed);
  digest_value(h, config.planted_rank);
  const int dim = config.space.dim();
  digest_value(h, dim);
  for (int i = 0; i < dim; ++i) {
    digest_value(h, config.space.lower(i));
    digest_value(h, config.space.upper(i));
    digest_value(h, static_cast<int>(config.roles[i]));
  }
  return h;
}

FsiHdm::FsiHdm(HdmConfig config) : config_(std::move(config)) {
  config_.validate();
  digest_ = hdm_config_digest(config_);

  const int dim = config_.space.dim();
  for (int i = 0; i < dim; ++i) {
    switch (config_.roles[i]) {
      case ParamRole::FluidShape: fluid_shape_idx_.push_back(i); break;
      case ParamRole::StructStiffness: stiffness_idx_.push_back(i); break;
      case ParamRole::StructDamping: damping_idx_.push_back(i); break;
    }
  }

  Rng rng(config_.seed);
  base_stiffness_ = Eigen::VectorXd(config_.ns);
  spring_group_.resize(config_.ns);
  for (int i = 0; i < config_.ns; ++i) {
    base_stiffness_(i) = rng.uniform(1.0, 2.0);
    spring_group_[i] = i % static_cast<int>(stiffness_idx_.size());
  }
  const double fluid_scale = 1.0 / std::sqrt(static_cast<double>(config_.nf));
  coupling_R0_ = fluid_scale * rng.normal_matrix(config_.nf, config_.ns);
  coupling_G0_ = fluid_scale * rng.normal_matrix(config_.nf, config_.ns);
  coupling_P0_ = fluid_scale * rng.normal_matrix(config_.ns, config_.nf);

  const int r_eff = config_.planted_rank > 0 ? config_.planted_rank : (dim + 1) / 2;
  planted_basis_ = orthonormalize(rng.normal_matrix(dim, r_eff));
  Eigen::VectorXd alpha = rng.normal_vector(r_eff);
  objective_a_ = planted_basis_ * (alpha / alpha.norm());
  Eigen::VectorXd beta(r_eff);
  for (int i = 0; i < r_eff; ++i) beta(i) = rng.uniform(0.3, 1.0);
  objective_B_ = planted_basis_ * beta.asDiagonal() * planted_basis_.transpose();

  const Eigen::MatrixXd l = rng.normal_matrix(dim, dim);
  stress_C_ = 0.5 * (l * l.transpose()) / dim;
  stress_c_ = 0.05 * rng.normal_vector(dim);
  Eigen::VectorXd w = rng.normal_vector(dim);
  weight_w_ = w / w.norm();
  stress_offset_ = 0.4;
  weight_offset_ = 0.3;

  // Calibrate gamma0 so the baseline least-damped mode is nearly critical.
  const Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(dim);
  double gamma_lo = 0.0;
  double zeta_lo = min_damping_ratio(assemble_blocks(operators_with_gamma(mu0, 0.0)));
  require(zeta_lo > 2.0 * kZetaRef, Errc::InvalidConfig,
          "uncoupled baseline is already near flutter; adjust config");
  double gamma_hi = 1e-3;
  double zeta_hi = zeta_lo;
  bool bracketed = false;
  for (int k = 0; k < 48; ++k) {
    zeta_hi = min_damping_ratio(assemble_blocks(operators_with_gamma(mu0, gamma_hi)));
    if (zeta_hi <= kZetaRef) {
      bracketed = true;
      break;
    }
    gamma_lo = gamma_hi;
    zeta_lo = zeta_hi;
    gamma_hi *= 1.6;
  }
  require(bracketed, Errc::InvalidConfig, "coupling calibration failed to reach the target band");
  double zeta_mid = zeta_hi;
  double gamma_mid = gamma_hi;
  for (int it = 0; it < 60 && (zeta_mid <= 0.5 * kZetaRef || zeta_mid >= 1.5 * kZetaRef); ++it) {
    gamma_mid = 0.5 * (gamma_lo + gamma_hi);
    zeta_mid = min_damping_ratio(assemble_blocks(operators_with_gamma(mu0, gamma_mid)));
    if (zeta_mid > kZetaRef) {
      gamma_lo = gamma_mid;
    } else {
      gamma_hi = gamma_mid;
    }
  }
  require(zeta_mid > 0.0 && zeta_mid < 2.0 * kZetaRef, Errc::InvalidConfig,
          "coupling calibration did not land in (0, 2*zeta_ref)");
  gamma0_ = gamma_mid;
}

double FsiHdm::fluid_shape_mean(const Eigen::VectorXd& mu) const {
  double s = 0.0;
  for (int i : fluid_shape_idx_) s += mu(i);
  return s / static_cast<double>(fluid_shape_idx_.size());
}

double FsiHdm::struct_damping_mean(const Eigen::VectorXd& mu) const {
  double s = 0.0;
  for (int i : damping_idx_) s += mu(i);
  return s / static_cast<double>(damping_idx_.size());
}

FsiOperators FsiHdm::operators_with_gamma(const Eigen::VectorXd& mu, double gamma) const {
  require(mu.size() == dim(), Errc::DimensionMismatch, "operators: wrong parameter dimension");
  require(mu.allFinite(), Errc::InvalidParameter, "operators: non-finite parameter point");
  const int nf = config_.nf;
  const int ns = config_.ns;
  const double s_f = fluid_shape_mean(mu);

  FsiOperators ops;
  // Upwind 1D convection-diffusion on a uniform grid over [0, 1 + 0.2 s_f].
  const double length = 1.0 + 0.2 * s_f;
  const double h = length / nf;
  const double conv = (1.0 + 0.3 * s_f) / h;
  const double diff = 0.05 / (h * h);
  ops.A = h * Eigen::MatrixXd::Identity(nf, nf);
  ops.H = Eigen::MatrixXd::Zero(nf, nf);
  for (int i = 0; i < nf; ++i) {
    ops.H(i, i) = conv + 2.0 * diff;
    if (i > 0) ops.H(i, i - 1) = -conv - diff;
    if (i + 1 < nf) ops.H(i, i + 1) = -diff;
  }

  ops.M = Eigen::MatrixXd::Identity(ns, ns);
  Eigen::VectorXd k(ns);  // spring i connects mass i to mass i-1 (0 = ground)
  for (int i = 0; i < ns; ++i) {
    k(i) = base_stiffness_(i) * (1.0 + mu(stiffness_idx_[spring_group_[i]]));
    require(k(i) > 0.0, Errc::InvalidConfig, "nonpositive spring stiffness");
  }
  ops.K = Eigen::MatrixXd::Zero(ns, ns);
  for (int i = 0; i < ns; ++i) {
    ops.K(i, i) = k(i) + (i + 1 < ns ? k(i + 1) : 0.0);
    if (i + 1 < ns) {
      ops.K(i, i + 1) = -k(i + 1);
      ops.K(i + 1, i) = -k(i + 1);
    }
  }
  const double d_coef = 0.02 * (1.0 + struct_damping_mean(mu));
  require(d_coef > 0.0, Errc::InvalidConfig, "nonpositive damping coefficient");
  ops.D = 0.01 * ops.K + d_coef * ops.M;

  ops.R = gamma * coupling_R0_;
  ops.G = gamma * coupling_G0_;
  ops.P = gamma * coupling_P0_;
  return ops;
}

FsiOperators FsiHdm::operators(const Eigen::VectorXd& mu) const {
  const double gamma = gamma0_ * (1.0 + 0.5 * fluid_shape_mean(mu));
  return operators_with_gamma(mu, gamma);
}

BlockOperators FsiHdm::blocks(const Eigen::VectorXd& mu) const {
  return assemble_blocks(operators(mu));
}

void FsiHdm::check_in_bounds(const Eigen::VectorXd& mu) const {
  require(config_.space.contains(mu), Errc::OutOfBounds,
          "parameter point violates the design-space box");
}

double FsiHdm::objective(const Eigen::VectorXd& mu, Eigen::VectorXd* grad) const {
  require(mu.size() == dim(), Errc::DimensionMismatch, "objective: wrong parameter dimension");
  check_in_bounds(mu);
  const double num = 1.0 + objective_a_.dot(mu);
  const Eigen::VectorXd bmu = objective_B_ * mu;
  const double den = 1.0 + mu.dot(bmu);
  const double f = num / den;
  if (grad) {
    *grad = (objective_a_ * den - num * 2.0 * bmu) / (den * den);
  }
  return f;
}

Eigen::VectorXd FsiHdm::constraints(const Eigen::VectorXd& mu, Eigen::MatrixXd* jac) const {
  require(mu.size() == dim(), Errc::DimensionMismatch, "constraints: wrong parameter dimension");
  check_in_bounds(mu);
  Eigen::VectorXd g(2);
  const Eigen::VectorXd cmu = stress_C_ * mu;
  g(0) = mu.dot(cmu) + stress_c_.dot(mu) - stress_offset_;
  g(1) = weight_w_.dot(mu) - weight_offset_;
  if (jac) {
    jac->resize(2, dim());
    jac->row(0) = (2.0 * cmu + stress_c_).transpose();
    jac->row(1) = weight_w_.transpose();
  }
  return g;
}

}  // namespace promdao
