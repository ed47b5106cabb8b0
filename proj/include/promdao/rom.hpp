// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "promdao/hdm.hpp"

namespace promdao {

enum class Projection { Galerkin, PetrovGalerkin };

// Mass-orthonormalized low-frequency modal basis: V_u^T M V_u = I and
// V_u^T K V_u = diag(frequencies^2).
struct StructRob {
  Eigen::MatrixXd V_u;
  Eigen::VectorXd frequencies;  // ascending
};

struct FluidRob {
  Eigen::MatrixXd V_w;
  Eigen::MatrixXd W_w;
  Projection projection = Projection::Galerkin;
  Eigen::VectorXd singular_values;
  int n_snapshots = 0;
};

// Reduced tuple {calA_r, calB_r} in the block layout
//   calA_r = [W'AV 0 0; 0 I 0; 0 0 I]
//   calB_r = [W'HV W'RVu W'GVu; -Vu'PV Vu'DVu Omega^2; 0 -I 0]
struct PromTuple {
  Eigen::MatrixXd calA_r, calB_r;
  int nf = 0;
  int ns = 0;
  int nq() const { return nf + 2 * ns; }

  Eigen::MatrixXd A_r() const { return calA_r.topLeftCorner(nf, nf); }
  Eigen::MatrixXd H_r() const { return calB_r.topLeftCorner(nf, nf); }
  Eigen::MatrixXd R_r() const { return calB_r.block(0, nf, nf, ns); }
  Eigen::MatrixXd G_r() const { return calB_r.block(0, nf + ns, nf, ns); }
  Eigen::MatrixXd P_r() const { return -calB_r.block(nf, 0, ns, nf); }
  Eigen::MatrixXd D_r() const { return calB_r.block(nf, nf, ns, ns); }
  Eigen::MatrixXd Omega2_r() const { return calB_r.block(nf, nf + ns, ns, ns); }

  // Builds the tuple from operator blocks with exact zero/identity filler.
  static PromTuple from_blocks(const Eigen::MatrixXd& a_r, const Eigen::MatrixXd& h_r,
                               const Eigen::MatrixXd& r_r, const Eigen::MatrixXd& g_r,
                               const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& d_r,
                               const Eigen::MatrixXd& omega2_r);
};

// One database record: the tuple, its generalized-coordinates point mu_r, the
// lifted design point mu, and the ROB blocks needed for reconstruction and
// consistency.
struct PromEntry {
  Eigen::VectorXd mu_r;
  Eigen::VectorXd mu;
  PromTuple tuple;
  Eigen::MatrixXd V_w, V_u, W_w;
  Projection projection = Projection::Galerkin;
};

// Lowest ns_keep modes of K phi = omega^2 M phi, mass-orthonormalized, each
// column sign-fixed so its largest-magnitude entry is positive.
StructRob build_structural_rob(const FsiOperators& ops, int ns_keep);

// Frequency-sweep fluid snapshots: for every structural mode u_m and sweep
// frequency kappa_l solves (i kappa_l A + H) w = -(i kappa_l R + G) u_m,
// stacks real and imaginary parts (2 n_s N_l columns) and compresses with
// truncate_svd, capped at nf_keep columns. Galerkin left basis initially.
FluidRob build_fluid_rob(const FsiOperators& ops, const StructRob& struct_rob,
                         const Eigen::VectorXd& freqs, int nf_keep, double svd_tol);

// Keeps the Galerkin projection when spec(V_w' H V_w) lies in the right half
// plane; otherwise switches to the Petrov-Galerkin left basis
// W_w = orthonormalize(H V_w), which makes W_w' H V_w upper triangular with a
// positive diagonal.
FluidRob stabilize_left_rob(const FsiOperators& ops, FluidRob rob);

PromTuple assemble_prom(const FsiOperators& ops, const FluidRob& fluid,
                        const StructRob& struct_rob);

// Congruence-aligns every entry with the reference through block-wise
// orthogonal Procrustes (one rotation for the fluid block, one shared by the
// two structural blocks), rotating tuples and ROB blocks together.
void enforce_consistency(std::vector<PromEntry>& entries, int ref_index);

}  // namespace promdao
