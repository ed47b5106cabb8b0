// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/rom.hpp"

#include <cmath>
#include <complex>

#include "promdao/manifolds.hpp"

namespace promdao {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* who) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, Errc::NotSpd,
          std::string(who) + ": matrix is not symmetric");
}

void fix_column_signs(Eigen::MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j) {
    int imax = 0;
    m.col(j).cwiseAbs().maxCoeff(&imax);
    if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
  }
}

}  // namespace

PromTuple PromTuple::from_blocks(const Eigen::MatrixXd& a_r, const Eigen::MatrixXd& h_r,
                                 const Eigen::MatrixXd& r_r, const Eigen::MatrixXd& g_r,
                                 const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& d_r,
                                 const Eigen::MatrixXd& omega2_r) {
  const int nf = static_cast<int>(a_r.rows());
  const int ns = static_cast<int>(d_r.rows());
  require(a_r.cols() == nf && h_r.rows() == nf && h_r.cols() == nf, Errc::DimensionMismatch,
          "PromTuple: fluid blocks");
  require(r_r.rows() == nf && r_r.cols() == ns && g_r.rows() == nf && g_r.cols() == ns,
          Errc::DimensionMismatch, "PromTuple: coupling blocks");
  require(p_r.rows() == ns && p_r.cols() == nf && d_r.cols() == ns && omega2_r.rows() == ns &&
              omega2_r.cols() == ns,
          Errc::DimensionMismatch, "PromTuple: structural blocks");

  PromTuple tuple;
  tuple.nf = nf;
  tuple.ns = ns;
  const int nq = tuple.nq();
  tuple.calA_r = Eigen::MatrixXd::Zero(nq, nq);
  tuple.calA_r.topLeftCorner(nf, nf) = a_r;
  tuple.calA_r.block(nf, nf, ns, ns).setIdentity();
  tuple.calA_r.block(nf + ns, nf + ns, ns, ns).setIdentity();

  tuple.calB_r = Eigen::MatrixXd::Zero(nq, nq);
  tuple.calB_r.topLeftCorner(nf, nf) = h_r;
  tuple.calB_r.block(0, nf, nf, ns) = r_r;
  tuple.calB_r.block(0, nf + ns, nf, ns) = g_r;
  tuple.calB_r.block(nf, 0, ns, nf) = -p_r;
  tuple.calB_r.block(nf, nf, ns, ns) = d_r;
  tuple.calB_r.block(nf, nf + ns, ns, ns) = omega2_r;
  tuple.calB_r.block(nf + ns, nf, ns, ns) = -Eigen::MatrixXd::Identity(ns, ns);
  return tuple;
}

StructRob build_structural_rob(const FsiOperators& ops, int ns_keep) {
  const int ns = static_cast<int>(ops.M.rows());
  require(ns_keep >= 1 && ns_keep <= ns, Errc::InvalidParameter,
          "build_structural_rob: ns_keep out of range");
  check_symmetric(ops.M, "build_structural_rob");
  check_symmetric(ops.K, "build_structural_rob");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(ops.K, ops.M);
  require(ges.info() == Eigen::Success, Errc::NotSpd,
          "build_structural_rob: generalized eigensolver failed (M not SPD?)");
  require(ges.eigenvalues().minCoeff() > 0.0, Errc::NotSpd,
          "build_structural_rob: K is not positive definite");

  StructRob rob;
  rob.V_u = ges.eigenvectors().leftCols(ns_keep);  // already M-orthonormal
  fix_column_signs(rob.V_u);
  rob.frequencies = ges.eigenvalues().head(ns_keep).cwiseSqrt();
  return rob;
}

FluidRob build_fluid_rob(const FsiOperators& ops, const StructRob& struct_rob,
                         const Eigen::VectorXd& freqs, int nf_keep, double svd_tol) {
  const int nf = static_cast<int>(ops.A.rows());
  const int n_modes = static_cast<int>(struct_rob.V_u.cols());
  const int n_freq = static_cast<int>(freqs.size());
  require(n_freq >= 1, Errc::InvalidParameter, "build_fluid_rob: empty frequency sweep");
  for (int l = 0; l < n_freq; ++l) {
    require(freqs(l) >= 0.0, Errc::InvalidParameter, "build_fluid_rob: negative frequency");
    for (int m = 0; m < l; ++m) {
      require(std::abs(freqs(l) - freqs(m)) > 1e-12, Errc::InvalidParameter,
              "build_fluid_rob: duplicate sweep frequency");
    }
  }
  require(nf_keep >= 1 && nf_keep <= 2 * n_modes * n_freq, Errc::InvalidParameter,
          "build_fluid_rob: nf_keep must be in [1, 2 n_s N_l]");

  Eigen::MatrixXd snapshots(nf, 2 * n_modes * n_freq);
  const std::complex<double> im(0.0, 1.0);
  int col = 0;
  for (int l = 0; l < n_freq; ++l) {
    const double kappa = freqs(l);
    const Eigen::MatrixXcd lhs = im * kappa * ops.A + ops.H;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
    const Eigen::VectorXcd udiag = lu.matrixLU().diagonal();
    const double umax = udiag.cwiseAbs().maxCoeff();
    require(umax > 0.0 && udiag.cwiseAbs().minCoeff() > 1e-14 * umax, Errc::SingularSystem,
            "build_fluid_rob: (i kappa A + H) is numerically singular");
    for (int m = 0; m < n_modes; ++m) {
      const Eigen::VectorXcd rhs =
          -(im * kappa * ops.R + ops.G) * struct_rob.V_u.col(m).cast<std::complex<double>>();
      const Eigen::VectorXcd w = lu.solve(rhs);
      snapshots.col(col++) = w.real();
      snapshots.col(col++) = w.imag();
    }
  }

  const TruncationResult svd = truncate_svd(snapshots, svd_tol);
  const int kept = std::min(svd.kept_dim, nf_keep);

  FluidRob rob;
  rob.V_w = svd.basis.leftCols(kept);
  rob.W_w = rob.V_w;
  rob.projection = Projection::Galerkin;
  rob.singular_values = svd.singular_values.head(kept);
  rob.n_snapshots = 2 * n_modes * n_freq;
  return rob;
}

FluidRob stabilize_left_rob(const FsiOperators& ops, FluidRob rob) {
  const Eigen::MatrixXd reduced = rob.V_w.transpose() * (ops.H * rob.V_w);
  const EigPairs eig = general_eig(reduced);
  if (eig.values.real().minCoeff() > 0.0) {
    rob.W_w = rob.V_w;
    rob.projection = Projection::Galerkin;
    return rob;
  }
  rob.W_w = orthonormalize(ops.H * rob.V_w);
  rob.projection = Projection::PetrovGalerkin;
  const EigPairs post = general_eig(rob.W_w.transpose() * (ops.H * rob.V_w));
  require(post.values.real().minCoeff() > 0.0, Errc::NoConvergence,
          "stabilize_left_rob: fallback failed to stabilize the reduced fluid block");
  return rob;
}

PromTuple assemble_prom(const FsiOperators& ops, const FluidRob& fluid,
                        const StructRob& struct_rob) {
  const int nf_full = static_cast<int>(ops.A.rows());
  require(fluid.V_w.rows() == nf_full && fluid.W_w.rows() == nf_full &&
              fluid.V_w.cols() == fluid.W_w.cols(),
          Errc::DimensionMismatch, "assemble_prom: fluid ROB dimensions");
  require(struct_rob.V_u.rows() == ops.M.rows(), Errc::DimensionMismatch,
          "assemble_prom: structural ROB dimensions");

  const Eigen::MatrixXd& v = fluid.V_w;
  const Eigen::MatrixXd& w = fluid.W_w;
  const Eigen::MatrixXd& vu = struct_rob.V_u;
  const Eigen::VectorXd omega2 = struct_rob.frequencies.array().square();
  return PromTuple::from_blocks(w.transpose() * (ops.A * v), w.transpose() * (ops.H * v),
                                w.transpose() * (ops.R * vu), w.transpose() * (ops.G * vu),
                                vu.transpose() * (ops.P * v), vu.transpose() * (ops.D * vu),
                                Eigen::MatrixXd(omega2.asDiagonal()));
}

void enforce_consistency(std::vector<PromEntry>& entries, int ref_index) {
  require(!entries.empty(), Errc::EmptyDatabase, "enforce_consistency: no entries");
  require(ref_index >= 0 && ref_index < static_cast<int>(entries.size()), Errc::InvalidParameter,
          "enforce_consistency: reference index out of range");
  const PromEntry& ref = entries[ref_index];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    PromEntry& e = entries[i];
    require(e.tuple.nf == ref.tuple.nf && e.tuple.ns == ref.tuple.ns, Errc::DimensionMismatch,
            "enforce_consistency: entries have mixed reduced dimensions");
    if (static_cast<int>(i) == ref_index) continue;

    const Eigen::MatrixXd q_w = procrustes(ref.V_w, e.V_w);
    const Eigen::MatrixXd q_u = procrustes(ref.V_u, e.V_u);

    e.V_w = e.V_w * q_w;
    e.W_w = e.W_w * q_w;
    e.V_u = e.V_u * q_u;
    e.tuple = PromTuple::from_blocks(
        q_w.transpose() * e.tuple.A_r() * q_w, q_w.transpose() * e.tuple.H_r() * q_w,
        q_w.transpose() * e.tuple.R_r() * q_u, q_w.transpose() * e.tuple.G_r() * q_u,
        q_u.transpose() * e.tuple.P_r() * q_w, q_u.transpose() * e.tuple.D_r() * q_u,
        q_u.transpose() * e.tuple.Omega2_r() * q_u);
  }
}

}  // namespace promdao
