// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/manifolds.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace promdao {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* who) {
  require(m.allFinite(), Errc::InvalidParameter, std::string(who) + ": non-finite entries");
}

// Fix each column's sign so the largest-magnitude entry is positive.
void fix_column_signs(Eigen::MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j) {
    int imax = 0;
    m.col(j).cwiseAbs().maxCoeff(&imax);
    if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
  }
}

// Symmetric eigendecomposition with the positivity checks shared by the SPD
// log/exp paths. Eigenvalues are clamped at 1e-14 * max before fractional
// powers; a raw eigenvalue <= 0 is a manifold violation.
struct SpdEig {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

SpdEig spd_eig(const Eigen::MatrixXd& x, const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (x + x.transpose()));
  require(es.info() == Eigen::Success, Errc::NoConvergence,
          std::string(who) + ": symmetric eigensolver failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  require(lam.minCoeff() > 0.0, Errc::NotOnManifold,
          std::string(who) + ": matrix is not positive definite");
  const double floor = 1e-14 * lam_max;
  for (int i = 0; i < lam.size(); ++i) lam(i) = std::max(lam(i), floor);
  return {es.eigenvectors(), lam};
}

Eigen::MatrixXd spd_power(const SpdEig& e, double p) {
  return e.vectors * e.values.array().pow(p).matrix().asDiagonal() * e.vectors.transpose();
}

void check_spd_input(const ManifoldKind& kind, const Eigen::MatrixXd& x, const char* who) {
  require(x.rows() == kind.rows && x.cols() == kind.cols, Errc::DimensionMismatch,
          std::string(who) + ": SPD operand has wrong dimensions");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  require((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, Errc::NotOnManifold,
          std::string(who) + ": SPD operand is not symmetric");
}

void check_gl_input(const ManifoldKind& kind, const Eigen::MatrixXd& x, const char* who) {
  require(x.rows() == kind.rows && x.cols() == kind.cols, Errc::DimensionMismatch,
          std::string(who) + ": GL operand has wrong dimensions");
  require(condition_estimate(x) < 1e12, Errc::NotOnManifold,
          std::string(who) + ": GL operand is numerically singular");
}

// Principal real matrix logarithm; requires the spectrum to stay off the
// closed negative real axis, which we certify through an eigenvalue sweep
// before delegating to the dense logarithm kernel.
Eigen::MatrixXd real_matrix_log(const Eigen::MatrixXd& z, const char* who) {
  const EigPairs eig = general_eig(z);
  const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < eig.values.size(); ++i) {
    const std::complex<double> lam = eig.values(i);
    if (std::abs(lam.imag()) <= 1e-10 * scale && lam.real() <= 1e-14 * scale) {
      fail(Errc::LogarithmUndefined,
           std::string(who) + ": eigenvalue on the closed negative real axis");
    }
  }
  return z.log();
}

}  // namespace

TruncationResult truncate_svd(const Eigen::MatrixXd& snapshots, double tolerance) {
  require(snapshots.size() > 0, Errc::DimensionMismatch, "truncate_svd: empty snapshot matrix");
  require_finite(snapshots, "truncate_svd");
  require(tolerance >= 0.0, Errc::InvalidParameter, "truncate_svd: negative tolerance");
  require(snapshots.cwiseAbs().maxCoeff() >= 1e-300, Errc::ZeroMatrix,
          "truncate_svd: snapshot matrix is identically zero");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();

  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-14 * sv(0)) ++rank;
  require(rank > 0, Errc::ZeroMatrix, "truncate_svd: numerically zero snapshot matrix");

  double total = 0.0;
  for (int j = 0; j < rank; ++j) total += sv(j) * sv(j);

  int kept = rank;
  double tail = total;
  for (int n = 1; n <= rank; ++n) {
    tail -= sv(n - 1) * sv(n - 1);
    if (tail <= tolerance * total) {
      kept = n;
      break;
    }
  }

  TruncationResult result;
  result.kept_dim = kept;
  result.singular_values = sv.head(rank);
  result.basis = svd.matrixU().leftCols(kept);
  fix_column_signs(result.basis);
  return result;
}

Eigen::MatrixXd procrustes(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& other) {
  require(reference.rows() == other.rows() && reference.cols() == other.cols(),
          Errc::DimensionMismatch, "procrustes: operand dimensions differ");
  require(has_orthonormal_columns(reference), Errc::NonOrthonormalInput,
          "procrustes: reference columns are not orthonormal");
  require(has_orthonormal_columns(other), Errc::NonOrthonormalInput,
          "procrustes: other columns are not orthonormal");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(other.transpose() * reference,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Eigen::MatrixXd manifold_log(const ManifoldKind& kind, const Eigen::MatrixXd& base,
                             const Eigen::MatrixXd& point) {
  require_finite(base, "manifold_log");
  require_finite(point, "manifold_log");
  switch (kind.tag) {
    case ManifoldKind::Tag::Euclidean:
      require(base.rows() == point.rows() && base.cols() == point.cols(), Errc::DimensionMismatch,
              "manifold_log: Euclidean operands differ in shape");
      return point - base;
    case ManifoldKind::Tag::GeneralLinear: {
      check_gl_input(kind, base, "manifold_log");
      check_gl_input(kind, point, "manifold_log");
      // Z = point * base^-1 via the transposed solve Z^T = base^-T point^T.
      const Eigen::MatrixXd z =
          base.transpose().partialPivLu().solve(point.transpose()).transpose();
      return real_matrix_log(z, "manifold_log");
    }
    case ManifoldKind::Tag::Spd: {
      check_spd_input(kind, base, "manifold_log");
      check_spd_input(kind, point, "manifold_log");
      const SpdEig be = spd_eig(base, "manifold_log");
      const Eigen::MatrixXd inv_sqrt = spd_power(be, -0.5);
      const Eigen::MatrixXd s = inv_sqrt * point * inv_sqrt;
      const SpdEig se = spd_eig(s, "manifold_log");
      Eigen::MatrixXd gamma =
          se.vectors * se.values.array().log().matrix().asDiagonal() * se.vectors.transpose();
      return 0.5 * (gamma + gamma.transpose());
    }
  }
  fail(Errc::InvalidParameter, "manifold_log: unknown manifold kind");
}

Eigen::MatrixXd manifold_exp(const ManifoldKind& kind, const Eigen::MatrixXd& base,
                             const Eigen::MatrixXd& tangent) {
  require_finite(base, "manifold_exp");
  require_finite(tangent, "manifold_exp");
  require(base.rows() == tangent.rows() && base.cols() == tangent.cols(), Errc::DimensionMismatch,
          "manifold_exp: tangent dimensions differ from base");
  switch (kind.tag) {
    case ManifoldKind::Tag::Euclidean:
      return base + tangent;
    case ManifoldKind::Tag::GeneralLinear: {
      check_gl_input(kind, base, "manifold_exp");
      return tangent.exp() * base;
    }
    case ManifoldKind::Tag::Spd: {
      check_spd_input(kind, base, "manifold_exp");
      const Eigen::MatrixXd sym_tangent = 0.5 * (tangent + tangent.transpose());
      const SpdEig be = spd_eig(base, "manifold_exp");
      const Eigen::MatrixXd sqrt = spd_power(be, 0.5);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(sym_tangent);
      require(te.info() == Eigen::Success, Errc::NoConvergence,
              "manifold_exp: tangent eigensolver failed");
      const Eigen::MatrixXd exp_t = te.eigenvectors() *
                                    te.eigenvalues().array().exp().matrix().asDiagonal() *
                                    te.eigenvectors().transpose();
      Eigen::MatrixXd y = sqrt * exp_t * sqrt;
      return 0.5 * (y + y.transpose());
    }
  }
  fail(Errc::InvalidParameter, "manifold_exp: unknown manifold kind");
}

EigPairs general_eig(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols(), Errc::DimensionMismatch, "general_eig: matrix is not square");
  require_finite(m, "general_eig");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/true);
  require(es.info() == Eigen::Success, Errc::NoConvergence,
          "general_eig: QR iteration exceeded its budget");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd exp_frechet(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e) {
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols() && e.rows() == n && e.cols() == n, Errc::DimensionMismatch,
          "exp_frechet: operands must be square of equal size");
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a;
  aug.topRightCorner(n, n) = e;
  aug.bottomRightCorner(n, n) = a;
  return aug.exp().topRightCorner(n, n);
}

double condition_estimate(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

bool has_orthonormal_columns(const Eigen::MatrixXd& m, double tol) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  return (gram - Eigen::MatrixXd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), n);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    require(std::abs(r(j, j)) > 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff()),
            Errc::SingularSystem, "orthonormalize: rank-deficient input");
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace promdao
