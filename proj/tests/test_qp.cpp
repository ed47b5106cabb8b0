#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "promdao/qp.hpp"
#include "promdao/rng.hpp"
#include "test_util.hpp"

using namespace promdao;
using testing::random_spd;

namespace {

// Exhaustive active-set enumeration oracle for small strictly convex QPs.
std::optional<Eigen::VectorXd> enumeration_oracle(const qp::Problem& pb) {
  const int n = static_cast<int>(pb.G.rows());
  const int p = static_cast<int>(pb.CE.cols());
  const int m = static_cast<int>(pb.CI.cols());
  std::optional<Eigen::VectorXd> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int j = 0; j < m; ++j) {
      if (mask & (1 << j)) act.push_back(j);
    }
    const int q = p + static_cast<int>(act.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + q, n + q);
    Eigen::VectorXd rhs(n + q);
    kkt.topLeftCorner(n, n) = pb.G;
    rhs.head(n) = -pb.g0;
    Eigen::MatrixXd nmat(n, q);
    Eigen::VectorXd bvec(q);
    for (int i = 0; i < p; ++i) {
      nmat.col(i) = pb.CE.col(i);
      bvec(i) = pb.ce(i);
    }
    for (std::size_t k = 0; k < act.size(); ++k) {
      nmat.col(p + static_cast<int>(k)) = pb.CI.col(act[k]);
      bvec(p + static_cast<int>(k)) = pb.ci(act[k]);
    }
    if (q > 0) {
      kkt.topRightCorner(n, q) = -nmat;
      kkt.bottomLeftCorner(q, n) = nmat.transpose();
      rhs.tail(q) = bvec;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    bool ok = true;
    for (std::size_t k = 0; k < act.size(); ++k) {
      if (sol(n + p + static_cast<int>(k)) < -1e-9) ok = false;  // multiplier sign
    }
    for (int j = 0; j < m && ok; ++j) {
      if (pb.CI.col(j).dot(x) < pb.ci(j) - 1e-9) ok = false;  // primal feasibility
    }
    for (int i = 0; i < p && ok; ++i) {
      if (std::abs(pb.CE.col(i).dot(x) - pb.ce(i)) > 1e-9) ok = false;
    }
    if (!ok) continue;
    const double obj = 0.5 * x.dot(pb.G * x) + pb.g0.dot(x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

qp::Problem box_projection(const Eigen::VectorXd& target, double lo, double hi) {
  const int n = static_cast<int>(target.size());
  qp::Problem pb;
  pb.G = Eigen::MatrixXd::Identity(n, n);
  pb.g0 = -target;
  pb.CE.resize(n, 0);
  pb.ce.resize(0);
  pb.CI.resize(n, 2 * n);
  pb.ci.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    pb.CI.col(i) = Eigen::VectorXd::Unit(n, i);         // x_i >= lo
    pb.ci(i) = lo;
    pb.CI.col(n + i) = -Eigen::VectorXd::Unit(n, i);    // -x_i >= -hi
    pb.ci(n + i) = -hi;
  }
  return pb;
}

}  // namespace

TEST_CASE("box projection clamps the target") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd target = 3.0 * rng.normal_vector(4);
    const qp::Result res = qp::solve(box_projection(target, -1.0, 1.0));
    REQUIRE(res.status == qp::Status::Optimal);
    for (int i = 0; i < 4; ++i) {
      CHECK(res.x(i) == doctest::Approx(std::clamp(target(i), -1.0, 1.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("equality-constrained minimum norm") {
  qp::Problem pb;
  pb.G = Eigen::MatrixXd::Identity(3, 3);
  pb.g0 = Eigen::VectorXd::Zero(3);
  pb.CE.resize(3, 1);
  pb.CE.col(0) = Eigen::Vector3d(1.0, 2.0, 2.0);
  pb.ce.resize(1);
  pb.ce(0) = 9.0;
  pb.CI.resize(3, 0);
  pb.ci.resize(0);
  const qp::Result res = qp::solve(pb);
  REQUIRE(res.status == qp::Status::Optimal);
  // x = a * b / ||a||^2 = (1,2,2) * 9/9
  CHECK((res.x - Eigen::Vector3d(1.0, 2.0, 2.0)).cwiseAbs().maxCoeff() < 1e-10);
  // Stationarity: x = CE * lambda.
  CHECK((res.x - pb.CE * res.eq_multipliers).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conflicting halfspaces are infeasible") {
  qp::Problem pb;
  pb.G = Eigen::MatrixXd::Identity(2, 2);
  pb.g0 = Eigen::VectorXd::Zero(2);
  pb.CE.resize(2, 0);
  pb.ce.resize(0);
  pb.CI.resize(2, 2);
  pb.CI.col(0) = Eigen::Vector2d(1.0, 0.0);   // x0 >= 1
  pb.CI.col(1) = Eigen::Vector2d(-1.0, 0.0);  // x0 <= 0
  pb.ci.resize(2);
  pb.ci << 1.0, 0.0;
  CHECK(qp::solve(pb).status == qp::Status::Infeasible);
}

TEST_CASE("equality incompatible with the box is infeasible") {
  qp::Problem pb = box_projection(Eigen::VectorXd::Zero(3), -1.0, 1.0);
  pb.CE.resize(3, 1);
  pb.CE.col(0) = Eigen::Vector3d(1.0, 0.0, 0.0);
  pb.ce.resize(1);
  pb.ce(0) = 2.0;  // x0 = 2 conflicts with x0 <= 1
  CHECK(qp::solve(pb).status == qp::Status::Infeasible);
}

TEST_CASE("random problems match the enumeration oracle") {
  Rng rng(7);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3;
    const int m = 5;
    qp::Problem pb;
    pb.G = random_spd(rng, n, 0.5);
    pb.g0 = rng.normal_vector(n);
    pb.CI = rng.normal_matrix(n, m);
    pb.ci = rng.normal_vector(m) - Eigen::VectorXd::Constant(m, 0.5);
    if (trial % 3 == 0) {
      pb.CE = rng.normal_matrix(n, 1);
      pb.ce = 0.3 * rng.normal_vector(1);
    } else {
      pb.CE.resize(n, 0);
      pb.ce.resize(0);
    }
    const auto oracle = enumeration_oracle(pb);
    const qp::Result res = qp::solve(pb);
    if (!oracle.has_value()) {
      CHECK(res.status != qp::Status::Optimal);
      continue;
    }
    ++solved;
    REQUIRE(res.status == qp::Status::Optimal);
    CHECK((res.x - *oracle).cwiseAbs().maxCoeff() < 1e-7);
    // KKT stationarity with the returned multipliers.
    Eigen::VectorXd grad = pb.G * res.x + pb.g0;
    if (pb.CE.cols() > 0) grad -= pb.CE * res.eq_multipliers;
    grad -= pb.CI * res.ineq_multipliers;
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, pb.g0.norm()));
    CHECK(res.ineq_multipliers.minCoeff() >= -1e-12);
    // Complementarity.
    for (int j = 0; j < m; ++j) {
      const double slack = pb.CI.col(j).dot(res.x) - pb.ci(j);
      CHECK(std::abs(res.ineq_multipliers(j) * slack) < 1e-7);
    }
  }
  CHECK(solved > 30);  // the family is mostly feasible
}

TEST_CASE("solver is deterministic") {
  Rng rng(9);
  const qp::Problem pb = box_projection(2.0 * rng.normal_vector(5), -0.7, 0.7);
  const qp::Result a = qp::solve(pb);
  const qp::Result b = qp::solve(pb);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.iterations == b.iterations);
}
