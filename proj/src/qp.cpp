// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace promdao::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  const Problem* pb = nullptr;
  Eigen::LLT<Eigen::MatrixXd> llt;
  int n = 0, p = 0, m = 0;

  Eigen::VectorXd ginv(const Eigen::VectorXd& b) const { return llt.solve(b); }

  // id < p: equality id; otherwise inequality id - p.
  Eigen::VectorXd normal(int id) const {
    return id < p ? pb->CE.col(id) : pb->CI.col(id - p);
  }
  double bound(int id) const { return id < p ? pb->ce(id) : pb->ci(id - p); }
};

// Primal step z and dual step r for candidate normal np against the active
// normals N: z = H np with H the reduced inverse Hessian, r = S^-1 N^T G^-1 np.
void step_directions(const Workspace& ws, const std::vector<int>& active,
                     const Eigen::VectorXd& np, Eigen::VectorXd& z, Eigen::VectorXd& r) {
  const Eigen::VectorXd gin = ws.ginv(np);
  const int q = static_cast<int>(active.size());
  if (q == 0) {
    z = gin;
    r.resize(0);
    return;
  }
  Eigen::MatrixXd n_act(ws.n, q), ginv_n(ws.n, q);
  for (int k = 0; k < q; ++k) {
    n_act.col(k) = ws.normal(active[k]);
    ginv_n.col(k) = ws.ginv(n_act.col(k));
  }
  const Eigen::MatrixXd s = n_act.transpose() * ginv_n;
  r = s.ldlt().solve(n_act.transpose() * gin);
  z = gin - ginv_n * r;
}

}  // namespace

Result solve(const Problem& problem, int max_iter) {
  Workspace ws;
  ws.pb = &problem;
  ws.n = static_cast<int>(problem.G.rows());
  ws.p = static_cast<int>(problem.CE.cols());
  ws.m = static_cast<int>(problem.CI.cols());
  require(problem.G.cols() == ws.n && problem.g0.size() == ws.n, Errc::DimensionMismatch,
          "qp::solve: objective dimensions");
  require(problem.ce.size() == ws.p && (ws.p == 0 || problem.CE.rows() == ws.n),
          Errc::DimensionMismatch, "qp::solve: equality dimensions");
  require(problem.ci.size() == ws.m && (ws.m == 0 || problem.CI.rows() == ws.n),
          Errc::DimensionMismatch, "qp::solve: inequality dimensions");
  ws.llt.compute(problem.G);
  require(ws.llt.info() == Eigen::Success, Errc::InvalidParameter,
          "qp::solve: G is not positive definite");
  if (max_iter <= 0) max_iter = 10 * (ws.n + ws.p + ws.m) + 100;

  Result res;
  res.x = -ws.ginv(problem.g0);
  std::vector<int> active;
  std::vector<double> u;

  const auto finish = [&](Status status) {
    res.status = status;
    res.objective = 0.5 * res.x.dot(problem.G * res.x) + problem.g0.dot(res.x);
    res.eq_multipliers = Eigen::VectorXd::Zero(ws.p);
    res.ineq_multipliers = Eigen::VectorXd::Zero(ws.m);
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (active[k] < ws.p) {
        res.eq_multipliers(active[k]) = u[k];
      } else {
        res.ineq_multipliers(active[k] - ws.p) = u[k];
      }
    }
    return res;
  };

  // Phase 1: install the equality constraints.
  for (int i = 0; i < ws.p; ++i) {
    const Eigen::VectorXd np = ws.normal(i);
    Eigen::VectorXd z, r;
    step_directions(ws, active, np, z, r);
    const double slack = ws.bound(i) - np.dot(res.x);
    const double gin_scale = std::max(np.dot(ws.ginv(np)), 1e-300);
    if (np.dot(z) <= 1e-13 * gin_scale) {
      // Linearly dependent on the current active set.
      if (std::abs(slack) <= 1e-10 * std::max(1.0, std::abs(ws.bound(i)))) continue;
      return finish(Status::Infeasible);
    }
    const double t = slack / np.dot(z);
    res.x += t * z;
    for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t * r(static_cast<int>(k));
    active.push_back(i);
    u.push_back(t);
  }

  // Phase 2: dual active-set iteration over the inequalities.
  while (true) {
    // Most violated inequality, ties to the lowest index.
    int worst = -1;
    double worst_slack = -1e-11;
    for (int j = 0; j < ws.m; ++j) {
      bool is_active = false;
      for (int id : active) {
        if (id == ws.p + j) {
          is_active = true;
          break;
        }
      }
      if (is_active) continue;
      const double scale = std::max(1.0, problem.CI.col(j).norm());
      const double slack = (problem.CI.col(j).dot(res.x) - problem.ci(j)) / scale;
      if (slack < worst_slack) {
        worst_slack = slack;
        worst = j;
      }
    }
    if (worst < 0) return finish(Status::Optimal);

    const Eigen::VectorXd np = problem.CI.col(worst);
    double u_plus = 0.0;
    while (true) {
      if (++res.iterations > max_iter) return finish(Status::IterationLimit);
      Eigen::VectorXd z, r;
      step_directions(ws, active, np, z, r);

      double t1 = kInf;
      int drop = -1;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (active[k] < ws.p) continue;  // equalities are never dropped
        if (r(static_cast<int>(k)) > 1e-12) {
          const double step = u[k] / r(static_cast<int>(k));
          if (step < t1) {
            t1 = step;
            drop = static_cast<int>(k);
          }
        }
      }

      const double gin_scale = std::max(np.dot(ws.ginv(np)), 1e-300);
      const double znp = np.dot(z);
      const bool z_nonzero = znp > 1e-13 * gin_scale;
      const double t2 = z_nonzero ? (problem.ci(worst) - np.dot(res.x)) / znp : kInf;

      const double t = std::min(t1, t2);
      if (t == kInf) return finish(Status::Infeasible);  // unbounded dual ray

      if (!z_nonzero) {
        // Dual-only step; drop the blocking constraint and retry.
        for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t * r(static_cast<int>(k));
        u_plus += t;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
        continue;
      }

      res.x += t * z;
      for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t * r(static_cast<int>(k));
      u_plus += t;
      if (t == t2) {
        active.push_back(ws.p + worst);
        u.push_back(u_plus);
        break;
      }
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }
}

}  // namespace promdao::qp
