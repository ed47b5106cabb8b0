// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "promdao/errors.hpp"

namespace promdao::qp {

// Strictly convex quadratic program
//   min 1/2 x^T G x + g0^T x
//   s.t. CE^T x  = ce   (equality normals in CE columns)
//        CI^T x >= ci   (inequality normals in CI columns)
// solved with the Goldfarb-Idnani dual active-set method: start at the
// unconstrained minimum, add the most violated constraint, and take primal /
// dual steps until primal feasibility. Needs no feasible starting point and
// certifies infeasibility through an unbounded dual ray.
struct Problem {
  Eigen::MatrixXd G;
  Eigen::VectorXd g0;
  Eigen::MatrixXd CE;
  Eigen::VectorXd ce;
  Eigen::MatrixXd CI;
  Eigen::VectorXd ci;
};

enum class Status { Optimal, Infeasible, IterationLimit };

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;  // >= 0, zero for inactive constraints
  double objective = 0.0;
  int iterations = 0;
};

// max_iter <= 0 selects 10 * (n + m + p) + 100.
Result solve(const Problem& problem, int max_iter = 0);

}  // namespace promdao::qp
