#pragma once

#include <Eigen/Dense>

namespace omrav {

/// Dense linear program
///   minimize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper
/// with finite lower bounds (upper may be +inf).
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Two-phase tableau simplex with Bland's anti-cycling rule. Intended for the
/// small problems of rotor allocation (tens of rows and columns).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace omrav
