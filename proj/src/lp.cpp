#include "omrav/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "omrav/error.hpp"

namespace omrav {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows 0..m-1 are constraints (last column = rhs); row m is the
// reduced-cost row of the current phase.
class Tableau {
public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(t_.cols()) - 1; }

  // Loads cost vector `c` (size = number of structural columns) and prices
  // out the basic columns.
  void set_cost(const Eigen::VectorXd& c) {
    const int m = rows();
    t_.row(m).setZero();
    t_.row(m).head(c.size()) = c.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = t_(m, basis_[i]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  // Bland's rule over columns [0, allowed_cols). Returns false if unbounded.
  bool optimize(int allowed_cols) {
    const int m = rows();
    for (int iter = 0; iter < 10000; ++iter) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j)
        if (t_(m, j) < -1e-12) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) {
          const double ratio = t_(i, rhs_col()) / a;
          if (ratio < best_ratio - 1e-14 ||
              (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error(ErrorKind::DomainError, "simplex iteration limit reached");
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < t_.rows(); ++i)
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    basis_[r] = c;
  }

  double value() const { return -t_(rows(), rhs_col()); }
  double rhs(int i) const { return t_(i, rhs_col()); }
  double at(int i, int j) const { return t_(i, j); }
  int basic(int i) const { return basis_[i]; }

  void drop_row(int r) {
    const int n = static_cast<int>(t_.rows());
    Eigen::MatrixXd next(n - 1, t_.cols());
    for (int i = 0, k = 0; i < n; ++i)
      if (i != r) next.row(k++) = t_.row(i);
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
  }

private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  const int m_ub_in = static_cast<int>(lp.a_ub.rows());

  // Shift x = lower + y, y >= 0; finite upper bounds become extra rows.
  std::vector<int> upper_rows;
  for (int j = 0; j < n; ++j)
    if (std::isfinite(lp.upper(j))) upper_rows.push_back(j);
  const int m_ub = m_ub_in + static_cast<int>(upper_rows.size());
  const int m = m_eq + m_ub;

  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  if (m_eq > 0) {
    a.topRows(m_eq) = lp.a_eq;
    b.head(m_eq) = lp.b_eq - lp.a_eq * lp.lower;
  }
  if (m_ub_in > 0) {
    a.middleRows(m_eq, m_ub_in) = lp.a_ub;
    b.segment(m_eq, m_ub_in) = lp.b_ub - lp.a_ub * lp.lower;
  }
  for (std::size_t k = 0; k < upper_rows.size(); ++k) {
    const int r = m_eq + m_ub_in + static_cast<int>(k);
    a.row(r).setZero();
    a(r, upper_rows[k]) = 1.0;
    b(r) = lp.upper(upper_rows[k]) - lp.lower(upper_rows[k]);
  }

  // Columns: y (n) | slacks (m_ub) | artificials (as needed) | rhs.
  std::vector<int> needs_artificial;
  for (int i = 0; i < m; ++i)
    if (i < m_eq || b(i) < 0.0) needs_artificial.push_back(i);
  const int n_art = static_cast<int>(needs_artificial.size());
  const int cols = n + m_ub + n_art + 1;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(m, -1);
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    if (i >= m_eq) t(i, n + (i - m_eq)) = sign;
    t(i, cols - 1) = sign * b(i);
    if (i >= m_eq && sign > 0.0) basis[i] = n + (i - m_eq);
  }
  for (int k = 0; k < n_art; ++k) {
    const int i = needs_artificial[k];
    t(i, n + m_ub + k) = 1.0;
    basis[i] = n + m_ub + k;
  }

  Tableau tab(std::move(t), std::move(basis));
  const int structural = n + m_ub;

  // Phase 1: minimize the sum of artificials.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(structural + n_art);
  phase1.tail(n_art).setOnes();
  tab.set_cost(phase1);
  tab.optimize(structural + n_art);
  const double scale = 1.0 + (b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  LpResult result;
  if (tab.value() > 1e-9 * scale) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive remaining artificials out of the basis; drop redundant rows.
  for (int i = tab.rows() - 1; i >= 0; --i) {
    if (tab.basic(i) < structural) continue;
    int col = -1;
    for (int j = 0; j < structural; ++j)
      if (std::abs(tab.at(i, j)) > 1e-9) {
        col = j;
        break;
      }
    if (col >= 0) tab.pivot(i, col); else tab.drop_row(i);
  }

  // Phase 2 over structural columns only.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(structural + n_art);
  phase2.head(n) = lp.c;
  tab.set_cost(phase2);
  if (!tab.optimize(structural)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < tab.rows(); ++i)
    if (tab.basic(i) < n) y(tab.basic(i)) = tab.rhs(i);
  result.status = LpStatus::Optimal;
  result.x = lp.lower + y;
  result.objective = lp.c.dot(result.x);
  return result;
}

}  // namespace omrav
