#include "lpm/linprog.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace lpm {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
  Mat t;                 // rows x (cols + 1); last column is the right-hand side
  Vec obj;               // reduced costs, size cols
  double obj_value = 0;  // current objective = cost_B^T x_B
  std::vector<int> basis;
  int cols = 0;

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    const double f = obj[c];
    if (f != 0.0) {
      obj -= f * t.row(r).head(cols).transpose();
      obj_value += f * t(r, cols);
    }
    basis[r] = c;
  }
};

enum class Outcome { Optimal, Unbounded };

// Minimizes the objective held in tab.obj over columns [0, allowed).
Outcome run_simplex(Tableau& tab, int allowed, double cost_scale) {
  const int rows = static_cast<int>(tab.t.rows());
  const double tol = 1e-10 * std::max(1.0, cost_scale);
  int degenerate_run = 0;
  const int max_pivots = 50 * (rows + allowed) + 1000;
  for (int it = 0; it < max_pivots; ++it) {
    const bool bland = degenerate_run > 2 * rows + 10;
    int enter = -1;
    double best = -tol;
    for (int j = 0; j < allowed; ++j) {
      if (tab.obj[j] < best) {
        enter = j;
        if (bland) break;
        best = tab.obj[j];
      }
    }
    if (enter < 0) return Outcome::Optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      const double a = tab.t(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab.t(i, tab.cols) / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 && leave >= 0 && tab.basis[i] < tab.basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return Outcome::Unbounded;
    degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
    tab.pivot(leave, enter);
  }
  throw ConvergenceError("simplex exceeded its pivot budget");
}

}  // namespace

LpResult maximize(const Vec& c, const Mat& A, const Vec& b) {
  const int d = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  if (A.cols() != d || b.size() != m) throw InvalidArgument("linear program dimensions disagree");

  // Dual standard form rows: sign_i * (A^T y)_i = sign_i * c_i >= 0.
  Vec sign(d);
  for (int i = 0; i < d; ++i) sign[i] = c[i] < 0 ? -1.0 : 1.0;

  Tableau tab;
  tab.cols = m + d;
  tab.t = Mat::Zero(d, tab.cols + 1);
  for (int i = 0; i < d; ++i) {
    tab.t.row(i).head(m) = sign[i] * A.col(i).transpose();
    tab.t(i, m + i) = 1.0;
    tab.t(i, tab.cols) = sign[i] * c[i];
  }
  tab.basis.resize(d);
  for (int i = 0; i < d; ++i) tab.basis[i] = m + i;

  const double a_scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double c_scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  const double b_scale = std::max(1.0, b.cwiseAbs().maxCoeff());

  // Phase 1: minimize the sum of artificials.
  tab.obj = Vec::Zero(tab.cols);
  tab.obj.tail(d).setOnes();
  tab.obj_value = 0.0;
  for (int i = 0; i < d; ++i) {
    tab.obj -= tab.t.row(i).head(tab.cols).transpose();
    tab.obj_value += tab.t(i, tab.cols);
  }
  // obj_value holds -(sum of artificials) in this sign convention.
  run_simplex(tab, m, a_scale);
  double infeas = 0.0;
  for (int i = 0; i < d; ++i)
    if (tab.basis[i] >= m) infeas += tab.t(i, tab.cols);
  LpResult res;
  if (infeas > 1e-9 * c_scale * a_scale) {
    res.status = LpResult::Status::Unbounded;
    return res;
  }
  // Drive zero-level artificials out of the basis where possible.
  for (int i = 0; i < d; ++i) {
    if (tab.basis[i] < m) continue;
    int col = -1;
    for (int j = 0; j < m; ++j)
      if (std::abs(tab.t(i, j)) > 1e-9 * a_scale) {
        col = j;
        break;
      }
    if (col >= 0) tab.pivot(i, col);
  }

  // Phase 2: minimize b^T y over the structural columns.
  Vec cost = Vec::Zero(tab.cols);
  cost.head(m) = b;
  tab.obj = cost;
  tab.obj_value = 0.0;
  for (int i = 0; i < d; ++i) {
    const double cb = cost[tab.basis[i]];
    if (cb != 0.0) {
      tab.obj -= cb * tab.t.row(i).head(tab.cols).transpose();
      tab.obj_value += cb * tab.t(i, tab.cols);
    }
  }
  if (run_simplex(tab, m, b_scale) == Outcome::Unbounded) {
    res.status = LpResult::Status::Infeasible;
    return res;
  }

  // Multipliers pi^T = c_B^T B^{-1}; B^{-1} sits in the artificial block.
  Vec cb(d);
  for (int i = 0; i < d; ++i) cb[i] = cost[tab.basis[i]];
  const Mat binv = tab.t.block(0, m, d, d);
  const Vec pi = binv.transpose() * cb;
  res.x = sign.cwiseProduct(pi);
  res.value = c.dot(res.x);
  res.status = LpResult::Status::Optimal;
  return res;
}

}  // namespace lpm
