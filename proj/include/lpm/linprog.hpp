#pragma once

#include "lpm/types.hpp"

namespace lpm {

struct LpResult {
  enum class Status { Optimal, Unbounded, Infeasible };
  Status status = Status::Infeasible;
  Vec x;
  double value = 0.0;

  bool optimal() const { return status == Status::Optimal; }
};

/// maximize c^T x subject to A x <= b with x free.
///
/// Solved through its dual standard form (min b^T y, A^T y = c, y >= 0) by a
/// two-phase dense tableau simplex, so the tableau has one row per variable.
/// Dantzig pricing, falling back to Bland's rule after a run of degenerate pivots.
/// `Unbounded` is reported when the dual is infeasible; callers that cannot
/// rule out primal infeasibility must check feasibility separately.
LpResult maximize(const Vec& c, const Mat& A, const Vec& b);

}  // namespace lpm
