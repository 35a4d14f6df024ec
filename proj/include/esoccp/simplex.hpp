#pragma once

#include <Eigen/Dense>
#include <optional>

namespace esoccp {
namespace detail {

struct LpSolution {
    bool feasible = false;
    Eigen::VectorXd x;
    double objective = 0.0;
};

/// Two-phase primal simplex for  min c^T x  s.t.  A x = b, x >= 0.
/// Bland's rule, dense; meant for the small feasibility programs that
/// back the regularity checks (a handful of rows).
LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c, int max_pivots = 5000);

} // namespace detail
} // namespace esoccp
