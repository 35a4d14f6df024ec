#include "esoccp/simplex.hpp"

#include <numeric>
#include <vector>

namespace esoccp {
namespace detail {

namespace {

constexpr double kPivEps = 1e-10;

// Tableau simplex on  min c^T x, A x = b, x >= 0  with an explicit basis.
// Returns false when max_pivots is exhausted (treated as infeasible upstream).
bool run_simplex(Eigen::MatrixXd& tab, std::vector<int>& basis, int n_vars, int max_pivots) {
    const int m = static_cast<int>(tab.rows()) - 1;
    for (int pivots = 0; pivots < max_pivots; ++pivots) {
        // Bland: entering variable = lowest index with negative reduced cost.
        int enter = -1;
        for (int j = 0; j < n_vars; ++j) {
            if (tab(m, j) < -kPivEps) { enter = j; break; }
        }
        if (enter < 0) return true;

        int leave = -1;
        double best = 0.0;
        for (int i = 0; i < m; ++i) {
            const double a = tab(i, enter);
            if (a > kPivEps) {
                const double ratio = tab(i, n_vars) / a;
                if (leave < 0 || ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
        }
        if (leave < 0) return false; // unbounded; cannot happen for our feasibility LPs

        tab.row(leave) /= tab(leave, enter);
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = tab(i, enter);
            if (f != 0.0) tab.row(i) -= f * tab.row(leave);
        }
        basis[leave] = enter;
    }
    return false;
}

} // namespace

LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                    int max_pivots) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());

    // Phase 1 with artificial variables; flip rows so b >= 0.
    Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    for (int i = 0; i < m; ++i) {
        const double s = (b(i) < 0.0) ? -1.0 : 1.0;
        tab.block(i, 0, 1, n) = s * A.row(i);
        tab(i, n + i) = 1.0;
        tab(i, n + m) = s * b(i);
    }
    std::vector<int> basis(m);
    std::iota(basis.begin(), basis.end(), n);
    for (int j = 0; j < n + m; ++j)
        tab(m, j) = (j >= n) ? 1.0 : 0.0;
    // Price out the artificial basis.
    for (int i = 0; i < m; ++i) tab.row(m) -= tab.row(i);

    LpSolution sol;
    if (!run_simplex(tab, basis, n + m, max_pivots)) return sol;
    if (tab(m, n + m) < -1e-7) return sol; // phase-1 optimum should be ~0 when feasible
    if (std::abs(tab(m, n + m)) > 1e-7) return sol;

    // Drive any artificial variables out of the basis if possible.
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab(i, j)) > kPivEps) { enter = j; break; }
        }
        if (enter < 0) continue; // redundant row
        tab.row(i) /= tab(i, enter);
        for (int r = 0; r <= m; ++r) {
            if (r == i) continue;
            const double f = tab(r, enter);
            if (f != 0.0) tab.row(r) -= f * tab.row(i);
        }
        basis[i] = enter;
    }

    // Phase 2: replace the objective row, forbid artificials.
    Eigen::MatrixXd tab2 = Eigen::MatrixXd::Zero(m + 1, n + 1);
    tab2.block(0, 0, m, n) = tab.block(0, 0, m, n);
    tab2.col(n).head(m) = tab.col(n + m).head(m);
    for (int j = 0; j < n; ++j) tab2(m, j) = c(j);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) tab2.row(m) -= c(basis[i]) * tab2.row(i);
    }
    if (!run_simplex(tab2, basis, n, max_pivots)) return sol;

    sol.feasible = true;
    sol.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) sol.x(basis[i]) = tab2(i, n);
    }
    sol.objective = c.dot(sol.x);
    return sol;
}

} // namespace detail
} // namespace esoccp
