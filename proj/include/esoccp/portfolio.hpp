#pragma once

#include "esoccp/cones.hpp"

#include <cstdint>
#include <vector>

namespace esoccp {

/// Scenario return data: R holds one column per scenario (n assets x T
/// scenarios), f the scenario probabilities, c0 the risk-aversion weight.
struct PortfolioInstance {
    Matrix R;
    Vector f;
    double c0 = 1.0;

    // Derived on construction.
    Vector r;       // mean return, R f
    double r_bar = 0.0;
    Matrix U;       // deviations R_j - r, one column per scenario
    Vector u_norms; // ||U_j||

    PortfolioInstance(Matrix R_, Vector f_, double c0_);

    int assets() const { return static_cast<int>(R.rows()); }
    int scenarios() const { return static_cast<int>(R.cols()); }

    /// sum_j f_j ||R_j - r||, the mean scenario deviation.
    double mean_deviation() const { return f.dot(u_norms); }
};

/// Closed-form mean-variance weights with risk aversion c0:
/// w = (2 c0 Sigma)^-1 (r - (e^T Sigma^-1 r / e^T Sigma^-1 e) e) + Sigma^-1 e / (e^T Sigma^-1 e).
Vector mv_solve(const Vector& r, const Matrix& sigma, double c0);

struct MadResult {
    Vector w;
    bool converged = false;
    int iterations = 0;
};

/// Fixed-point iteration of the mean-absolute-deviation weights; |U_j^T w|
/// is floored at 1e-8 to keep B well defined at kinks.  Requires T >= n.
MadResult mad_iterate(const PortfolioInstance& inst, const Vector& w0, int max_iter = 500,
                      double tol = 1e-10);

struct MenFeasibility {
    bool iv_ok = false;   // 1 - ||r - rbar e||^2 / (c0 sum f_j ||R_j - r||)^2 > 0
    double iv_value = 0.0;
    bool iii_ok = false;  // rbar + (c0 sum f_j ||R_j - r||)^2 - ||r||^2 >= 0
    double iii_value = 0.0;
};

MenFeasibility men_feasibility(const PortfolioInstance& inst);

struct MenInfeasible : std::runtime_error {
    double iv_value;
    explicit MenInfeasible(double v)
        : std::runtime_error("men_solve: instance infeasible"), iv_value(v) {}
};

struct MenSolution {
    Vector w;
    Vector y; // y_j = ||U_j|| ||w||
    bool feasible = false;
    double kkt_residual = 0.0;
};

/// Analytical mean-Euclidean-norm weights
///   w = (r - rbar e)/sqrt(n ((c0 sum f_j ||R_j - r||)^2 - ||r - rbar e||^2)) + e/n
/// with the KKT residual of the conic optimality system evaluated at the
/// recovered multipliers.  Throws MenInfeasible when the radicand is not
/// positive.
MenSolution men_solve(const PortfolioInstance& inst);

struct ExperimentRow {
    int n = 0;
    int T = 0;
    double c0 = 0.0;
    int trials = 0;
    double rate_iv = 0.0;  // empirical rate of the item-(iv) inequality
    double rate_iii = 0.0; // empirical rate of the item-(iii) inequality
};

/// Monte-Carlo hold-rates of the two feasibility inequalities over random
/// instances (R entries uniform on [0,1], f a normalized uniform draw).
/// Per-trial seeds derive from (seed, n, T, c0, trial).
std::vector<ExperimentRow> probability_experiment(const std::vector<int>& ns,
                                                  const std::vector<int>& Ts,
                                                  const std::vector<double>& c0s, int trials,
                                                  std::uint64_t seed);

} // namespace esoccp
