#pragma once

#include "esoccp/solvers.hpp"

#include <cstdint>
#include <string>

namespace esoccp {

/// One randomly perturbed entry of (T, r): entry += scale * w with
/// w ~ Normal(mean, sd), drawn i.i.d. per scenario.
struct Perturbation {
    enum class Block { A, B, C, D, p, q };
    Block block = Block::A;
    int i = 0;
    int j = 0; // unused for p/q
    double mean = 0.0;
    double sd = 1.0;
    double scale = 1.0;
};

const char* to_string(Perturbation::Block b);

/// A stochastic ESOCLCP: base coefficients plus i.i.d. normal perturbations.
/// Sampling is a pure function of (seed, stage, scenario, perturbation), so
/// batches reproduce bit-for-bit regardless of thread schedule.
struct ScenarioModel {
    EsoclcpInstance base;
    std::vector<Perturbation> perturbations;
    std::uint64_t seed = 0;

    /// N x P matrix of raw normal draws for stage `stage`.
    Matrix sample_draws(int stage, int N) const;

    /// Overwrites `inst` with the base coefficients plus the deltas of one
    /// draw row.  `inst` must have the base dimensions already.
    void apply_draws(EsoclcpInstance& inst, const Eigen::RowVectorXd& draws) const;

    /// Convenience: the realized instance of scenario `i` at stage `stage`.
    EsoclcpInstance realize(int stage, int i) const;
};

struct CvarConfig {
    double alpha = 0.05;             // tail level of the CVaR objective
    double mu_smooth = 1e-2;         // CHKS parameter of the first stage
    double mu_stage_decay = 0.5;     // applied across stages
    double mu_floor = 1e-8;
    std::vector<int> sample_sizes = {100, 1000, 10000, 100000};
    double theta0 = 0.0;
    double outer_eps = 1e-4;         // outer stop on ||z_j - z_{j-1}||
    int inner_max = 10;
    double inner_gtol = 1e-5;        // stop on max_i |dN/dz_i|
    bool gradient_fallback = false;  // see solve_saa notes
};

struct VarCvar {
    double var = 0.0;
    double cvar = 0.0;
};

/// Empirical VaR/CVaR of a loss sample at tail level alpha: VaR is the upper
/// order statistic at index ceil((1-alpha) N), CVaR the mean of losses >= VaR.
VarCvar var_cvar_empirical(std::vector<double> losses, double alpha);

/// CHKS smoothing of max(0, t): (t + sqrt(t^2 + 4 mu^2)) / 2.
inline double chks(double t, double mu) {
    return 0.5 * (t + std::sqrt(t * t + 4.0 * mu * mu));
}

/// A sampled scenario batch (row i holds the draws of scenario i).
struct ScenarioBatch {
    int stage = 0;
    Matrix draws;
    int size() const { return static_cast<int>(draws.rows()); }
};

ScenarioBatch sample_batch(const ScenarioModel& model, int stage, int N);

/// Smoothed SAA objective N(z, Theta) = Theta + alpha^-1 mean_i [theta_i - Theta]_mu
/// where theta_i is the FB merit of scenario i.
double saa_objective(const ScenarioModel& model, const CvarConfig& cfg, const ScenarioBatch& batch,
                     const Vector& ztilde, double theta, double mu_smooth);

/// Gradient of the SAA objective; the first k+l+1 entries are the z-part,
/// the last entry is the Theta-part.
Vector saa_gradient(const ScenarioModel& model, const CvarConfig& cfg, const ScenarioBatch& batch,
                    const Vector& ztilde, double theta, double mu_smooth);

/// Average loss of complementarity at the back-mapped point: the batch mean
/// of the complementarity gap <(x,u), F(x,u,w)>, reported in magnitude.
double aloc(const ScenarioModel& model, const Vector& ztilde, const ScenarioBatch& batch);

/// Companion statistic: batch mean of |<(x,u), F(x,u,w)>|.
double mean_abs_gap(const ScenarioModel& model, const Vector& ztilde, const ScenarioBatch& batch);

enum class StageStatus { GradientTol, LmExhausted, StepStall, InnerMax };
const char* to_string(StageStatus s);

struct SaaStageReport {
    int stage = 0;
    int sample_size = 0;
    Vector ztilde;
    Vector x, u;
    double theta = 0.0;
    double objective = 0.0;
    double aloc = 0.0;
    double mean_abs_gap = 0.0;
    double runtime_sec = 0.0;
    int inner_iterations = 0;
    StageStatus status = StageStatus::InnerMax;
};

struct SaaReport {
    std::vector<SaaStageReport> stages;
    Vector ztilde;
    Vector x, u;
    double theta = 0.0;
    bool outer_converged = false; // consecutive stage solutions within outer_eps
};

/// Staged smoothing-SAA solve.  Every stage solves its own freshly sampled
/// batch from the same warm start (the expected-value solution unless z0 is
/// given); inner iterations take the averaged-Jacobian LM direction under a
/// Wolfe line search, with Theta re-minimized exactly before each step.
///
/// By default a stage stops when that direction stops descending: past this
/// point the remaining descent trades complementarity for tail merit (the
/// reported mean gap degrades several-fold within one gradient step).  Set
/// cfg.gradient_fallback to keep descending along -grad instead.
SaaReport solve_saa(const ScenarioModel& model, const CvarConfig& cfg,
                    const SolverConfig& solver_cfg, std::optional<Vector> z0 = std::nullopt);

/// Expected-value baseline: coefficients replaced by analytic means.
EsoclcpInstance ev_baseline_analytic(const ScenarioModel& model);

/// Expected-value baseline from an N-scenario sample mean (stage 0 draws).
EsoclcpInstance ev_baseline(const ScenarioModel& model, int N);

} // namespace esoccp
