#pragma once

#include "esoccp/fb.hpp"

#include <string>

namespace esoccp {

struct SolverConfig {
    double tol = 1e-7;      // residual / gradient stopping tolerance
    int max_iter = 100;
    double lm_mu0 = 1e-2;   // initial Levenberg-Marquardt shift
    double lm_decay = 1e-1; // multiplied in each iteration, floored at 1e-15
    double eta0 = 0.0;      // inexactness bound; 0 keeps the direct solves
    double rho = 1e-8;      // descent-test constant of the line-search method
    double gamma = 1e-4;    // Armijo constant for the 2^-i backtracking
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_restarts = 16;  // u-sign restart attempts on failed verification
};

enum class SolveStatus { Converged, MaxIter, LinearSolveFailed, Stalled };

const char* to_string(SolveStatus s);

struct IterRecord {
    int iter = 0;
    double merit = 0.0;
    double grad_norm = 0.0;
    double mu = 0.0;
    double step_norm = 0.0;
};

struct SolverTrace {
    std::vector<IterRecord> records;
    SolveStatus status = SolveStatus::MaxIter;
    int restarts = 0; // restarts taken before the reported run
    int iterations() const { return records.empty() ? 0 : records.back().iter; }
};

struct SolveResult {
    Vector z;
    SolverTrace trace;
};

/// Semi-smooth Newton with direct linear solves (the inexact residual bound
/// is available through cfg.eta0 but defaults to exact steps).
SolveResult newton_inexact(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg);

/// Levenberg-Marquardt on the FB system; the shift decays by cfg.lm_decay
/// after every iteration.
SolveResult lm(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg);

/// Line-search method on the merit function: Newton direction with a
/// gradient fallback under the descent test, Armijo backtracking with
/// factor 2^-i.  Stops when ||grad merit|| <= cfg.tol.
SolveResult fb_line_search(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg);

struct SchurUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Schur complement A~ - B~ D~^{-1} C~ of the F-Jacobian blocks at ztilde.
/// Throws SchurUnavailable when D~ is numerically singular.
Matrix schur_complement(const FbSystem& sys, const Vector& ztilde);

struct RegularityReport {
    Matrix schur;
    bool signed_s0 = false;
    bool fb_regular_certified = false; // signed S0 is the sufficient certificate
    std::optional<Vector> lp_witness;  // u >= 0, e^T u = 1, Xi u >= 0
};

/// Signed-S0 test: builds the sign diagonal from the partition (+1 on pos,
/// -1 on neg, 0 on comp), forms Xi = Lambda S Lambda and decides S0 by the
/// linear feasibility problem { u >= 0, e^T u = 1, Xi u >= 0 }.
RegularityReport signed_s0_test(const Matrix& schur, const IndexPartition& part);

/// CSV export of a trace with columns iter,merit,grad_norm,mu,step_norm.
std::string trace_to_csv(const SolverTrace& trace);

enum class Method { Newton, Lm, LineSearch };

struct EsoclcpSolution {
    Vector x, u, ztilde;
    SolverTrace trace;
    VerifyReport verification;
    bool verified = false;
};

/// End-to-end solve of an ESOCLCP through the MixCP reformulation.  The
/// reformulated system keeps spurious roots with u = 0 or t = -||u|| that do
/// not solve the original cone problem; when a converged run fails
/// verification the driver deterministically restarts from u-sign-flipped
/// copies of z0 until a verified root is found (at most cfg.max_restarts).
EsoclcpSolution solve_esoclcp(const EsoclcpInstance& inst, Method method, const Vector& z0,
                              const SolverConfig& cfg);

} // namespace esoccp
