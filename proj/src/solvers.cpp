#include "esoccp/solvers.hpp"

#include "esoccp/simplex.hpp"

#include <sstream>

namespace esoccp {

namespace {

constexpr double kLmFloor = 1e-15;

IterRecord record_of(const FbSystem& sys, const Vector& z, int iter, double mu, double step) {
    IterRecord rec;
    rec.iter = iter;
    rec.merit = sys.merit(z);
    rec.grad_norm = sys.merit_gradient(z).norm();
    rec.mu = mu;
    rec.step_norm = step;
    return rec;
}

// Dense LU with a pivot-magnitude singularity check.
std::optional<Vector> solve_linear(const Matrix& M, const Vector& rhs) {
    Eigen::PartialPivLU<Matrix> lu(M);
    const Vector diag = lu.matrixLU().diagonal().cwiseAbs();
    const double scale = M.cwiseAbs().rowwise().maxCoeff().maxCoeff();
    if (diag.minCoeff() < 1e-14 * std::max(1.0, scale)) return std::nullopt;
    Vector d = lu.solve(rhs);
    if (!d.allFinite()) return std::nullopt;
    return d;
}

// Inexact direction: CG on the normal equations, stopped once the Newton
// residual satisfies ||M d - rhs|| <= eta ||rhs||.
std::optional<Vector> solve_inexact(const Matrix& M, const Vector& rhs, double eta) {
    const Eigen::Index n = rhs.size();
    Vector d = Vector::Zero(n);
    Vector r = M.transpose() * rhs; // residual of the normal equations
    Vector p = r;
    double rho = r.squaredNorm();
    for (Eigen::Index it = 0; it < 4 * n; ++it) {
        if ((M * d - rhs).norm() <= eta * rhs.norm()) return d;
        const Vector mp = M * p;
        const double denom = mp.squaredNorm();
        if (denom <= 0.0 || !std::isfinite(denom)) break;
        const double alpha = rho / denom;
        d += alpha * p;
        r -= alpha * (M.transpose() * mp);
        const double rho_next = r.squaredNorm();
        if (rho <= 0.0) break;
        p = r + (rho_next / rho) * p;
        rho = rho_next;
    }
    if ((M * d - rhs).norm() <= eta * rhs.norm()) return d;
    return std::nullopt;
}

std::optional<Vector> newton_direction(const Matrix& M, const Vector& rhs, double eta) {
    if (eta > 0.0) {
        if (auto d = solve_inexact(M, rhs, eta)) return d;
    }
    return solve_linear(M, rhs);
}

} // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max-iterations";
        case SolveStatus::LinearSolveFailed: return "linear-solve-failed";
        case SolveStatus::Stalled: return "stalled";
    }
    return "unknown";
}

SolveResult newton_inexact(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg) {
    SolveResult res;
    res.z = z0;
    if (!z0.allFinite()) throw std::invalid_argument("newton_inexact: z0 must be finite");
    res.trace.records.push_back(record_of(sys, res.z, 0, 0.0, 0.0));

    for (int j = 0; j < cfg.max_iter; ++j) {
        const Vector f = sys.value(res.z);
        if (f.norm() <= cfg.tol) {
            res.trace.status = SolveStatus::Converged;
            return res;
        }
        const FbJacobian jac = sys.jacobian(res.z);
        auto d = newton_direction(jac.full, -f, cfg.eta0);
        if (!d) {
            res.trace.status = SolveStatus::LinearSolveFailed;
            return res;
        }
        res.z += *d;
        res.trace.records.push_back(record_of(sys, res.z, j + 1, 0.0, d->norm()));
    }
    res.trace.status = sys.value(res.z).norm() <= cfg.tol ? SolveStatus::Converged
                                                          : SolveStatus::MaxIter;
    return res;
}

SolveResult lm(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg) {
    SolveResult res;
    res.z = z0;
    if (!z0.allFinite()) throw std::invalid_argument("lm: z0 must be finite");
    if (cfg.lm_mu0 <= 0.0) throw std::invalid_argument("lm: lm_mu0 must be positive");
    double mu = cfg.lm_mu0;
    res.trace.records.push_back(record_of(sys, res.z, 0, mu, 0.0));

    const int n = sys.dim();
    for (int j = 0; j < cfg.max_iter; ++j) {
        const Vector f = sys.value(res.z);
        if (f.norm() <= cfg.tol) {
            res.trace.status = SolveStatus::Converged;
            return res;
        }
        const FbJacobian jac = sys.jacobian(res.z);
        const Matrix h = jac.full.transpose() * jac.full + mu * Matrix::Identity(n, n);
        const Vector g = jac.full.transpose() * f;
        Vector d = h.ldlt().solve(-g);
        if (!d.allFinite()) d = -g; // shifted system is SPD for mu > 0; guard anyway
        res.z += d;
        mu = std::max(mu * cfg.lm_decay, kLmFloor);
        res.trace.records.push_back(record_of(sys, res.z, j + 1, mu, d.norm()));
    }
    res.trace.status = sys.value(res.z).norm() <= cfg.tol ? SolveStatus::Converged
                                                          : SolveStatus::MaxIter;
    return res;
}

SolveResult fb_line_search(const FbSystem& sys, const Vector& z0, const SolverConfig& cfg) {
    SolveResult res;
    res.z = z0;
    if (!z0.allFinite()) throw std::invalid_argument("fb_line_search: z0 must be finite");
    res.trace.records.push_back(record_of(sys, res.z, 0, 0.0, 0.0));

    for (int j = 0; j < cfg.max_iter; ++j) {
        const Vector grad = sys.merit_gradient(res.z);
        if (grad.norm() <= cfg.tol) {
            res.trace.status = SolveStatus::Converged;
            return res;
        }
        const Vector f = sys.value(res.z);
        if (f.norm() <= cfg.tol) {
            // a root of the system is stationary; float noise can keep the
            // gradient test from firing at degenerate Jacobians
            res.trace.status = SolveStatus::Converged;
            return res;
        }
        const FbJacobian jac = sys.jacobian(res.z);
        Vector d;
        auto newton_dir = solve_linear(jac.full, -f);
        if (newton_dir && grad.dot(*newton_dir) <= -cfg.rho * newton_dir->norm())
            d = *newton_dir;
        else
            d = -grad;

        const double theta0 = 0.5 * f.squaredNorm();
        const double slope = grad.dot(d);
        double tau = 1.0;
        int i = 0;
        for (; i <= 60; ++i, tau *= 0.5) {
            if (sys.merit(res.z + tau * d) <= theta0 + cfg.gamma * tau * slope) break;
        }
        if (i > 60) {
            res.trace.status = sys.value(res.z).norm() <= cfg.tol ? SolveStatus::Converged
                                                                  : SolveStatus::Stalled;
            return res;
        }
        res.z += tau * d;
        res.trace.records.push_back(record_of(sys, res.z, j + 1, 0.0, tau * d.norm()));
    }
    res.trace.status = sys.merit_gradient(res.z).norm() <= cfg.tol ? SolveStatus::Converged
                                                                   : SolveStatus::MaxIter;
    return res;
}

Matrix schur_complement(const FbSystem& sys, const Vector& ztilde) {
    const auto& prob = sys.problem();
    const Matrix dt = prob.d_tilde(ztilde);
    Eigen::FullPivLU<Matrix> lu(dt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SchurUnavailable("schur_complement: D~ is singular");
    return prob.source().A - prob.b_tilde() * lu.solve(prob.c_tilde(ztilde));
}

RegularityReport signed_s0_test(const Matrix& schur, const IndexPartition& part) {
    const int k = static_cast<int>(schur.rows());
    RegularityReport rep;
    rep.schur = schur;

    Vector lambda = Vector::Zero(k);
    for (int i : part.pos) lambda(i) = 1.0;
    for (int i : part.neg) lambda(i) = -1.0;
    const Matrix xi = lambda.asDiagonal() * schur * lambda.asDiagonal();

    // max tau  s.t.  Xi u - tau e >= 0, e^T u = 1, u >= 0
    // phrased in standard form with slacks s and the split tau = tp - tm:
    //   Xi u - (tp - tm) e - s = 0,  e^T u = 1.
    const int nv = k + 2 + k;
    Matrix a = Matrix::Zero(k + 1, nv);
    a.topLeftCorner(k, k) = xi;
    a.block(0, k, k, 1).setConstant(-1.0);
    a.block(0, k + 1, k, 1).setConstant(1.0);
    a.block(0, k + 2, k, k) = -Matrix::Identity(k, k);
    a.row(k).head(k).setOnes();
    Vector b = Vector::Zero(k + 1);
    b(k) = 1.0;
    Vector c = Vector::Zero(nv);
    c(k) = -1.0; // max tau == min -tau
    c(k + 1) = 1.0;

    const auto lp = detail::solve_lp(a, b, c);
    if (lp.feasible && -lp.objective >= -1e-9) {
        rep.signed_s0 = true;
        rep.fb_regular_certified = true;
        rep.lp_witness = lp.x.head(k);
    }
    return rep;
}

std::string trace_to_csv(const SolverTrace& trace) {
    std::ostringstream os;
    os << "iter,merit,grad_norm,mu,step_norm\n";
    os.precision(12);
    for (const auto& r : trace.records)
        os << r.iter << ',' << r.merit << ',' << r.grad_norm << ',' << r.mu << ','
           << r.step_norm << '\n';
    return os.str();
}

namespace {

SolveResult run_method(const FbSystem& sys, Method m, const Vector& z0, const SolverConfig& cfg) {
    switch (m) {
        case Method::Newton: {
            auto run = newton_inexact(sys, z0, cfg);
            // a singular Jacobian stops Newton; the shifted LM system is not
            if (run.trace.status == SolveStatus::LinearSolveFailed)
                return lm(sys, run.z, cfg);
            return run;
        }
        case Method::Lm: return lm(sys, z0, cfg);
        case Method::LineSearch: return fb_line_search(sys, z0, cfg);
    }
    throw std::logic_error("unreachable");
}

} // namespace

EsoclcpSolution solve_esoclcp(const EsoclcpInstance& inst, Method method, const Vector& z0,
                              const SolverConfig& cfg) {
    const FbSystem sys(reformulate_vi(inst));
    const int k = inst.k, l = inst.l;
    if (z0.size() != k + l + 1)
        throw std::invalid_argument("solve_esoclcp: z0 must have k + l + 1 entries");

    const auto finish = [&](SolveResult&& run, int restarts) {
        EsoclcpSolution sol;
        sol.ztilde = std::move(run.z);
        sol.trace = std::move(run.trace);
        sol.trace.restarts = restarts;
        double t = sol.ztilde(k + l);
        // t hovering a float-noise hair below zero still encodes ||u|| = 0
        if (t < 0.0 && t >= -std::sqrt(cfg.tol)) {
            sol.ztilde(k + l) = 0.0;
            t = 0.0;
        }
        if (t >= -1e-12) {
            auto [x, u] = back_map(sol.ztilde, k, l);
            sol.x = std::move(x);
            sol.u = std::move(u);
            sol.verification = verify_solution(inst, sol.x, sol.u);
            sol.verified = sol.verification.pass;
        }
        return sol;
    };

    auto first = finish(run_method(sys, method, z0, cfg), 0);
    if (first.trace.status == SolveStatus::Converged && first.verified) return first;

    // Unverified or failed run: re-seed with flipped u signs, t = ||u||.  The
    // reformulated system keeps the basin structure of the original cone
    // problem only on the u-orthant of the solution.
    Vector base_u = z0.segment(k, l).cwiseAbs();
    for (int i = 0; i < l; ++i) base_u(i) = std::max(base_u(i), 0.5);
    const int patterns = (l >= 30) ? cfg.max_restarts : std::min(cfg.max_restarts, (1 << l) - 1);
    EsoclcpSolution best = std::move(first);
    for (int mask = 1; mask <= patterns; ++mask) {
        Vector z = z0;
        for (int i = 0; i < l; ++i)
            z(k + i) = ((mask >> i) & 1) ? -base_u(i) : base_u(i);
        z(k + l) = z.segment(k, l).norm();
        auto attempt = finish(run_method(sys, method, z, cfg), mask);
        if (attempt.trace.status == SolveStatus::Converged && attempt.verified) return attempt;
        const double best_merit = sys.merit(best.ztilde);
        if (sys.merit(attempt.ztilde) < best_merit) best = std::move(attempt);
    }
    best.verified = false;
    if (best.trace.status == SolveStatus::Converged)
        best.trace.status = SolveStatus::Stalled; // a root, but not of the cone problem
    return best;
}

} // namespace esoccp
