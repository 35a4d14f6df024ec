#include "esoccp/portfolio.hpp"

#include "esoccp/parallel.hpp"
#include "esoccp/rng.hpp"

#include <bit>
#include <stdexcept>

namespace esoccp {

PortfolioInstance::PortfolioInstance(Matrix R_, Vector f_, double c0_)
    : R(std::move(R_)), f(std::move(f_)), c0(c0_) {
    if (R.rows() < 2) throw std::invalid_argument("PortfolioInstance: need at least 2 assets");
    if (R.cols() < 1) throw std::invalid_argument("PortfolioInstance: need at least 1 scenario");
    if (f.size() != R.cols())
        throw std::invalid_argument("PortfolioInstance: probability vector has wrong size");
    if (f.minCoeff() < -1e-12 || std::abs(f.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("PortfolioInstance: f must be a probability vector");
    if (!(c0 > 0.0)) throw std::invalid_argument("PortfolioInstance: c0 must be positive");

    r = R * f;
    r_bar = r.mean();
    U = R.colwise() - r;
    u_norms = U.colwise().norm();
}

Vector mv_solve(const Vector& r, const Matrix& sigma, double c0) {
    const auto n = r.size();
    if (sigma.rows() != n || sigma.cols() != n)
        throw std::invalid_argument("mv_solve: covariance has wrong shape");
    if (!(c0 > 0.0)) throw std::invalid_argument("mv_solve: c0 must be positive");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("mv_solve: covariance must be positive definite");

    const Vector e = Vector::Ones(n);
    const Vector si_r = llt.solve(r);
    const Vector si_e = llt.solve(e);
    const double denom = e.dot(si_e);
    const Vector excess = r - (e.dot(si_r) / denom) * e;
    return llt.solve(excess) / (2.0 * c0) + si_e / denom;
}

MadResult mad_iterate(const PortfolioInstance& inst, const Vector& w0, int max_iter, double tol) {
    const int n = inst.assets(), T = inst.scenarios();
    if (T < n) throw std::invalid_argument("mad_iterate: needs T >= n scenarios");
    if (w0.size() != n || std::abs(w0.sum() - 1.0) > 1e-8)
        throw std::invalid_argument("mad_iterate: w0 must satisfy e^T w = 1");

    const Vector e = Vector::Ones(n);
    MadResult res;
    res.w = w0;
    for (int it = 0; it < max_iter; ++it) {
        Matrix binv = Matrix::Zero(n, n);
        for (int j = 0; j < T; ++j) {
            const double dev = std::max(std::abs(inst.U.col(j).dot(res.w)), 1e-8);
            binv += (inst.f(j) / dev) * inst.U.col(j) * inst.U.col(j).transpose();
        }
        Eigen::FullPivLU<Matrix> lu(binv);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible())
            throw std::runtime_error("mad_iterate: deviation matrix is singular");
        const Vector br = lu.solve(inst.r);
        const Vector be = lu.solve(e);
        const double beta = e.dot(br) / e.dot(be);
        const Vector next = (br - beta * be) / inst.c0 + be / e.dot(be);
        const double move = (next - res.w).norm();
        res.w = next;
        res.iterations = it + 1;
        if (move <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

MenFeasibility men_feasibility(const PortfolioInstance& inst) {
    MenFeasibility out;
    const double cs = inst.c0 * inst.mean_deviation();
    const double cs2 = cs * cs;
    const Vector excess = inst.r.array() - inst.r_bar;
    if (cs2 <= 0.0) { // no risk spread: neither branch is usable
        out.iv_value = -std::numeric_limits<double>::infinity();
        out.iii_value = inst.r_bar - inst.r.squaredNorm();
        return out;
    }
    out.iv_value = 1.0 - excess.squaredNorm() / cs2;
    out.iv_ok = out.iv_value > 0.0;
    out.iii_value = inst.r_bar + cs2 - inst.r.squaredNorm();
    out.iii_ok = out.iii_value >= 0.0;
    return out;
}

MenSolution men_solve(const PortfolioInstance& inst) {
    const auto feas = men_feasibility(inst);
    if (!feas.iv_ok) throw MenInfeasible(feas.iv_value);

    const int n = inst.assets(), T = inst.scenarios();
    const Vector e = Vector::Ones(n);
    const double cs = inst.c0 * inst.mean_deviation();
    const Vector excess = inst.r.array() - inst.r_bar;
    const double radicand = n * (cs * cs - excess.squaredNorm());

    MenSolution sol;
    sol.w = excess / std::sqrt(radicand) + e / n;
    sol.y = inst.u_norms * sol.w.norm();
    sol.feasible = true;

    // KKT residual at the recovered multipliers: theta_j on the active branch
    // of the orthant complementarity, mu from the stationarity derivation,
    // lambda from the norm coupling.
    const double wn = sol.w.norm();
    const Vector theta = inst.c0 * (inst.u_norms.array() * inst.f.array()).matrix();
    const double mu = inst.r_bar - cs / (n * wn);
    const double lambda = (cs - theta.sum()) / wn;
    const Vector dual = inst.c0 * (inst.u_norms.array() * inst.f.array()).matrix() - theta;
    const Vector v = -inst.r + mu * e + (theta.sum() / wn) * sol.w;

    double res = (v + lambda * sol.w).lpNorm<Eigen::Infinity>();
    res = std::max(res, std::abs(dual.sum() - v.norm()));
    res = std::max(res, std::abs(e.dot(sol.w) - 1.0));
    // orthant complementarity of (y o U^-1 - ||w|| e, dual)
    Vector slack(T);
    for (int j = 0; j < T; ++j)
        slack(j) = inst.u_norms(j) > 0.0 ? sol.y(j) / inst.u_norms(j) - wn : 0.0;
    res = std::max(res, std::abs(slack.dot(dual)));
    res = std::max(res, std::max(0.0, -slack.minCoeff()));
    res = std::max(res, std::max(0.0, -dual.minCoeff()));
    sol.kkt_residual = res;
    return sol;
}

std::vector<ExperimentRow> probability_experiment(const std::vector<int>& ns,
                                                  const std::vector<int>& Ts,
                                                  const std::vector<double>& c0s, int trials,
                                                  std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("probability_experiment: trials must be >= 1");
    std::vector<ExperimentRow> rows;
    for (int n : ns) {
        for (int T : Ts) {
            for (double c0 : c0s) {
                const std::uint64_t cell =
                    rng::mix(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(T),
                             std::bit_cast<std::uint64_t>(c0));
                std::vector<std::uint8_t> hold_iv(static_cast<std::size_t>(trials));
                std::vector<std::uint8_t> hold_iii(static_cast<std::size_t>(trials));
                parallel_for(trials, [&](int trial) {
                    const std::uint64_t key = rng::mix(cell, static_cast<std::uint64_t>(trial));
                    Matrix R(n, T);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < T; ++j)
                            R(i, j) = rng::uniform01(
                                rng::mix(key, 0, static_cast<std::uint64_t>(i * T + j)));
                    Vector f(T);
                    for (int j = 0; j < T; ++j)
                        f(j) = rng::uniform01(rng::mix(key, 1, static_cast<std::uint64_t>(j)));
                    f /= f.sum();
                    const PortfolioInstance inst(std::move(R), std::move(f), c0);
                    const auto feas = men_feasibility(inst);
                    hold_iv[static_cast<std::size_t>(trial)] = feas.iv_ok ? 1 : 0;
                    hold_iii[static_cast<std::size_t>(trial)] = feas.iii_ok ? 1 : 0;
                });
                ExperimentRow row{n, T, c0, trials, 0.0, 0.0};
                int civ = 0, ciii = 0;
                for (int t = 0; t < trials; ++t) {
                    civ += hold_iv[static_cast<std::size_t>(t)];
                    ciii += hold_iii[static_cast<std::size_t>(t)];
                }
                row.rate_iv = static_cast<double>(civ) / trials;
                row.rate_iii = static_cast<double>(ciii) / trials;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

} // namespace esoccp
