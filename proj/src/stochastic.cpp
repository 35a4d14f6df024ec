#include "esoccp/stochastic.hpp"

#include "esoccp/parallel.hpp"
#include "esoccp/rng.hpp"

#include <algorithm>
#include <chrono>

namespace esoccp {

namespace {

double* entry_ptr(EsoclcpInstance& inst, const Perturbation& p) {
    switch (p.block) {
        case Perturbation::Block::A: return &inst.A(p.i, p.j);
        case Perturbation::Block::B: return &inst.B(p.i, p.j);
        case Perturbation::Block::C: return &inst.C(p.i, p.j);
        case Perturbation::Block::D: return &inst.D(p.i, p.j);
        case Perturbation::Block::p: return &inst.p(p.i);
        case Perturbation::Block::q: return &inst.q(p.i);
    }
    throw std::logic_error("unreachable");
}

void reset_to(EsoclcpInstance& scratch, const EsoclcpInstance& base) {
    scratch.A = base.A;
    scratch.B = base.B;
    scratch.C = base.C;
    scratch.D = base.D;
    scratch.p = base.p;
    scratch.q = base.q;
}

// CHKS derivative weight of [t]_mu: in (0, 1), 1/2 at t = 0.
double chks_weight(double t, double mu) {
    return 0.5 * (1.0 + t / std::sqrt(t * t + 4.0 * mu * mu));
}

class BatchEvaluator {
  public:
    BatchEvaluator(const ScenarioModel& model, const ScenarioBatch& batch)
        : model_(model), batch_(batch) {}

    // theta_i for every scenario (needed to re-minimize Theta).
    std::vector<double> merits(const Vector& z) const {
        const int n = batch_.size();
        std::vector<double> out(static_cast<std::size_t>(n));
        scratch_for_each(n, [&](EsoclcpInstance& scratch, int i) {
            model_.apply_draws(scratch, batch_.draws.row(i));
            const MixcpInstance mix(scratch);
            out[static_cast<std::size_t>(i)] = 0.5 * fb_value(mix, z).squaredNorm();
        });
        return out;
    }

    double objective(const Vector& z, double theta, double alpha, double mu) const {
        const auto th = merits(z);
        double acc = 0.0;
        for (double t : th) acc += chks(t - theta, mu);
        return theta + acc / (alpha * static_cast<double>(th.size()));
    }

    // gradient over z, averaged Jacobian/residual, and the Theta derivative.
    struct GradParts {
        Vector grad_z;
        double grad_theta = 0.0;
        Matrix jac_avg;
        Vector res_avg;
    };

    GradParts gradient(const Vector& z, double theta, double alpha, double mu) const {
        const int n = batch_.size();
        const int dim = static_cast<int>(z.size());
        struct Partial {
            Vector grad_z;
            double wsum = 0.0;
            Matrix jac;
            Vector res;
        };
        std::vector<Partial> parts;
        scratch_for_blocks(n, [&](EsoclcpInstance& scratch, int lo, int hi, Partial& part) {
            part.grad_z = Vector::Zero(dim);
            part.jac = Matrix::Zero(dim, dim);
            part.res = Vector::Zero(dim);
            for (int i = lo; i < hi; ++i) {
                model_.apply_draws(scratch, batch_.draws.row(i));
                const MixcpInstance mix(scratch);
                const Vector f = fb_value(mix, z);
                const FbJacobian jac = fb_jacobian_at(mix, z);
                const double w = chks_weight(0.5 * f.squaredNorm() - theta, mu);
                part.grad_z.noalias() += w * (jac.full.transpose() * f);
                part.wsum += w;
                part.jac += jac.full;
                part.res += f;
            }
        }, parts);

        GradParts out;
        out.grad_z = Vector::Zero(dim);
        out.jac_avg = Matrix::Zero(dim, dim);
        out.res_avg = Vector::Zero(dim);
        double wsum = 0.0;
        for (const auto& part : parts) { // fixed order keeps runs bitwise stable
            out.grad_z += part.grad_z;
            out.jac_avg += part.jac;
            out.res_avg += part.res;
            wsum += part.wsum;
        }
        const double inv = 1.0 / static_cast<double>(n);
        out.grad_z = out.grad_z * (inv / alpha);
        out.grad_theta = 1.0 - wsum * inv / alpha;
        out.jac_avg *= inv;
        out.res_avg *= inv;
        return out;
    }

  private:
    template <typename Fn>
    void scratch_for_each(int n, Fn&& fn) const {
        EsoclcpInstance scratch = model_.base;
        for (int i = 0; i < n; ++i) {
            reset_to(scratch, model_.base);
            fn(scratch, i);
        }
    }

    template <typename Fn, typename Partial>
    void scratch_for_blocks(int n, Fn&& fn, std::vector<Partial>& parts) const {
        constexpr int kBlock = 4096;
        const int blocks = (n + kBlock - 1) / kBlock;
        parts.resize(static_cast<std::size_t>(blocks));
        parallel_for(blocks, [&](int b) {
            EsoclcpInstance scratch = model_.base;
            const int lo = b * kBlock, hi = std::min(n, lo + kBlock);
            fn(scratch, lo, hi, parts[static_cast<std::size_t>(b)]);
        });
    }

    const ScenarioModel& model_;
    const ScenarioBatch& batch_;
};

// Exact inner minimization of the convex Theta-section by bisection on the
// monotone derivative (eq. weight average crosses alpha).
double optimal_theta(const std::vector<double>& merits, double alpha, double mu) {
    double lo = -1.0, hi = 1.0;
    for (double t : merits) hi = std::max(hi, t);
    hi += 1.0;
    for (double t : merits) lo = std::min(lo, t);
    lo -= 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        double wsum = 0.0;
        for (double t : merits) wsum += chks_weight(t - mid, mu);
        const double g = 1.0 - wsum / (alpha * static_cast<double>(merits.size()));
        (g < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

const char* to_string(Perturbation::Block b) {
    switch (b) {
        case Perturbation::Block::A: return "A";
        case Perturbation::Block::B: return "B";
        case Perturbation::Block::C: return "C";
        case Perturbation::Block::D: return "D";
        case Perturbation::Block::p: return "p";
        case Perturbation::Block::q: return "q";
    }
    return "?";
}

const char* to_string(StageStatus s) {
    switch (s) {
        case StageStatus::GradientTol: return "gradient-tolerance";
        case StageStatus::LmExhausted: return "lm-direction-exhausted";
        case StageStatus::StepStall: return "step-stall";
        case StageStatus::InnerMax: return "inner-max-iterations";
    }
    return "unknown";
}

Matrix ScenarioModel::sample_draws(int stage, int N) const {
    const int np = static_cast<int>(perturbations.size());
    Matrix draws(N, np);
    for (int i = 0; i < N; ++i) {
        for (int p = 0; p < np; ++p) {
            const std::uint64_t key = rng::mix(seed, static_cast<std::uint64_t>(stage),
                                               static_cast<std::uint64_t>(i),
                                               static_cast<std::uint64_t>(p));
            draws(i, p) = rng::normal(key, perturbations[static_cast<std::size_t>(p)].mean,
                                      perturbations[static_cast<std::size_t>(p)].sd);
        }
    }
    return draws;
}

void ScenarioModel::apply_draws(EsoclcpInstance& inst, const Eigen::RowVectorXd& draws) const {
    reset_to(inst, base);
    for (std::size_t p = 0; p < perturbations.size(); ++p)
        *entry_ptr(inst, perturbations[p]) += perturbations[p].scale * draws(static_cast<int>(p));
}

EsoclcpInstance ScenarioModel::realize(int stage, int i) const {
    const Matrix draws = sample_draws(stage, i + 1);
    EsoclcpInstance inst = base;
    apply_draws(inst, draws.row(i));
    return inst;
}

VarCvar var_cvar_empirical(std::vector<double> losses, double alpha) {
    if (losses.empty()) throw std::invalid_argument("var_cvar_empirical: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("var_cvar_empirical: alpha must be in (0,1)");
    std::sort(losses.begin(), losses.end());
    const auto n = losses.size();
    const auto idx = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(n))); // 1-based order statistic
    const double var = losses[std::min(n, std::max<std::size_t>(idx, 1)) - 1];
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : losses) {
        if (v >= var) { sum += v; ++count; }
    }
    return VarCvar{var, sum / static_cast<double>(count)};
}

ScenarioBatch sample_batch(const ScenarioModel& model, int stage, int N) {
    if (N < 1) throw std::invalid_argument("sample_batch: N must be >= 1");
    return ScenarioBatch{stage, model.sample_draws(stage, N)};
}

double saa_objective(const ScenarioModel& model, const CvarConfig& cfg, const ScenarioBatch& batch,
                     const Vector& ztilde, double theta, double mu_smooth) {
    return BatchEvaluator(model, batch).objective(ztilde, theta, cfg.alpha, mu_smooth);
}

Vector saa_gradient(const ScenarioModel& model, const CvarConfig& cfg, const ScenarioBatch& batch,
                    const Vector& ztilde, double theta, double mu_smooth) {
    const auto parts = BatchEvaluator(model, batch).gradient(ztilde, theta, cfg.alpha, mu_smooth);
    Vector out(ztilde.size() + 1);
    out.head(ztilde.size()) = parts.grad_z;
    out(ztilde.size()) = parts.grad_theta;
    return out;
}

namespace {

double gap_statistic(const ScenarioModel& model, const Vector& ztilde, const ScenarioBatch& batch,
                     bool absolute) {
    const int k = model.base.k, l = model.base.l;
    auto [x, u] = back_map(ztilde, k, l);
    Vector xu(k + l);
    xu.head(k) = x;
    xu.tail(l) = u;

    EsoclcpInstance scratch = model.base;
    double acc = 0.0;
    for (int i = 0; i < batch.size(); ++i) {
        model.apply_draws(scratch, batch.draws.row(i));
        const double gap = xu.dot(scratch.F(x, u));
        acc += absolute ? std::abs(gap) : gap;
    }
    const double mean = acc / static_cast<double>(batch.size());
    return absolute ? mean : std::abs(mean);
}

} // namespace

double aloc(const ScenarioModel& model, const Vector& ztilde, const ScenarioBatch& batch) {
    return gap_statistic(model, ztilde, batch, false);
}

double mean_abs_gap(const ScenarioModel& model, const Vector& ztilde, const ScenarioBatch& batch) {
    return gap_statistic(model, ztilde, batch, true);
}

EsoclcpInstance ev_baseline_analytic(const ScenarioModel& model) {
    EsoclcpInstance inst = model.base;
    for (const auto& p : model.perturbations)
        if (p.mean != 0.0) *entry_ptr(inst, p) += p.scale * p.mean;
    return EsoclcpInstance(inst.A, inst.B, inst.C, inst.D, inst.p, inst.q);
}

EsoclcpInstance ev_baseline(const ScenarioModel& model, int N) {
    if (N < 1) throw std::invalid_argument("ev_baseline: N must be >= 1");
    const Matrix draws = model.sample_draws(0, N);
    const Eigen::RowVectorXd means = draws.colwise().mean();
    EsoclcpInstance inst = model.base;
    model.apply_draws(inst, means);
    return EsoclcpInstance(inst.A, inst.B, inst.C, inst.D, inst.p, inst.q);
}

SaaReport solve_saa(const ScenarioModel& model, const CvarConfig& cfg,
                    const SolverConfig& solver_cfg, std::optional<Vector> z0) {
    if (cfg.sample_sizes.empty())
        throw std::invalid_argument("solve_saa: sample_sizes must be nonempty");
    const int k = model.base.k, l = model.base.l;
    const int dim = k + l + 1;

    Vector warm;
    if (z0) {
        if (z0->size() != dim) throw std::invalid_argument("solve_saa: z0 has wrong dimension");
        warm = *z0;
    } else {
        // Expected-value warm start; the stages refine its tail behavior.
        Vector ones = Vector::Ones(dim);
        const auto ev = solve_esoclcp(ev_baseline_analytic(model), Method::Lm, ones, solver_cfg);
        warm = ev.ztilde;
    }

    SaaReport report;
    double mu = cfg.mu_smooth;
    Vector prev;
    for (std::size_t j = 0; j < cfg.sample_sizes.size(); ++j) {
        const int N = cfg.sample_sizes[j];
        const auto t_start = std::chrono::steady_clock::now();
        const ScenarioBatch batch = sample_batch(model, static_cast<int>(j + 1), N);
        const BatchEvaluator eval(model, batch);

        Vector z = warm;
        double lm_mu = solver_cfg.lm_mu0;
        double theta = cfg.theta0;
        StageStatus status = StageStatus::InnerMax;
        int iters = 0;
        for (int it = 0; it < cfg.inner_max; ++it, ++iters) {
            theta = optimal_theta(eval.merits(z), cfg.alpha, mu);
            const auto parts = eval.gradient(z, theta, cfg.alpha, mu);
            if (parts.grad_z.lpNorm<Eigen::Infinity>() <= cfg.inner_gtol) {
                status = StageStatus::GradientTol;
                break;
            }
            Vector d = (parts.jac_avg.transpose() * parts.jac_avg +
                        lm_mu * Matrix::Identity(dim, dim))
                           .ldlt()
                           .solve(-(parts.jac_avg.transpose() * parts.res_avg));
            if (!d.allFinite() || parts.grad_z.dot(d) > -solver_cfg.rho * d.norm()) {
                if (!cfg.gradient_fallback) {
                    status = StageStatus::LmExhausted;
                    break;
                }
                d = -parts.grad_z;
            }

            // Wolfe line search at fixed Theta.
            const double f0 = eval.objective(z, theta, cfg.alpha, mu);
            const double g0 = parts.grad_z.dot(d);
            double s = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
            for (int ls = 0; ls < 40; ++ls) {
                if (eval.objective(z + s * d, theta, cfg.alpha, mu) >
                    f0 + solver_cfg.wolfe_c1 * s * g0) {
                    hi = s;
                    s = 0.5 * (lo + hi);
                    continue;
                }
                const auto g1 = eval.gradient(z + s * d, theta, cfg.alpha, mu);
                if (g1.grad_z.dot(d) < solver_cfg.wolfe_c2 * g0) {
                    lo = s;
                    s = std::isinf(hi) ? 2.0 * s : 0.5 * (lo + hi);
                    continue;
                }
                break;
            }
            if (s * d.norm() <= 1e-12 * (1.0 + z.norm())) {
                status = StageStatus::StepStall;
                break;
            }
            z += s * d;
            lm_mu = std::max(lm_mu * 0.5, 1e-12);
        }

        SaaStageReport stage;
        stage.stage = static_cast<int>(j + 1);
        stage.sample_size = N;
        stage.ztilde = z;
        std::tie(stage.x, stage.u) = back_map(z, k, l);
        stage.theta = optimal_theta(eval.merits(z), cfg.alpha, mu);
        stage.objective = eval.objective(z, stage.theta, cfg.alpha, mu);
        stage.aloc = aloc(model, z, batch);
        stage.mean_abs_gap = mean_abs_gap(model, z, batch);
        stage.inner_iterations = iters;
        stage.status = status;
        stage.runtime_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        report.stages.push_back(stage);

        if (j > 0 && (z - prev).norm() < cfg.outer_eps) {
            report.outer_converged = true;
            prev = z;
            break;
        }
        prev = z;
        mu = std::max(mu * cfg.mu_stage_decay, cfg.mu_floor);
    }

    const auto& last = report.stages.back();
    report.ztilde = last.ztilde;
    report.x = last.x;
    report.u = last.u;
    report.theta = last.theta;
    return report;
}

} // namespace esoccp
