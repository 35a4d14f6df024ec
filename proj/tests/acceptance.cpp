// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line.  Exit status is the number of failed criteria.

#include "esoccp/portfolio.hpp"
#include "esoccp/solvers.hpp"
#include "esoccp/spherical.hpp"
#include "esoccp/stochastic.hpp"
#include "test_support.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

using namespace esoccp;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name
              << " -- " << detail << "\n";
    if (!pass) ++failures;
}

ScenarioModel stochastic_model(std::uint64_t seed) {
    ScenarioModel m;
    m.base = testing::reference_instance();
    m.perturbations = {
        {Perturbation::Block::A, 0, 0, 0.0, 1.0, 1.0},
        {Perturbation::Block::C, 0, 2, 0.0, 1.0, 2.0},
        {Perturbation::Block::p, 1, 0, 0.0, 1.0, -1.0},
    };
    m.seed = seed;
    return m;
}

void criterion_1_and_2() {
    const auto inst = testing::reference_instance();
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Vector xu(5);
    xu.head(3) = sol.x;
    xu.tail(2) = sol.u;
    const double dev = (xu - testing::reference_xu()).lpNorm<Eigen::Infinity>();
    const FbSystem sys(reformulate_vi(inst));
    const double merit = sys.merit(sol.ztilde);
    {
        std::ostringstream d;
        d << "deviation " << dev << ", merit " << merit << ", iterations "
          << sol.trace.iterations() << ", runtime " << secs << " s";
        report(1, "deterministic 5x5 reproduction via LM from ones",
               sol.trace.status == SolveStatus::Converged && dev < 1e-5 && merit <= 1e-12 &&
                   sol.trace.iterations() <= 30 && secs < 1.0,
               d.str());
    }
    {
        const auto verify = verify_solution(inst, sol.x, sol.u);
        const Vector f = inst.F(sol.x, sol.u);
        const auto cls = classify_pair(sol.x, sol.u, f.head(3), f.tail(2));
        const double ey_vs_v = std::abs(f.head(3).sum() - f.tail(2).norm());
        const double y_dev = (f.head(3) - testing::reference_F().head(3)).lpNorm<Eigen::Infinity>();
        std::ostringstream d;
        d << "verified " << verify.pass << ", case IV " << (cls.c == PairCase::IV)
          << ", |e^T y - ||v||| " << ey_vs_v << ", y deviation " << y_dev;
        report(2, "verification chain at the solved point",
               verify.pass && cls.c == PairCase::IV && ey_vs_v <= 1e-6 && y_dev <= 1e-4, d.str());
    }
}

void criterion_3() {
    Vector target(5);
    target << 1.546, 0.261, 1.059, 0.125, -0.254;
    int within = 0;
    bool aloc_ok = true, runtime_monotone = true;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto model = stochastic_model(seed);
        CvarConfig cfg; // alpha 0.05, sizes 100..100000
        const auto rep = solve_saa(model, cfg, SolverConfig{});
        Vector xu(5);
        xu.head(3) = rep.x;
        xu.tail(2) = rep.u;
        const double dev = (xu - target).lpNorm<Eigen::Infinity>();
        if (dev <= 0.05) ++within;
        const double a = rep.stages.back().aloc;
        if (!(a >= 0.8 && a <= 1.4)) aloc_ok = false;
        for (std::size_t j = 1; j < rep.stages.size(); ++j)
            if (rep.stages[j].runtime_sec < rep.stages[j - 1].runtime_sec)
                runtime_monotone = false;
        d << "seed " << seed << ": dev " << dev << " aloc " << a << "; ";
    }
    report(3, "stochastic reproduction at N = 1e5 over five seeds",
           within >= 4 && aloc_ok && runtime_monotone,
           d.str() + (runtime_monotone ? "runtimes monotone" : "runtimes not monotone"));
}

void criterion_4() {
    Matrix R(3, 5);
    R << 0.10, 0.70, 0.80, 0.80, 1.00,
         0.30, 0.80, 0.60, 0.40, 0.70,
         0.50, 0.60, 0.50, 0.00, 0.60;
    Vector f(5);
    f << 0.01, 0.14, 0.27, 0.12, 0.46;
    const PortfolioInstance inst(R, f, 4.0);
    const auto feas = men_feasibility(inst);
    Vector r_ref(3);
    r_ref << 0.871, 0.647, 0.500;
    const double cs2 = std::pow(inst.c0 * inst.mean_deviation(), 2);
    std::ostringstream d;
    d << "r deviation " << (inst.r - r_ref).lpNorm<Eigen::Infinity>() << ", rbar " << inst.r_bar
      << ", ||r||^2 " << inst.r.squaredNorm() << ", (c0 S)^2 " << cs2 << ", iii " << feas.iii_value;
    // the reference 1.4273 is the four-decimal rounding of the exact value
    // 1.42725, which sits exactly on the +-5e-5 band edge; a one-ulp-scale
    // slack keeps the inclusive bound inclusive in floating point
    report(4, "worked portfolio quantities",
           (inst.r - r_ref).lpNorm<Eigen::Infinity>() <= 1e-12 &&
               std::abs(inst.r_bar - 0.6727) <= 5e-5 &&
               std::abs(inst.r.squaredNorm() - 1.4273) <= 5.0001e-5 &&
               std::abs(cs2 - 0.7251) <= 1e-3 && std::abs(feas.iii_value + 0.0294) <= 1e-3,
           d.str());
}

void criterion_5() {
    int budget_fail = 0, kkt_fail = 0, nest_fail = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        PortfolioInstance inst = [&] {
            for (int attempt = 0;; ++attempt) {
                const std::uint64_t key = rng::mix(4242, trial, attempt);
                const int n = 2 + static_cast<int>(rng::uniform01(rng::mix(key, 1)) * 4);
                const int T = n + 2 + static_cast<int>(rng::uniform01(rng::mix(key, 2)) * 10);
                Matrix R = testing::random_matrix(rng::mix(key, 3), n, T, 0.0, 1.0);
                Vector ff(T);
                for (int j = 0; j < T; ++j)
                    ff(j) = rng::uniform01(rng::mix(key, 4, static_cast<std::uint64_t>(j)));
                ff /= ff.sum();
                const double c0 = 1.0 + 5.0 * rng::uniform01(rng::mix(key, 5));
                PortfolioInstance cand(std::move(R), std::move(ff), c0);
                if (men_feasibility(cand).iv_ok) return cand;
            }
        }();
        const auto sol = men_solve(inst);
        if (std::abs(sol.w.sum() - 1.0) > 1e-12) ++budget_fail;
        if (sol.kkt_residual > 1e-9) ++kkt_fail;
        for (int j = 0; j < inst.scenarios(); ++j)
            if (sol.y(j) + 1e-12 < std::abs(inst.U.col(j).dot(sol.w))) ++nest_fail;
    }
    std::ostringstream d;
    d << "budget failures " << budget_fail << ", kkt failures " << kkt_fail
      << ", nesting failures " << nest_fail << " over 1000 instances";
    report(5, "analytical portfolio property suite",
           budget_fail == 0 && kkt_fail == 0 && nest_fail == 0, d.str());
}

void criterion_6() {
    int char_fail = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double a = -5.0 + 10.0 * rng::uniform01(rng::mix(515, trial, 0));
        const double b = -5.0 + 10.0 * rng::uniform01(rng::mix(515, trial, 1));
        const bool zero = std::abs(fb_scalar(a, b)) <= 1e-12;
        const bool comp = a >= -1e-12 && b >= -1e-12 && std::abs(a * b) <= 1e-12;
        if (zero != comp) ++char_fail;
    }

    const auto inst = testing::reference_instance();
    const auto mix = reformulate_vi(inst);
    const FbSystem sys(mix);
    int jac_checked = 0, jac_fail = 0, diag_fail = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Vector z = testing::random_vector(rng::mix(517, trial), 6, -2.0, 2.0);
        const Vector f1 = mix.f1(z);
        const auto jac = sys.jacobian(z);
        for (int i = 0; i < 3; ++i) {
            const double da = jac.da(i) + 1.0, db = jac.db(i) + 1.0;
            if (std::abs(da * da + db * db - 1.0) > 1e-12) ++diag_fail;
        }
        bool near_kink = false;
        for (int i = 0; i < 3; ++i)
            if (std::sqrt(z(i) * z(i) + f1(i) * f1(i)) < 1e-6) near_kink = true;
        if (near_kink) continue;
        ++jac_checked;
        Matrix fd(6, 6);
        for (int i = 0; i < 6; ++i) {
            Vector zp = z, zm = z;
            zp(i) += 1e-6;
            zm(i) -= 1e-6;
            fd.col(i) = (sys.value(zp) - sys.value(zm)) / 2e-6;
        }
        if ((jac.full - fd).cwiseAbs().maxCoeff() > 1e-5) ++jac_fail;
    }
    std::ostringstream d;
    d << "characterization failures " << char_fail << "/10000, jacobian failures " << jac_fail
      << "/" << jac_checked << ", diagonal-identity failures " << diag_fail;
    report(6, "FB core property suite",
           char_fail == 0 && jac_fail == 0 && diag_fail == 0 && jac_checked >= 100, d.str());
}

void criterion_7() {
    bool ok = true;
    std::ostringstream d;

    for (int n : {3, 5, 8}) {
        const Vector v = Vector::Constant(n, 1.0 / std::sqrt(double(n)));
        const Matrix h = Matrix::Identity(n, n) - 2.0 * v * v.transpose();
        const auto verdict = qc_analyze(h, ConeSpec::orthant(n));
        if (verdict.verdict != Verdict::QuasiConvex) {
            ok = false;
            d << "householder n=" << n << " not quasi-convex; ";
        }
    }

    Vector dd(3);
    dd << -1, -2, 3;
    const Matrix dneg = Matrix(dd.asDiagonal());
    const auto neg = qc_analyze(dneg, ConeSpec::orthant(3));
    if (neg.verdict != Verdict::NotQuasiConvex || !neg.witness ||
        !witness_valid(dneg, ConeSpec::orthant(3), *neg.witness)) {
        ok = false;
        d << "diag(-1,-2,3) verdict/witness failed; ";
    }

    // tail-pattern construction with eigenvectors (e1 +- en)/sqrt(2)
    {
        const int n = 4;
        Matrix V = Matrix::Identity(n, n);
        V(0, 0) = V(n - 1, 0) = 1.0 / std::sqrt(2.0);
        V(0, n - 1) = 1.0 / std::sqrt(2.0);
        V(n - 1, n - 1) = -1.0 / std::sqrt(2.0);
        Vector lam = Vector::Constant(n, 0.6);
        lam(0) = -1.0;
        lam(n - 1) = 1.0;
        const Matrix A = V * lam.asDiagonal() * V.transpose();
        const auto verdict = qc_analyze(A, ConeSpec::orthant(n));
        const auto ev = subdual_sufficient(SpectralData::compute(A), ConeSpec::orthant(n));
        if (verdict.verdict != Verdict::QuasiConvex || !verdict.certificate ||
            !(ev.ok && ev.condition == SubdualEvidence::Condition::TailPattern)) {
            ok = false;
            d << "tail-pattern example failed; ";
        }
        if (verdict.verdict == Verdict::QuasiConvex && !z_matrix_test(A)) {
            ok = false;
            d << "tail-pattern z-matrix cross-check failed; ";
        }
    }

    // spread-condition family with the all-ones leading eigenvector
    {
        const int n = 4;
        Eigen::HouseholderQR<Matrix> qr(Vector::Constant(n, 1.0 / std::sqrt(double(n))));
        Matrix V = qr.householderQ();
        if (V(0, 0) < 0) V = -V;
        Vector lam(n);
        lam << 0.0, 1.0, 1.1, 1.2; // within l2 + (1/n)(l2 - l1)
        const Matrix A = V * lam.asDiagonal() * V.transpose();
        const auto verdict = qc_analyze(A, ConeSpec::orthant(n));
        const auto ev = subdual_sufficient(SpectralData::compute(A), ConeSpec::orthant(n));
        if (verdict.verdict != Verdict::QuasiConvex || !ev.ok) {
            ok = false;
            d << "spread example failed; ";
        }
        if (verdict.verdict == Verdict::QuasiConvex && !z_matrix_test(A)) {
            ok = false;
            d << "spread z-matrix cross-check failed; ";
        }
    }

    // sampled sublevel-convexity oracle at n = 3 for quasi-convex verdicts
    {
        Vector hv = Vector::Constant(3, 1.0 / std::sqrt(3.0));
        std::vector<Matrix> cases = {Matrix::Identity(3, 3) - 2.0 * hv * hv.transpose()};
        Vector d2(3);
        d2 << -1, 1, 1;
        cases.push_back(Matrix(d2.asDiagonal()));
        long violations = 0;
        for (const auto& A : cases) {
            if (qc_analyze(A, ConeSpec::orthant(3)).verdict != Verdict::QuasiConvex) {
                ok = false;
                d << "oracle case not quasi-convex; ";
                continue;
            }
            const auto spectral = SpectralData::compute(A);
            const double lo = spectral.eigenvalues(0), hi = spectral.eigenvalues(2);
            for (int lv = 0; lv < 50; ++lv) {
                const double c = lo + (hi - lo) * (lv + 0.5) / 50.0;
                for (int s = 0; s < 10000; ++s) {
                    const Vector a = testing::random_vector(rng::mix(616, lv, s, 0), 3, 1e-6, 1.0);
                    const Vector b = testing::random_vector(rng::mix(616, lv, s, 1), 3, 1e-6, 1.0);
                    if (rayleigh(A, a) > c || rayleigh(A, b) > c) continue;
                    if (rayleigh(A, Vector(0.5 * (a + b))) > c + 1e-10) ++violations;
                }
            }
        }
        if (violations != 0) {
            ok = false;
            d << violations << " midpoint violations; ";
        }
    }

    report(7, "spherical verdict suite", ok, ok ? "all verdicts and cross-checks hold" : d.str());
}

void criterion_8() {
    const auto rows = probability_experiment({3}, {5, 20, 100, 500}, {2.0}, 2000, 1234);
    bool nondecreasing = true;
    std::ostringstream d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d << "T=" << rows[i].T << ": " << rows[i].rate_iv << "  ";
        if (i > 0) {
            // two-sigma binomial slack around the observed rates
            const double p = rows[i - 1].rate_iv;
            const double sigma = std::sqrt(std::max(p * (1 - p), 1e-6) / rows[i].trials);
            if (rows[i].rate_iv < p - 2.0 * sigma) nondecreasing = false;
        }
    }
    const bool tail_high = rows.back().rate_iv >= 0.95;
    report(8, "feasibility probability curve over T", nondecreasing && tail_high, d.str());
}

} // namespace

int main() {
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::cout << (failures == 0 ? "acceptance: all criteria passed\n"
                                : "acceptance: " + std::to_string(failures) + " criteria failed\n");
    return failures;
}
