#include "doctest.h"

#include "esoccp/simplex.hpp"
#include "esoccp/solvers.hpp"
#include "test_support.hpp"

using namespace esoccp;
using esoccp::testing::random_matrix;
using esoccp::testing::random_vector;

namespace {

// 1-D LCP x >= 0 perp x - 1 >= 0 embedded as a k = 2 problem by padding with
// an uncoupled trivial row (k >= 2 is required by the cone).
EsoclcpInstance scalar_lcp_embedding() {
    Matrix A = Matrix::Identity(2, 2);
    Vector p(2);
    p << -1.0, 1.0; // row 0: x - 1; row 1: x2 + 1 with x2 = 0
    return EsoclcpInstance(A, Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                           Matrix::Identity(1, 1), p, Vector::Ones(1));
}

} // namespace

TEST_CASE("newton solves the reference instance from ones") {
    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::Newton, Vector::Ones(6), SolverConfig{});
    REQUIRE(sol.trace.status == SolveStatus::Converged);
    CHECK(sol.verified);
    Vector xu(5);
    xu.head(3) = sol.x;
    xu.tail(2) = sol.u;
    CHECK((xu - testing::reference_xu()).lpNorm<Eigen::Infinity>() < 1e-5);
    const FbSystem sys(reformulate_vi(inst));
    CHECK(sys.merit(sol.ztilde) <= 1e-14);
}

TEST_CASE("inexact newton honors the residual bound and still converges") {
    const auto inst = testing::reference_instance();
    SolverConfig cfg;
    cfg.eta0 = 0.3;
    cfg.max_iter = 300;
    const auto sol = solve_esoclcp(inst, Method::Newton, Vector::Ones(6), cfg);
    REQUIRE(sol.trace.status == SolveStatus::Converged);
    CHECK(sol.verified);
    Vector xu(5);
    xu.head(3) = sol.x;
    xu.tail(2) = sol.u;
    CHECK((xu - testing::reference_xu()).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("newton stops immediately at a solution") {
    const auto inst = testing::reference_instance();
    const auto first = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    REQUIRE(first.verified);
    const FbSystem sys(reformulate_vi(inst));
    const auto again = newton_inexact(sys, first.ztilde, SolverConfig{});
    CHECK(again.trace.status == SolveStatus::Converged);
    CHECK(again.trace.iterations() == 0);
}

TEST_CASE("scalar lcp embedding has the analytic solution x = 1") {
    // the solution sits on the u = 0, t = 0 degenerate branch where the
    // residual scales quadratically in the distance, so componentwise
    // accuracy is about sqrt(tol)
    const auto inst = scalar_lcp_embedding();
    SolverConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = 300;
    for (auto method : {Method::Newton, Method::Lm, Method::LineSearch}) {
        const auto sol = solve_esoclcp(inst, method, Vector::Ones(4), cfg);
        REQUIRE(sol.trace.status == SolveStatus::Converged);
        CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(std::abs(sol.x(1)) < 1e-4);
        CHECK(sol.verified);
    }
}

TEST_CASE("lm reproduces the reference solution from ones") {
    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{});
    REQUIRE(sol.trace.status == SolveStatus::Converged);
    CHECK(sol.verified);
    CHECK(sol.trace.iterations() <= 30);
    Vector xu(5);
    xu.head(3) = sol.x;
    xu.tail(2) = sol.u;
    CHECK((xu - testing::reference_xu()).lpNorm<Eigen::Infinity>() < 1e-5);
    Vector xt_ref(3);
    xt_ref << 781.0 / 641.0, 0.0, 999.0 / 1328.0;
    CHECK((sol.ztilde.head(3) - xt_ref).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("lm converges immediately from a solution") {
    const auto inst = testing::reference_instance();
    const auto first = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    const FbSystem sys(reformulate_vi(inst));
    const auto again = lm(sys, first.ztilde, SolverConfig{});
    CHECK(again.trace.status == SolveStatus::Converged);
    CHECK(again.trace.iterations() == 0);
}

TEST_CASE("lm solves random well-conditioned instances") {
    // random instances need not be solvable at all; the assertions are that
    // solvable ones appear often, and that every converged run verifies
    int solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint64_t key = rng::mix(601, trial);
        // diagonally dominated blocks keep T, A, D honestly nonsingular
        Matrix A = random_matrix(rng::mix(key, 0), 3, 3, -1, 1) + 6.0 * Matrix::Identity(3, 3);
        Matrix D = random_matrix(rng::mix(key, 1), 2, 2, -1, 1) + 6.0 * Matrix::Identity(2, 2);
        const EsoclcpInstance inst(A, random_matrix(rng::mix(key, 2), 3, 2, -1, 1),
                                   random_matrix(rng::mix(key, 3), 2, 3, -1, 1), D,
                                   random_vector(rng::mix(key, 4), 3, -2, 2),
                                   random_vector(rng::mix(key, 5), 2, -2, 2));
        const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{});
        if (sol.trace.status != SolveStatus::Converged) continue;
        ++solved;
        const FbSystem sys(reformulate_vi(inst));
        CHECK(sys.value(sol.ztilde).norm() <= 1e-7);
        CHECK(sol.verified); // every converged run back-maps to a verified solution
    }
    CHECK(solved >= 20);
}

TEST_CASE("reformulation soundness: raw roots with t > 0 verify at 1e-6") {
    // any raw LM run ending with a small residual and strictly positive t
    // back-maps to a verified solution of the original cone problem
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint64_t key = rng::mix(641, trial);
        Matrix A = random_matrix(rng::mix(key, 0), 3, 3, -1, 1) + 5.0 * Matrix::Identity(3, 3);
        Matrix D = random_matrix(rng::mix(key, 1), 2, 2, -1, 1) + 5.0 * Matrix::Identity(2, 2);
        const EsoclcpInstance inst(A, random_matrix(rng::mix(key, 2), 3, 2, -1, 1),
                                   random_matrix(rng::mix(key, 3), 2, 3, -1, 1), D,
                                   random_vector(rng::mix(key, 4), 3, -2, 2),
                                   random_vector(rng::mix(key, 5), 2, -2, 2));
        const FbSystem sys(reformulate_vi(inst));
        const Vector z0 = random_vector(rng::mix(key, 6), 6, -1.0, 1.5);
        const auto run = lm(sys, z0, SolverConfig{1e-9, 200});
        // t bounded away from zero singles out the nondegenerate branch;
        // roots with t ~ sqrt(residual) sit on the u = 0 boundary where
        // componentwise accuracy degrades to the square root of the residual
        if (run.trace.status != SolveStatus::Converged || run.z(5) <= 1e-3) continue;
        ++checked;
        auto [x, u] = back_map(run.z, 3, 2);
        CHECK(verify_solution(inst, x, u).pass);
    }
    CHECK(checked >= 10);
}

TEST_CASE("line search reaches a stationary point on the reference instance") {
    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::LineSearch, Vector::Ones(6), SolverConfig{});
    REQUIRE(sol.trace.status == SolveStatus::Converged);
    const FbSystem sys(reformulate_vi(inst));
    CHECK(sys.merit_gradient(sol.ztilde).norm() <= 1e-7);
    CHECK(sys.merit(sol.ztilde) <= 1e-12);
    // merit decreases monotonically under the Armijo rule
    const auto& rec = sol.trace.records;
    for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec[i].merit <= rec[i - 1].merit + 1e-12);
}

TEST_CASE("newton superlinear tail on the reference instance") {
    const auto inst = testing::reference_instance();
    const FbSystem sys(reformulate_vi(inst));
    Vector z0 = Vector::Ones(6);
    z0(4) = -1.0; // the verified basin
    const auto run = newton_inexact(sys, z0, SolverConfig{1e-13});
    REQUIRE(run.trace.status == SolveStatus::Converged);
    std::vector<double> norms;
    for (const auto& r : run.trace.records) norms.push_back(std::sqrt(2.0 * r.merit));
    REQUIRE(norms.size() >= 4);
    // weak superlinearity of the final steps: ||F_{j+1}|| <= 10 ||F_j||^1.5,
    // down to the rounding floor of the residual evaluation
    const double floor = 5e-14;
    const auto m = norms.size();
    for (std::size_t i = m - 3; i + 1 < m; ++i) {
        if (norms[i] < floor) continue;
        CHECK(norms[i + 1] <= std::max(10.0 * std::pow(norms[i], 1.5), floor));
    }
}

TEST_CASE("trace export mirrors the iteration columns") {
    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{});
    const std::string csv = trace_to_csv(sol.trace);
    CHECK(csv.rfind("iter,merit,grad_norm,mu,step_norm", 0) == 0);
    // one line per record plus header
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(sol.trace.records.size()) + 1);
}

TEST_CASE("schur complement") {
    // block-diagonal: B~ = 0 happens only with B = 0 and Ae = 0
    Matrix A(2, 2);
    A << 1, -1, -1, 1; // row sums zero -> Ae = 0
    EsoclcpInstance inst(A, Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Identity(1, 1),
                         Vector::Zero(2), Vector::Ones(1));
    const FbSystem sys(reformulate_vi(inst));
    Vector z(4);
    z << 0.3, 0.4, 0.2, 0.7; // t > 0 keeps D~ invertible
    CHECK(schur_complement(sys, z).isApprox(A, 1e-12));

    // 2x2 hand example A=4, B=2, C=2, D=2 -> 4 - 2*(1/2)*2 = 2
    Matrix m(2, 2);
    m << 4, 2, 2, 2;
    Matrix a = m.topLeftCorner(1, 1), b = m.topRightCorner(1, 1), c = m.bottomLeftCorner(1, 1),
           d = m.bottomRightCorner(1, 1);
    CHECK((a - b * d.inverse() * c)(0, 0) == doctest::Approx(2.0));

    // reference instance at the solution vs dense-inverse oracle
    const auto ref = testing::reference_instance();
    const auto mix = reformulate_vi(ref);
    const FbSystem rsys(mix);
    const auto sol = solve_esoclcp(ref, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    REQUIRE(sol.verified);
    const Matrix schur = schur_complement(rsys, sol.ztilde);
    const Matrix oracle =
        ref.A - mix.b_tilde() * mix.d_tilde(sol.ztilde).inverse() * mix.c_tilde(sol.ztilde);
    CHECK((schur - oracle).cwiseAbs().maxCoeff() < 1e-9);

    // singular D~ at u = 0, t = 0
    Vector z0 = Vector::Zero(4);
    EsoclcpInstance inst0(A, Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Identity(1, 1),
                          Vector::Zero(2), Vector::Zero(1));
    CHECK_THROWS_AS(schur_complement(FbSystem(reformulate_vi(inst0)), z0), SchurUnavailable);
}

namespace {

// Exhaustive grid oracle for the signed-S0 feasibility over the simplex.
bool s0_grid_oracle(const Matrix& xi, double step = 1e-2) {
    const int k = static_cast<int>(xi.rows());
    REQUIRE(k == 3);
    for (double a = 0.0; a <= 1.0 + 1e-12; a += step) {
        for (double b = 0.0; a + b <= 1.0 + 1e-12; b += step) {
            Vector u(3);
            u << a, b, 1.0 - a - b;
            if ((xi * u).minCoeff() >= -1e-9) return true;
        }
    }
    return false;
}

IndexPartition all_residual_partition(int k, bool positive) {
    IndexPartition part;
    for (int i = 0; i < k; ++i) {
        part.resid.push_back(i);
        (positive ? part.pos : part.neg).push_back(i);
    }
    return part;
}

} // namespace

TEST_CASE("signed s0 test") {
    // Xi = I with everything positive-index: witness e/k
    const auto rep = signed_s0_test(Matrix::Identity(3, 3), all_residual_partition(3, true));
    CHECK(rep.signed_s0);
    CHECK(rep.fb_regular_certified);
    REQUIRE(rep.lp_witness.has_value());
    CHECK((*rep.lp_witness - Vector::Constant(3, 1.0 / 3.0)).norm() < 1e-6);

    // Xi = -I forces u = 0: not S0
    CHECK_FALSE(signed_s0_test(Matrix(-Matrix::Identity(3, 3)), all_residual_partition(3, true))
                    .signed_s0);

    // random 3x3 verdicts against the simplex grid oracle (Lambda = I so the
    // oracle sees Xi itself)
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix m = random_matrix(rng::mix(701, trial), 3, 3, -1.0, 1.0);
        const auto part = all_residual_partition(3, true);
        const auto verdict = signed_s0_test(m, part);
        const bool oracle = s0_grid_oracle(m);
        if (verdict.signed_s0 != oracle) {
            // boundary cases can disagree at grid resolution; require the LP
            // witness to be genuinely feasible whenever claimed
            CHECK(verdict.signed_s0);
        }
        if (verdict.signed_s0) {
            REQUIRE(verdict.lp_witness.has_value());
            const Vector& u = *verdict.lp_witness;
            CHECK(u.minCoeff() >= -1e-9);
            CHECK(u.sum() == doctest::Approx(1.0).epsilon(1e-8));
            CHECK((m * u).minCoeff() >= -1e-9);
        }
    }
}

TEST_CASE("signed s0 verdict is invariant under positive row scaling") {
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = random_matrix(rng::mix(709, trial), 3, 3, -1.0, 1.0);
        Vector scale(3);
        for (int i = 0; i < 3; ++i)
            scale(i) = 0.1 + 5.0 * rng::uniform01(rng::mix(719, trial, i));
        const auto part = all_residual_partition(3, true);
        const bool base = signed_s0_test(m, part).signed_s0;
        const bool scaled = signed_s0_test(Matrix(scale.asDiagonal() * m), part).signed_s0;
        CHECK(base == scaled);
    }
}

TEST_CASE("two phase simplex solves a reference lp") {
    // min -x1 - 2 x2 s.t. x1 + x2 + s = 4, x1 <= 3 -> optimum at (0, 4)? with
    // slack: x1 + x2 <= 4, x1 <= 3, x >= 0: optimum (0,4) value -8
    Matrix a(2, 4);
    a << 1, 1, 1, 0, 1, 0, 0, 1;
    Vector b(2);
    b << 4, 3;
    Vector c(4);
    c << -1, -2, 0, 0;
    const auto sol = detail::solve_lp(a, b, c);
    REQUIRE(sol.feasible);
    CHECK(sol.objective == doctest::Approx(-8.0));
}

TEST_CASE("regularity pipeline at the reference solution") {
    const auto inst = testing::reference_instance();
    const FbSystem sys(reformulate_vi(inst));
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    REQUIRE(sol.verified);
    const auto part = partition_indices(sys, sol.ztilde);
    const auto rep = signed_s0_test(schur_complement(sys, sol.ztilde), part);
    // at an exact solution the residual set is empty and Lambda = 0, so the
    // zero matrix is trivially S0
    CHECK(rep.signed_s0);
}
