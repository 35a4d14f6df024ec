#include "doctest.h"

#include "esoccp/cones.hpp"
#include "esoccp/solvers.hpp"
#include "test_support.hpp"

using namespace esoccp;
using esoccp::testing::random_vector;

namespace {

// Brute-force projection of x onto the Lorentz cone: least-squares over the
// parameterized boundary/interior, refined on a fine grid.  Independent of
// the closed-form branch logic it checks.
Vector brute_lorentz_projection(const Vector& x, int grid = 4000) {
    const Eigen::Index n = x.size();
    const double tail = x.tail(n - 1).norm();
    if (x(0) >= tail) return x;
    Vector best = Vector::Zero(n);
    double best_d = x.squaredNorm();
    if (tail == 0.0) return best;
    const Vector dir = x.tail(n - 1) / tail;
    // candidates (r, s): points (r, s * dir) with r >= |s| >= 0
    const double rmax = std::max(1.0, 2.0 * x.norm());
    for (int i = 0; i <= grid; ++i) {
        const double r = rmax * i / grid;
        for (int j = 0; j <= 40; ++j) {
            const double s = r * j / 40.0;
            Vector cand(n);
            cand(0) = r;
            cand.tail(n - 1) = s * dir;
            const double d = (cand - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("cone membership on the reference example") {
    Vector z1(3);
    z1 << 1, 1, 0.5;
    CHECK(contains(ConeSpec::esoc(2, 1), z1));
    Vector z2(3);
    z2 << 1, 0.3, 0.5;
    CHECK_FALSE(contains(ConeSpec::esoc(2, 1), z2));

    // The rational reference approximates the true solution to ~1e-5, so
    // membership holds at that slack, and exactly for the solved point.
    CHECK(contains(ConeSpec::esoc(3, 2), testing::reference_xu(), 1e-4));
    CHECK(contains(ConeSpec::dual_esoc(3, 2), testing::reference_F(), 1e-4));

    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    REQUIRE(sol.verified);
    Vector z(5);
    z.head(3) = sol.x;
    z.tail(2) = sol.u;
    CHECK(contains(ConeSpec::esoc(3, 2), z));
    CHECK(contains(ConeSpec::dual_esoc(3, 2), inst.F(sol.x, sol.u)));
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(contains(ConeSpec::esoc(3, 2), Vector::Ones(4)), std::invalid_argument);
    CHECK_THROWS_AS(complementarity_residual(ConeSpec::orthant(2), Vector::Ones(2),
                                             Vector::Ones(3)),
                    std::invalid_argument);
}

TEST_CASE("lorentz moreau parts") {
    Vector in_cone(3);
    in_cone << 2, 1, 0;
    auto parts = lorentz_moreau(in_cone);
    CHECK(parts.plus.isApprox(in_cone));
    CHECK(parts.minus.norm() == doctest::Approx(0.0));
    CHECK(parts.abs.isApprox(in_cone));

    Vector neg(3);
    neg << -2, 1, 0;
    parts = lorentz_moreau(neg);
    CHECK(parts.plus.norm() == doctest::Approx(0.0));
    CHECK(parts.minus.isApprox(Vector(-neg)));
    CHECK(parts.abs.isApprox(Vector(-neg)));

    Vector outside(3);
    outside << 0, 3, 4;
    parts = lorentz_moreau(outside);
    Vector plus_expected(3), minus_expected(3), abs_expected(3);
    plus_expected << 2.5, 1.5, 2.0;
    minus_expected << 2.5, -1.5, -2.0;
    abs_expected << 5.0, 0.0, 0.0;
    CHECK(parts.plus.isApprox(plus_expected, 1e-12));
    CHECK(parts.minus.isApprox(minus_expected, 1e-12));
    CHECK(parts.abs.isApprox(abs_expected, 1e-12));

    // the same point against the grid-refined projection oracle
    const Vector brute = brute_lorentz_projection(outside);
    CHECK((parts.plus - brute).norm() < 2e-2);

    CHECK(lorentz_moreau(Vector::Zero(4)).abs.norm() == 0.0);
}

TEST_CASE("moreau identity and cone membership of parts over random draws") {
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng::uniform01(rng::mix(11, trial)) * 6);
        const Vector x = random_vector(rng::mix(17, trial), n, -3.0, 3.0);
        const auto parts = lorentz_moreau(x);
        CHECK((x - (parts.plus - parts.minus)).norm() <= 1e-12 * std::max(1.0, x.norm()));
        CHECK(std::abs(parts.plus.dot(parts.minus)) <= 1e-12 * std::max(1.0, x.squaredNorm()));
        CHECK((parts.abs - parts.plus - parts.minus).norm() <= 1e-12);
        CHECK(contains(ConeSpec::lorentz(n), parts.plus, 1e-10));
        CHECK(contains(ConeSpec::lorentz(n), parts.minus, 1e-10));
    }
}

TEST_CASE("esoc is subdual with a strict dual witness") {
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + trial % 3, l = 1 + trial % 2;
        Vector u = random_vector(rng::mix(23, trial), l, -2.0, 2.0);
        Vector x = random_vector(rng::mix(29, trial), k, 0.0, 2.0);
        x.array() += u.norm(); // guarantees membership in L
        Vector z(k + l);
        z.head(k) = x;
        z.tail(l) = u;
        REQUIRE(contains(ConeSpec::esoc(k, l), z));
        CHECK(contains(ConeSpec::dual_esoc(k, l), z));
    }

    // fixed witness in M \ L for each small (k, l): e^T x >= ||u|| but x has a
    // zero component below ||u||
    for (int k = 2; k <= 4; ++k) {
        for (int l = 1; l <= 3; ++l) {
            Vector z = Vector::Zero(k + l);
            z(0) = 2.0;
            z(k) = 1.0;
            CHECK(contains(ConeSpec::dual_esoc(k, l), z));
            CHECK_FALSE(contains(ConeSpec::esoc(k, l), z));
        }
    }
}

TEST_CASE("membership is positively homogeneous") {
    const double scales[] = {0.0, 0.5, 2.0, 10.0};
    for (int trial = 0; trial < 200; ++trial) {
        const Vector z = random_vector(rng::mix(31, trial), 5, -1.0, 2.0);
        for (const auto& cone :
             {ConeSpec::orthant(5), ConeSpec::lorentz(5), ConeSpec::esoc(3, 2),
              ConeSpec::dual_esoc(3, 2)}) {
            if (!contains(cone, z)) continue;
            for (double t : scales) CHECK(contains(cone, Vector(t * z)));
        }
    }
}

TEST_CASE("complementarity residual") {
    Vector z(2), w(2);
    z << 1, 0;
    w << 0, 2;
    CHECK(complementarity_residual(ConeSpec::orthant(2), z, w) == doctest::Approx(0.0));
    z << 1, 1;
    w << 1, 0;
    CHECK(complementarity_residual(ConeSpec::orthant(2), z, w) == doctest::Approx(1.0));

    const auto inst = testing::reference_instance();
    const auto sol = solve_esoclcp(inst, Method::Lm, Vector::Ones(6), SolverConfig{1e-12});
    REQUIRE(sol.verified);
    Vector zz(5);
    zz.head(3) = sol.x;
    zz.tail(2) = sol.u;
    CHECK(complementarity_residual(ConeSpec::esoc(3, 2), zz, inst.F(sol.x, sol.u)) <= 1e-6);
}
