#include <doctest.h>

#include "helpers.hpp"
#include "sublevel/operators.hpp"

using namespace sublevel;
using testutil::random_certified_poly;
using testutil::random_spd;
using testutil::random_vector;

namespace {

Subspace span_e1() {
    Eigen::MatrixXd b(2, 1), c(2, 1);
    b << 1, 0;
    c << 0, 1;
    return Subspace(b, c);
}

Subspace span_e2() {
    Eigen::MatrixXd b(2, 1), c(2, 1);
    b << 0, 1;
    c << 1, 0;
    return Subspace(b, c);
}

Eigen::VectorXd scalar(double t) {
    Eigen::VectorXd y(1);
    y << t;
    return y;
}

} // namespace

TEST_CASE("restriction closed forms") {
    const HomogeneousPolynomial f(2, 2, {{{2, 0}, 1.0}, {{0, 2}, 4.0}});
    CHECK(restrict_poly(f, span_e2(), scalar(1.5)) == doctest::Approx(4.0 * 1.5 * 1.5));

    const HomogeneousPolynomial ball = ball_polynomial(4, 4);
    GrassmannSampler s(3);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const Subspace E = s.sample(2, 4);
        const Eigen::VectorXd y = random_vector(rng, 2);
        CHECK(restrict_poly(ball, E, y) == doctest::Approx(std::pow(y.norm(), 4)).epsilon(1e-10));
        // homogeneity in y
        CHECK(restrict_poly(ball, E, (2 * y).eval()) ==
              doctest::Approx(16.0 * restrict_poly(ball, E, y)).epsilon(1e-10));
    }
}

TEST_CASE("infimal projection closed forms") {
    SolverConfig newton_only;
    newton_only.use_quadratic_shortcut = false;

    SUBCASE("axis-aligned ellipse") {
        const HomogeneousPolynomial f(2, 2, {{{2, 0}, 1.0}, {{0, 2}, 4.0}});
        for (double t : {0.5, 1.0, -2.0}) {
            const InfProjResult quad = inf_project(f, span_e1(), scalar(t));
            CHECK(quad.value == doctest::Approx(t * t).epsilon(1e-10));
            CHECK(quad.minimizer.cwiseAbs().maxCoeff() < 1e-12);

            const InfProjResult nr = inf_project(f, span_e1(), scalar(t), newton_only);
            CHECK(nr.value == doctest::Approx(t * t).epsilon(1e-8));
            CHECK(nr.kkt_residual <= 1e-9 * (1.0 + nr.value));
        }
    }

    SUBCASE("coupled quadratic: Schur complement by hand") {
        const HomogeneousPolynomial f(2, 2, {{{2, 0}, 2.0}, {{1, 1}, 2.0}, {{0, 2}, 2.0}});
        const InfProjResult r = inf_project(f, span_e1(), scalar(1.0));
        CHECK(r.value == doctest::Approx(1.5).epsilon(1e-10));
        const InfProjResult rn = inf_project(f, span_e1(), scalar(1.0), newton_only);
        CHECK(rn.value == doctest::Approx(1.5).epsilon(1e-8));
    }

    SUBCASE("origin maps to zero") {
        Rng rng(5);
        const HomogeneousPolynomial f = random_certified_poly(rng, 3, 4);
        GrassmannSampler s(6);
        const Subspace E = s.sample(1, 3);
        const InfProjResult r = inf_project(f, E, scalar(0.0));
        CHECK(r.value == doctest::Approx(0.0));
        CHECK(r.minimizer.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("quadratic compression and shorted operator") {
    Eigen::MatrixXd Q(2, 2);
    Q << 1, 0, 0, 4;
    CHECK(quad_project(Q, span_e1())(0, 0) == doctest::Approx(1.0));
    CHECK(quad_restrict(Q, span_e1())(0, 0) == doctest::Approx(1.0));
    CHECK(quad_project(Q, span_e2())(0, 0) == doctest::Approx(4.0));
    CHECK(quad_restrict(Q, span_e2())(0, 0) == doctest::Approx(4.0));

    Q << 2, 1, 1, 2;
    CHECK(quad_project(Q, span_e1())(0, 0) == doctest::Approx(1.5));
    CHECK(quad_restrict(Q, span_e1())(0, 0) == doctest::Approx(2.0));

    Eigen::MatrixXd bad(2, 2);
    bad << 1, 0, 0, -1;
    CHECK_THROWS_AS(quad_project(bad, span_e1()), precondition_error);
}

TEST_CASE("shorted operator below compression (PSD order)") {
    Rng rng(9);
    GrassmannSampler s(10);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + int(rng.bits() % 3);
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const Eigen::MatrixXd Q = random_spd(rng, n);
        const Subspace E = s.sample(j, n);
        const Eigen::MatrixXd gap = quad_restrict(Q, E) - quad_project(Q, E);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * (1.0 + gap.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("Newton path agrees with the shorted operator") {
    SolverConfig newton_only;
    newton_only.use_quadratic_shortcut = false;
    Rng rng(11);
    GrassmannSampler s(12);
    for (int t = 0; t < 60; ++t) {
        const int n = 2 + int(rng.bits() % 2);
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const Eigen::MatrixXd Q = random_spd(rng, n);
        const HomogeneousPolynomial f = from_quadratic_form(Q);
        const Subspace E = s.sample(j, n);
        const Eigen::MatrixXd P = quad_project(Q, E);
        const Eigen::VectorXd y = random_vector(rng, j);
        const double exact = y.dot(P * y);
        const double newton = inf_project(f, E, y, newton_only).value;
        CHECK(std::abs(newton - exact) <= 1e-8 * (1.0 + std::abs(exact)));
    }
}

TEST_CASE("projection value is d-homogeneous") {
    Rng rng(13);
    GrassmannSampler s(14);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + int(rng.bits() % 2);
        const int d = (rng.uniform01() < 0.5) ? 2 : 4;
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const HomogeneousPolynomial f = random_certified_poly(rng, n, d);
        const Subspace E = s.sample(j, n);
        const Eigen::VectorXd y = random_vector(rng, j);
        const double v1 = inf_project(f, E, y).value;
        const double v2 = inf_project(f, E, (2 * y).eval()).value;
        CHECK(std::abs(v2 - std::pow(2.0, d) * v1) <= 1e-6 * (1.0 + std::abs(v2)));
    }
}

TEST_CASE("projection never exceeds restriction") {
    Rng rng(15);
    GrassmannSampler s(16);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + int(rng.bits() % 3);
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const int d = (rng.uniform01() < 0.5) ? 2 : 4;
        const HomogeneousPolynomial f = random_certified_poly(rng, n, d);
        const Subspace E = s.sample(j, n);
        const Eigen::VectorXd y = random_vector(rng, j);
        CHECK(inf_project(f, E, y).value <=
              restrict_poly(f, E, y) * (1 + 1e-10) + 1e-12);
    }
}

TEST_CASE("projection is concave in the polynomial") {
    Rng rng(17);
    GrassmannSampler s(18);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + int(rng.bits() % 2);
        const int d = (rng.uniform01() < 0.5) ? 2 : 4;
        const HomogeneousPolynomial f = random_certified_poly(rng, n, d);
        const HomogeneousPolynomial g = random_certified_poly(rng, n, d);
        const double lambda = rng.uniform01();
        const HomogeneousPolynomial mix = f.scaled(lambda).plus(g, 1.0 - lambda);
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const Subspace E = s.sample(j, n);
        const Eigen::VectorXd y = random_vector(rng, j);
        const double lhs = inf_project(mix, E, y).value;
        const double rhs = lambda * inf_project(f, E, y).value +
                           (1.0 - lambda) * inf_project(g, E, y).value;
        CHECK(lhs >= rhs - 1e-8 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("membership identity on boundary samples") {
    Rng rng(19);
    GrassmannSampler s(20);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + int(rng.bits() % 2);
        const int d = (rng.uniform01() < 0.5) ? 2 : 4;
        const HomogeneousPolynomial f = random_certified_poly(rng, n, d);
        const Eigen::VectorXd u = testutil::random_unit(rng, n);
        const Eigen::VectorXd x = u / std::pow(f(u), 1.0 / d); // f(x) = 1
        const int j = 1 + int(rng.bits() % std::uint64_t(n - 1));
        const Subspace E = s.sample(j, n);
        CHECK(inf_project(f, E, E.coords(x)).value <= 1.0 + 1e-6);
    }
}
