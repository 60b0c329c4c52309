#include <doctest.h>

#include "helpers.hpp"
#include "sublevel/lattice.hpp"

using namespace sublevel;

namespace {

HomogeneousPolynomial circle() { return ball_polynomial(2, 2); }

HomogeneousPolynomial ellipse_poly() {
    return HomogeneousPolynomial(2, 2, {{{2, 0}, 1.0}, {{0, 2}, 4.0}});
}

CoercivityCertificate cert_for(const HomogeneousPolynomial& f) {
    return certify_positive(f);
}

// Independent oracle: direct integer enumeration with integer arithmetic
// (degree-2 forms with integer coefficients only).
long long brute_count_quadratic(const Eigen::Matrix2i& Q, long long alpha, long long box) {
    long long count = 0;
    for (long long x = -box; x <= box; ++x)
        for (long long y = -box; y <= box; ++y) {
            const long long v = Q(0, 0) * x * x + 2 * Q(0, 1) * x * y + Q(1, 1) * y * y;
            if (v <= alpha) ++count;
        }
    return count;
}

} // namespace

TEST_CASE("exact counts for the disk") {
    const auto cert = cert_for(circle());

    CHECK(count_points(circle(), 2.0, cert) == 9);
    CHECK(count_points(circle(), 100.0, cert) == 317);
    CHECK(count_points(circle(), 0.5, cert) == 1); // alpha below the first shell

    Eigen::Matrix2i Q;
    Q << 1, 0, 0, 1;
    CHECK(brute_count_quadratic(Q, 100, 11) == 317); // frozen oracle agreement

    // boundary ties must be included exactly: alpha = 25 has 12 points on the rim
    CHECK(count_points(circle(), 25.0, cert) - count_points(circle(), 24.999, cert) == 12);
}

TEST_CASE("count is invariant under the dilation identity") {
    const auto cert = cert_for(ellipse_poly());
    const auto scaled = ellipse_poly().scaled(0.25);
    const auto cert_scaled = cert_for(scaled);
    // f(x) <= 4 alpha  <=>  f(x)/4 <= alpha
    for (double alpha : {3.0, 10.0, 47.5})
        CHECK(count_points(ellipse_poly(), 4.0 * alpha, cert) ==
              count_points(scaled, alpha, cert_scaled));
}

TEST_CASE("count is nondecreasing in alpha") {
    const auto cert = cert_for(ellipse_poly());
    long long prev = 0;
    for (double alpha : {0.5, 1.0, 2.0, 5.0, 9.0, 20.0, 50.0}) {
        const long long c = count_points(ellipse_poly(), alpha, cert);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("smallest nonzero lattice value") {
    CHECK(min_nonzero(ellipse_poly(), cert_for(ellipse_poly())) == doctest::Approx(1.0));
    CHECK(min_nonzero(ball_polynomial(3, 4), cert_for(ball_polynomial(3, 4))) ==
          doctest::Approx(1.0));

    // eigenvalues (1, 9) rotated 45 degrees: minimum 2 at (1,1)
    const HomogeneousPolynomial rotated(2, 2, {{{2, 0}, 5.0}, {{1, 1}, -8.0}, {{0, 2}, 5.0}});
    CHECK(min_nonzero(rotated, cert_for(rotated)) == doctest::Approx(2.0));
}

TEST_CASE("enumeration budget guard") {
    LatticeConfig tiny;
    tiny.max_enumeration = 100;
    const auto cert = cert_for(circle());
    CHECK_THROWS_AS(count_points(circle(), 1e4, cert, tiny), budget_exceeded);
}

TEST_CASE("primitive count equals the Moebius sum") {
    const auto cert = cert_for(circle());
    CHECK(primitive_count(circle(), 100.0, cert) == moebius_check(circle(), 100.0, cert));

    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + int(rng.bits() % 2);
        const HomogeneousPolynomial f = testutil::random_certified_poly(rng, n, 2);
        const auto cf = cert_for(f);
        const double alpha = (n == 2) ? 400.0 : 60.0;
        CHECK(primitive_count(f, alpha, cf) == moebius_check(f, alpha, cf));
    }

    // alpha below the smallest nonzero value: no primitive points at all
    CHECK(primitive_count(circle(), 0.5, cert) == 0);
    CHECK(moebius_check(circle(), 0.5, cert) == 0);
}

TEST_CASE("moebius sieve values") {
    const auto mu = intlin::moebius_sieve(30);
    CHECK(mu[1] == 1);
    CHECK(mu[2] == -1);
    CHECK(mu[3] == -1);
    CHECK(mu[4] == 0);
    CHECK(mu[6] == 1);
    CHECK(mu[12] == 0);
    CHECK(mu[30] == -1);
}

TEST_CASE("discrepancy report for the disk") {
    EstimatorConfig cfg;
    cfg.outer_samples = 256;
    cfg.inner_samples = 512;
    cfg.seed = 3;
    cfg.workers = 2;
    const auto cert = cert_for(circle());
    const CountReport rep = discrepancy_report(circle(), 100.0, cfg, cert);
    CHECK(rep.count == 317);
    CHECK(std::abs(rep.main_term.value - 100.0 * M_PI) <=
          std::max(3.0 * rep.main_term.std_error, 1e-7));
    CHECK(rep.components.size() == 2);
    CHECK(rep.components[0].value == doctest::Approx(1.0));       // V_0
    CHECK(rep.components[1].value == doctest::Approx(10.0 * M_PI) // V_1 at alpha = 100
              .epsilon(1e-6));
    CHECK(rep.ratio == doctest::Approx(std::abs(317.0 - rep.main_term.value) / rep.error_bound));
}

TEST_CASE("integer linear algebra") {
    SUBCASE("column HNF solves and certifies") {
        IntMatrix A(1, 2);
        A << 1, 1;
        IntMatrix H, U;
        intlin::column_hnf(A, H, U);
        CHECK(H(0, 0) == 1);
        const IntMatrix AU = A * U;
        CHECK(AU(0, 0) == H(0, 0));
        CHECK(AU(0, 1) == 0);
    }

    SUBCASE("smith invariants") {
        IntMatrix M(2, 2);
        M << 2, 0, 0, 3;
        const auto inv = intlin::smith_invariants(M);
        CHECK(inv[0] == 1);
        CHECK(inv[1] == 6);

        IntMatrix I2 = IntMatrix::Identity(2, 2);
        const auto inv2 = intlin::smith_invariants(I2);
        CHECK(inv2[0] == 1);
        CHECK(inv2[1] == 1);
    }

    SUBCASE("primitivity of integer bases") {
        IntMatrix good(2, 1);
        good << 1, -1;
        CHECK(IntegerLatticeBasis(good).primitive());
        CHECK(IntegerLatticeBasis(good).covolume() == doctest::Approx(std::sqrt(2.0)));

        IntMatrix bad(2, 1);
        bad << 2, 0;
        CHECK_FALSE(IntegerLatticeBasis(bad).primitive());

        IntMatrix dependent(2, 2);
        dependent << 1, 2, 1, 2;
        CHECK_THROWS_AS(IntegerLatticeBasis{dependent}, precondition_error);
    }
}

TEST_CASE("sublattice counting") {
    EstimatorConfig cfg;
    cfg.inner_samples = 4096;
    cfg.seed = 5;

    SUBCASE("coordinate axis inside the ellipse") {
        IntMatrix G(2, 1);
        G << 1, 0;
        const IntegerLatticeBasis L(G);
        const auto cert = cert_for(ellipse_poly());
        const SublatticeCount r = sublattice_count(ellipse_poly(), L, 100.0, cert, cfg);
        CHECK(r.count == 21);
        CHECK(r.main_term.value == doctest::Approx(20.0).epsilon(1e-9)); // exact for j = 1
    }

    SUBCASE("diagonal line inside the disk") {
        IntMatrix G(2, 1);
        G << 1, -1;
        const IntegerLatticeBasis L(G);
        const auto cert = cert_for(circle());
        const SublatticeCount r = sublattice_count(circle(), L, 50.0, cert, cfg);
        CHECK(r.count == 11);
        CHECK(r.main_term.value == doctest::Approx(10.0).epsilon(1e-9));
    }

    SUBCASE("full lattice reduces to the plain count") {
        IntMatrix G = IntMatrix::Identity(2, 2);
        const IntegerLatticeBasis L(G);
        const auto cert = cert_for(circle());
        const SublatticeCount r = sublattice_count(circle(), L, 100.0, cert, cfg);
        CHECK(r.count == count_points(circle(), 100.0, cert));
    }

    SUBCASE("non-primitive bases are rejected") {
        IntMatrix G(2, 1);
        G << 2, 0;
        const IntegerLatticeBasis L(G);
        const auto cert = cert_for(circle());
        CHECK_THROWS_AS(sublattice_count(circle(), L, 100.0, cert, cfg), not_primitive);
    }
}

TEST_CASE("coset counting") {
    EstimatorConfig cfg;
    cfg.inner_samples = 1024;
    const auto cert = cert_for(circle());

    SUBCASE("homogeneous constraint matches the sublattice") {
        IntMatrix A(1, 2);
        A << 1, 1;
        IntVector b(1);
        b << 0;
        const CosetCount r = coset_count(circle(), A, b, 50.0, cert, cfg);
        CHECK(r.solvable);
        CHECK(r.count == 11);
        CHECK(r.has_main_term);
        CHECK(r.main_term.value == doctest::Approx(10.0).epsilon(1e-9));
    }

    SUBCASE("affine constraint against brute force") {
        IntMatrix A(1, 2);
        A << 1, 1;
        IntVector b(1);
        b << 1;
        const CosetCount r = coset_count(circle(), A, b, 25.0, cert, cfg);
        CHECK(r.solvable);
        long long brute = 0;
        for (long long x = -10; x <= 10; ++x)
            for (long long y = -10; y <= 10; ++y)
                if (x + y == 1 && x * x + y * y <= 25) ++brute;
        CHECK(r.count == brute);
        CHECK_FALSE(r.has_main_term);
    }

    SUBCASE("parity obstruction") {
        IntMatrix A(1, 2);
        A << 2, 2;
        IntVector b(1);
        b << 1;
        const CosetCount r = coset_count(circle(), A, b, 25.0, cert, cfg);
        CHECK_FALSE(r.solvable);
        CHECK(r.count == 0);
    }

    SUBCASE("full-rank constraints pin a single point") {
        IntMatrix A = IntMatrix::Identity(2, 2);
        IntVector b(2);
        b << 3, 4;
        CHECK(coset_count(circle(), A, b, 30.0, cert, cfg).count == 1);
        CHECK(coset_count(circle(), A, b, 20.0, cert, cfg).count == 0);
    }

    SUBCASE("no constraints reduce to the plain count") {
        const CosetCount r =
            coset_count(circle(), IntMatrix(0, 2), IntVector(0), 100.0, cert, cfg);
        CHECK(r.count == 317);
    }

    SUBCASE("rank-deficient constraints are rejected") {
        IntMatrix A(2, 2);
        A << 1, 1, 2, 2;
        IntVector b(2);
        b << 0, 0;
        CHECK_THROWS_AS(coset_count(circle(), A, b, 10.0, cert, cfg), precondition_error);
    }
}

TEST_CASE("theta series") {
    const auto cert = cert_for(circle());

    SUBCASE("large t: origin dominates") {
        const ThetaResult r = theta_sum(circle(), 10.0, cert);
        CHECK(r.value == doctest::Approx(1.0 + 4.0 * std::exp(-10.0)).epsilon(1e-8));
        CHECK(r.tail_bound <= 1e-12);
    }

    SUBCASE("theta is at least the origin term and decreasing in t") {
        double prev = std::numeric_limits<double>::infinity();
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            const ThetaResult r = theta_sum(circle(), t, cert);
            CHECK(r.value >= 1.0);
            CHECK(r.value < prev);
            prev = r.value;
        }
    }

    SUBCASE("small-scale trend toward the area constant") {
        for (double t : {0.1, 0.03, 0.01}) {
            const ThetaResult r = theta_sum(circle(), t, cert);
            CHECK(std::abs(t * r.value - M_PI) <= 1e-8);
            CHECK(r.tail_bound <= 1e-12 * r.value);
        }
    }

    SUBCASE("anisotropic check against a direct product of 1-D sums") {
        // f = x^2 + 4 y^2 factorizes: theta = theta_1(t) * theta_1(4t)
        const auto certe = cert_for(ellipse_poly());
        const double t = 0.7;
        auto theta1 = [](double s) {
            double acc = 1.0;
            for (int k = 1; k < 60; ++k) acc += 2.0 * std::exp(-s * k * k);
            return acc;
        };
        const ThetaResult r = theta_sum(ellipse_poly(), t, certe);
        CHECK(r.value == doctest::Approx(theta1(t) * theta1(4.0 * t)).epsilon(1e-10));
    }
}

TEST_CASE("projective height counts") {
    const auto cert3 = cert_for(ball_polynomial(3, 2));

    SUBCASE("unit sphere of height 2") {
        // primitive points with all coordinates nonzero and norm^2 <= 4 are
        // exactly (+-1, +-1, +-1); one orbit
        const RationalCount r = rational_point_count(ball_polynomial(3, 2), 2.0, cert3);
        CHECK(r.count == 1);
        CHECK(r.boundary_excluded == 18); // 6 axis points + 12 two-coordinate points
        CHECK_FALSE(r.small_dimension);
    }

    SUBCASE("height below the first lattice point") {
        const RationalCount r = rational_point_count(ball_polynomial(3, 2), 0.9, cert3);
        CHECK(r.count == 0);
    }

    SUBCASE("plane flags the small-dimension caveat") {
        const auto cert2 = cert_for(circle());
        const RationalCount r = rational_point_count(circle(), 3.0, cert2);
        CHECK(r.small_dimension);
    }
}
