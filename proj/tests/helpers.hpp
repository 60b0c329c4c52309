#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "sublevel/poly.hpp"
#include "sublevel/rng.hpp"

namespace testutil {

// SPD matrix with eigenvalues in roughly [lo, hi]; moderate conditioning so
// Monte Carlo comparisons stay sharp.
inline Eigen::MatrixXd random_spd(sublevel::Rng& rng, int n, double lo = 0.5, double hi = 3.0) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd ev(n);
    for (int i = 0; i < n; ++i) ev[i] = lo + (hi - lo) * rng.uniform01();
    return Q * ev.asDiagonal() * Q.transpose();
}

// Random member of the admissible cone: SPD quadratic for d = 2, a convex
// combination of squared SPD quadratics for d = 4.
inline sublevel::HomogeneousPolynomial random_certified_poly(sublevel::Rng& rng, int n, int d) {
    if (d == 2) return sublevel::from_quadratic_form(random_spd(rng, n));
    sublevel::HomogeneousPolynomial f = sublevel::quadratic_power(random_spd(rng, n), d);
    sublevel::HomogeneousPolynomial g = sublevel::quadratic_power(random_spd(rng, n), d);
    const double w = 0.3 + 0.4 * rng.uniform01();
    return f.scaled(w).plus(g, 1.0 - w);
}

inline Eigen::VectorXd random_vector(sublevel::Rng& rng, int n, double scale = 1.0) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = scale * rng.normal();
    return x;
}

inline Eigen::VectorXd random_unit(sublevel::Rng& rng, int n) {
    Eigen::VectorXd x = random_vector(rng, n);
    return x / x.norm();
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// One-sample Kolmogorov-Smirnov statistic against a uniform CDF on [0, 1];
// samples are modified (sorted).
inline double ks_uniform(std::vector<double>& samples) {
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double lo = double(i) / n;
        const double hi = double(i + 1) / n;
        d = std::max(d, std::max(std::abs(samples[i] - lo), std::abs(samples[i] - hi)));
    }
    return d;
}

// Two-sample KS statistic; both inputs are sorted in place.
inline double ks_two_sample(std::vector<double>& a, std::vector<double>& b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

} // namespace testutil
