#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "sublevel/errors.hpp"
#include "sublevel/rng.hpp"

namespace sublevel {

// Positively d-homogeneous polynomial on R^n, stored as a sparse map from
// exponent multi-indices to coefficients. Every multi-index sums to d; d is
// even and >= 2; n >= 2. The zero polynomial (no terms) is representable so
// that perturbation directions can vanish, but certification and parsing
// reject it.
class HomogeneousPolynomial {
  public:
    using MultiIndex = std::vector<int>;
    using Term = std::pair<MultiIndex, double>;

    HomogeneousPolynomial(int n, int d, const std::vector<Term>& terms);

    static HomogeneousPolynomial zero(int n, int d) {
        return HomogeneousPolynomial(n, d, {});
    }

    int dimension() const { return n_; }
    int degree() const { return d_; }
    std::size_t term_count() const { return coeffs_.size(); }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_quadratic() const { return d_ == 2; }

    int exponent(std::size_t term, int var) const {
        return exps_[term * std::size_t(n_) + std::size_t(var)];
    }
    double coefficient(std::size_t term) const { return coeffs_[term]; }
    MultiIndex multi_index(std::size_t term) const;

    double operator()(const Eigen::VectorXd& x) const;

    // Evaluation with compensated products and summation; used to settle
    // near-boundary comparisons in exact lattice counts.
    double eval_compensated(const Eigen::VectorXd& x) const;

    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
    void gradient_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
    void hessian_into(const Eigen::VectorXd& x, Eigen::MatrixXd& out) const;

    // Gram matrix with f(x) = x^T Q x; only valid when d == 2.
    const Eigen::MatrixXd& quadratic_form() const;

    HomogeneousPolynomial scaled(double c) const;
    HomogeneousPolynomial plus(const HomogeneousPolynomial& other, double c = 1.0) const;

    bool same_shape(const HomogeneousPolynomial& other) const {
        return n_ == other.n_ && d_ == other.d_;
    }

    std::vector<Term> terms() const;

  private:
    void check_vector(const Eigen::VectorXd& x) const;

    int n_ = 0;
    int d_ = 0;
    std::vector<int> exps_;        // term-major, n entries per term
    std::vector<double> coeffs_;   // parallel to exps_
    Eigen::MatrixXd quad_;         // cached Gram matrix when d == 2
};

// f(R x) for an orthogonal (or any linear) map R; expands term by term.
HomogeneousPolynomial compose_linear(const HomogeneousPolynomial& f,
                                     const Eigen::MatrixXd& R);

// ||x||^d expanded into monomials (d even).
HomogeneousPolynomial ball_polynomial(int n, int d);

// x^T Q x as a HomogeneousPolynomial (drops zero entries).
HomogeneousPolynomial from_quadratic_form(const Eigen::MatrixXd& Q);

// (x^T Q x)^(d/2) expanded; Q should be PSD for membership in the admissible
// cone but the expansion itself is unconditional.
HomogeneousPolynomial quadratic_power(const Eigen::MatrixXd& Q, int d);

struct CertifyConfig {
    std::uint64_t seed = 0;
    int positivity_starts = 64;
    int convexity_samples = 4096;
    double tol_psd = 1e-8;
    double safety_margin = 0.05;
    int descent_max_iters = 400;
    double descent_tol = 1e-13;
};

// varpi is a certified-by-sampling constant with f(x) >= varpi * ||x||^d.
struct CoercivityCertificate {
    double varpi = 0.0;
    Eigen::VectorXd witness_min;
    int sample_count = 0;
};

// Multi-start projected gradient descent on the unit sphere. Throws
// not_positive when a nonpositive sphere value is found.
CoercivityCertificate certify_positive(const HomogeneousPolynomial& f,
                                       const CertifyConfig& config = {});

// Sampling certificate of convexity: smallest Hessian eigenvalue at random
// sphere points must stay above -tol_psd * ||H||. false = not certified.
bool certify_convex(const HomogeneousPolynomial& f, const CertifyConfig& config = {});

// rho(u) = f(u)^(-1/d), the radial function of the unit sublevel body.
double radial(const HomogeneousPolynomial& f, const Eigen::VectorXd& u);

namespace detail {
// Map-based polynomial algebra used by the expansion helpers; not a hot path.
using TermMap = std::map<std::vector<int>, double>;
TermMap multiply(const TermMap& a, const TermMap& b, int n);
} // namespace detail

} // namespace sublevel
