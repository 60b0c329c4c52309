#pragma once

#include <functional>
#include <vector>

#include "sublevel/estimate.hpp"
#include "sublevel/poly.hpp"

namespace sublevel {

enum class VolumeFunctional { intrinsic, dual };

// Canonical monomial basis of the d-homogeneous polynomials on R^n, in the
// same lexicographic-descending order the polynomial type uses.
std::vector<HomogeneousPolynomial::MultiIndex> monomial_basis(int n, int d);
HomogeneousPolynomial basis_polynomial(int n, int d, std::size_t index);
std::size_t basis_size(int n, int d);

Eigen::VectorXd coefficients_in_basis(const HomogeneousPolynomial& f);
HomogeneousPolynomial polynomial_from_coefficients(int n, int d, const Eigen::VectorXd& c);

// Directional derivative of the dual-volume functional at f along phi,
// estimated on the restriction side (per-direction closed-form radial
// integral, Monte Carlo over the Grassmannian).
Estimate gateaux_dual(const HomogeneousPolynomial& f, const HomogeneousPolynomial& phi, int j,
                      const EstimatorConfig& config);

// Projection-side derivative through the envelope formula: phi is evaluated
// at theta + z*(E, theta), one inner minimization per direction.
Estimate gateaux_intrinsic(const HomogeneousPolynomial& f, const HomogeneousPolynomial& phi,
                           int j, const EstimatorConfig& config);

struct KktReport {
    Eigen::VectorXd residuals;      // |moment_k - sum_l lambda_l phi_k(x_l)|
    Eigen::VectorXd moments;        // Grassmannian moment per basis direction
    Eigen::VectorXd moment_std_errors;
    Eigen::VectorXd atomic;         // atomic side per basis direction
    double max_feasibility_gap = 0.0; // max |f*(x_l) - 1|
    double mass_gap = 0.0;            // |sum lambda - (j/d) V_j|
};

KktReport kkt_residual(const HomogeneousPolynomial& f_star,
                       const std::vector<std::pair<double, Eigen::VectorXd>>& atoms, int j,
                       const EstimatorConfig& config);

struct VariationalConfig {
    EstimatorConfig estimator{0, 512, 256, SolverConfig{}, 1.0, 1};
    CertifyConfig certify;
    int epochs = 24;
    int max_steps_per_epoch = 50;
    double barrier_t0 = 8.0;
    double barrier_growth = 1.6;
    double initial_step = 0.25;
    double step_tol = 1e-10;
    double contact_band = 2e-2;
    std::uint64_t init_seed = 0; // restart stream (initialization only)
    double init_mix = 0.0;       // 0 = ball start, >0 mixes a random certified start
};

struct LJSolution {
    HomogeneousPolynomial f_star;
    Estimate objective;
    std::vector<Eigen::VectorXd> contact_points;
    Eigen::VectorXd contact_weights;
    KktReport kkt_report;
    bool converged = false;
    int epochs_run = 0;
};

// Minimizes the chosen volume functional over certified f with f(x_i) <= 1
// for all input points, by log-barrier descent on monomial coefficients with
// a fixed Monte Carlo batch per epoch. j = n routes through the plain volume
// functional.
LJSolution solve_P0(const std::vector<Eigen::VectorXd>& points, int j, int d,
                    VolumeFunctional variant, const VariationalConfig& config);

// Checks that the normalized isotropic polynomial beats random certified
// unit-norm competitors for both functionals, under common random numbers.
// Throws precondition_error when the supplied norm fails the invariance
// spot-check.
bool check_Q0_ball(const std::function<double(const HomogeneousPolynomial&)>& norm, int n, int d,
                   int j, const EstimatorConfig& config);

// Exactly O(n)-invariant norm: L2 norm over the unit sphere via closed-form
// monomial moments.
double sphere_l2_norm(const HomogeneousPolynomial& f);

// Sup of |f| over a deterministic sphere sample closed under coordinate
// permutations and sign flips.
double sphere_sup_norm(const HomogeneousPolynomial& f);

} // namespace sublevel
