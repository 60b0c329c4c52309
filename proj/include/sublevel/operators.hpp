#pragma once

#include <Eigen/Dense>

#include "sublevel/grassmann.hpp"
#include "sublevel/poly.hpp"

namespace sublevel {

struct SolverConfig {
    double tol_foc = 1e-9;
    int max_iters = 200;
    double backtrack = 0.5;
    double armijo_c = 1e-4;
    // Degree-2 inputs route through the Schur-complement closed form unless
    // this is cleared (tests clear it to exercise the Newton path).
    bool use_quadratic_shortcut = true;
};

struct InfProjResult {
    double value = 0.0;
    Eigen::VectorXd minimizer;   // z* in complement coordinates
    double kkt_residual = 0.0;   // norm of the reduced gradient at z*
    int iterations = 0;
};

// f restricted to E, evaluated at E-coordinates y.
double restrict_poly(const HomogeneousPolynomial& f, const Subspace& E,
                     const Eigen::VectorXd& y);

// Compression of Q to E: B^T Q B in E-coordinates.
Eigen::MatrixXd quad_restrict(const Eigen::MatrixXd& Q, const Subspace& E);

// Shorted operator: inverse of the E-compression of Q^{-1}; the quadratic
// form of the infimal projection.
Eigen::MatrixXd quad_project(const Eigen::MatrixXd& Q, const Subspace& E);

// Reusable minimizer of z |-> f(embed(E, y) + C z) over the complement, with
// workspace preallocated for repeated solves against a fixed (f, E).
class InfProjector {
  public:
    InfProjector(const HomogeneousPolynomial& f, const Subspace& E,
                 const SolverConfig& config = {});

    InfProjResult solve(const Eigen::VectorXd& y) const;

    // Projection value only (no result struct); the estimator hot path.
    double value(const Eigen::VectorXd& y) const;

    bool quadratic_path() const { return quadratic_; }
    // Valid on the quadratic path: Pi_E f(y) = y^T P y.
    const Eigen::MatrixXd& projected_form() const { return proj_form_; }

  private:
    InfProjResult newton(const Eigen::VectorXd& y) const;

    const HomogeneousPolynomial& f_;
    const Subspace& E_;
    SolverConfig cfg_;
    bool quadratic_ = false;
    Eigen::MatrixXd proj_form_;   // j x j
    Eigen::MatrixXd zstar_map_;   // (n-j) x j, z* = zstar_map * y on the quad path

    // scratch (mutable: solve() is logically const and single-threaded per instance)
    mutable Eigen::VectorXd x_, grad_, gz_, step_, xtrial_;
    mutable Eigen::MatrixXd hess_, hz_;
};

InfProjResult inf_project(const HomogeneousPolynomial& f, const Subspace& E,
                          const Eigen::VectorXd& y, const SolverConfig& config = {});

} // namespace sublevel
