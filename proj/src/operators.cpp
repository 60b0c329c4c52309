#include "sublevel/operators.hpp"

#include <cmath>
#include <sstream>

namespace sublevel {

double restrict_poly(const HomogeneousPolynomial& f, const Subspace& E,
                     const Eigen::VectorXd& y) {
    if (f.dimension() != E.ambient_dimension())
        throw dimension_mismatch("restrict: polynomial and subspace dimensions differ");
    return f(E.embed(y));
}

Eigen::MatrixXd quad_restrict(const Eigen::MatrixXd& Q, const Subspace& E) {
    if (Q.rows() != E.ambient_dimension() || Q.cols() != Q.rows())
        throw dimension_mismatch("quad_restrict: matrix shape mismatch");
    return E.basis().transpose() * Q * E.basis();
}

Eigen::MatrixXd quad_project(const Eigen::MatrixXd& Q, const Subspace& E) {
    if (Q.rows() != E.ambient_dimension() || Q.cols() != Q.rows())
        throw dimension_mismatch("quad_project: matrix shape mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() != Eigen::Success)
        throw precondition_error("quad_project: matrix is not positive definite");
    const Eigen::MatrixXd qinv_b = llt.solve(E.basis());
    const Eigen::MatrixXd compressed = E.basis().transpose() * qinv_b; // B^T Q^{-1} B
    Eigen::LLT<Eigen::MatrixXd> llt2(compressed);
    if (llt2.info() != Eigen::Success)
        throw precondition_error("quad_project: compressed matrix is not positive definite");
    const int j = E.dimension();
    return llt2.solve(Eigen::MatrixXd::Identity(j, j));
}

InfProjector::InfProjector(const HomogeneousPolynomial& f, const Subspace& E,
                           const SolverConfig& config)
    : f_(f), E_(E), cfg_(config) {
    const int n = E.ambient_dimension();
    const int j = E.dimension();
    const int m = E.complement_dimension();
    if (f.dimension() != n)
        throw dimension_mismatch("inf_project: polynomial and subspace dimensions differ");

    if (f.is_quadratic() && cfg_.use_quadratic_shortcut) {
        quadratic_ = true;
        const Eigen::MatrixXd& Q = f.quadratic_form();
        proj_form_ = quad_project(Q, E);
        if (m > 0) {
            const Eigen::MatrixXd& C = E.complement_basis();
            const Eigen::MatrixXd czz = C.transpose() * Q * C;
            zstar_map_ = -czz.llt().solve(C.transpose() * Q * E.basis());
        } else {
            zstar_map_ = Eigen::MatrixXd(0, j);
        }
    }

    x_.resize(n);
    grad_.resize(n);
    gz_.resize(m);
    step_.resize(m);
    xtrial_.resize(n);
    hess_.resize(n, n);
    hz_.resize(m, m);
}

InfProjResult InfProjector::solve(const Eigen::VectorXd& y) const {
    if (y.size() != E_.dimension())
        throw dimension_mismatch("inf_project: coordinate length mismatch");
    if (quadratic_) {
        InfProjResult r;
        r.value = y.dot(proj_form_ * y);
        r.minimizer = zstar_map_ * y;
        r.kkt_residual = 0.0;
        r.iterations = 0;
        return r;
    }
    return newton(y);
}

double InfProjector::value(const Eigen::VectorXd& y) const {
    if (quadratic_) return y.dot(proj_form_ * y);
    return newton(y).value;
}

InfProjResult InfProjector::newton(const Eigen::VectorXd& y) const {
    const int m = E_.complement_dimension();
    const Eigen::MatrixXd& C = E_.complement_basis();

    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    x_ = E_.basis() * y;
    double val = f_(x_);

    if (m == 0) {
        InfProjResult r;
        r.value = val;
        r.minimizer = z;
        r.kkt_residual = 0.0;
        r.iterations = 0;
        return r;
    }

    InfProjResult r;
    for (int it = 0; it < cfg_.max_iters; ++it) {
        f_.gradient_into(x_, grad_);
        gz_.noalias() = C.transpose() * grad_;
        const double gnorm = gz_.norm();
        if (gnorm <= cfg_.tol_foc * (1.0 + std::abs(val))) {
            r.value = val;
            r.minimizer = z;
            r.kkt_residual = gnorm;
            r.iterations = it;
            return r;
        }

        f_.hessian_into(x_, hess_);
        hz_.noalias() = C.transpose() * hess_ * C;

        // Quartic Hessians are singular at the origin; bump the diagonal
        // until the factorization succeeds.
        double mu = 0.0;
        Eigen::LLT<Eigen::MatrixXd> llt(hz_);
        while (llt.info() != Eigen::Success) {
            mu = (mu == 0.0) ? 1e-12 * std::max(hz_.trace(), 1.0) : mu * 10.0;
            llt.compute(hz_ + mu * Eigen::MatrixXd::Identity(m, m));
            if (mu > 1e12) throw numerical_error("inf_project: Hessian regularization failed");
        }
        step_ = llt.solve(-gz_);

        // Fall back to steepest descent if the Newton direction is uphill.
        double slope = gz_.dot(step_);
        if (!(slope < 0.0)) {
            step_ = -gz_;
            slope = -gz_.squaredNorm();
        }

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            xtrial_ = x_ + t * (C * step_);
            const double vt = f_(xtrial_);
            if (vt <= val + cfg_.armijo_c * t * slope) {
                z += t * step_;
                x_ = xtrial_;
                val = vt;
                accepted = true;
                break;
            }
            // Near the minimizer the predicted decrease drops below the
            // value's ulp and the Armijo test goes blind; the full Newton
            // step still contracts the measurable gradient, so accept on
            // that evidence instead.
            if (bt == 0) {
                f_.gradient_into(xtrial_, grad_);
                if ((C.transpose() * grad_).norm() <= 0.5 * gnorm) {
                    z += step_;
                    x_ = xtrial_;
                    val = vt;
                    accepted = true;
                    break;
                }
            }
            t *= cfg_.backtrack;
        }
        if (!accepted) break; // line search exhausted; report via MaxIters below
    }

    f_.gradient_into(x_, grad_);
    const double gnorm = (C.transpose() * grad_).norm();
    std::ostringstream os;
    os << "inf_project: no convergence after " << cfg_.max_iters
       << " iterations (reduced gradient " << gnorm << ")";
    throw max_iters_error(os.str());
}

InfProjResult inf_project(const HomogeneousPolynomial& f, const Subspace& E,
                          const Eigen::VectorXd& y, const SolverConfig& config) {
    return InfProjector(f, E, config).solve(y);
}

} // namespace sublevel
