#pragma once

#include <functional>

#include "sublevel/estimate.hpp"
#include "sublevel/grassmann.hpp"
#include "sublevel/poly.hpp"

namespace sublevel {

// kappa_m = pi^{m/2} / Gamma(1 + m/2), the volume of the unit m-ball.
double unit_ball_volume(int m);

struct VolumeConstants {
    double kappa_j = 0.0;
    double beta_jn = 0.0;       // C(n,j) kappa_n / (kappa_j kappa_{n-j})
    double sigma_jn = 0.0;      // kappa_n / kappa_j
    double gamma_factor = 0.0;  // Gamma(1 + j/d)
};

VolumeConstants constants(int j, int n, int d);

// Integral of exp(-h) over E for a d-homogeneous h given in E-coordinates,
// via the radial reduction to the unit sphere of E. For dim E == 1 the sphere
// integral is the exact two-point sum and the result carries no sampling
// error.
Estimate laplace_integral(const std::function<double(const Eigen::VectorXd&)>& h, int degree,
                          const Subspace& E, std::uint64_t inner_samples, Rng& rng);

// V_j([f <= alpha]) by Haar-averaging the infimal-projection Laplace
// integral. j = 0 and j = n are exact/special-cased.
Estimate intrinsic_volume(const HomogeneousPolynomial& f, int j, const EstimatorConfig& config);

// Dual volume; restriction in place of projection, sigma in place of beta.
Estimate dual_volume(const HomogeneousPolynomial& f, int j, const EstimatorConfig& config);

// vol_n([f <= alpha]) via the radial reduction on the ambient sphere.
Estimate volume_full(const HomogeneousPolynomial& f, const EstimatorConfig& config);

namespace detail {

// Evaluates pow(x, -e) with fast paths for the half-integer exponents that
// dominate estimator inner loops.
class NegativePower {
  public:
    explicit NegativePower(double e);
    double operator()(double x) const;

  private:
    enum class Kind { half, one, three_halves, two, generic } kind_;
    double e_;
};

// Uniform unit vector of dimension dim written into out (dim >= 2).
void random_unit_into(Rng& rng, int dim, Eigen::VectorXd& out);

double mean_of(const std::vector<double>& v);
double std_error_of(const std::vector<double>& v, double mean);

} // namespace detail

} // namespace sublevel
