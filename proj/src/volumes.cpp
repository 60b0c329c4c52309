#include "sublevel/volumes.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sublevel/parallel.hpp"

namespace sublevel {

double unit_ball_volume(int m) {
    if (m < 0) throw precondition_error("unit_ball_volume: negative dimension");
    return std::exp(0.5 * m * std::log(M_PI) - std::lgamma(1.0 + 0.5 * m));
}

VolumeConstants constants(int j, int n, int d) {
    if (j < 0 || j > n) throw precondition_error("constants: need 0 <= j <= n");
    if (d < 2 || d % 2 != 0) throw precondition_error("constants: degree must be even >= 2");

    auto log_kappa = [](int m) {
        return 0.5 * m * std::log(M_PI) - std::lgamma(1.0 + 0.5 * m);
    };
    double log_binom = 0.0;
    for (int k = 1; k <= j; ++k)
        log_binom += std::log(double(n - j + k)) - std::log(double(k));

    VolumeConstants c;
    c.kappa_j = unit_ball_volume(j);
    c.beta_jn = std::exp(log_binom + log_kappa(n) - log_kappa(j) - log_kappa(n - j));
    c.sigma_jn = std::exp(log_kappa(n) - log_kappa(j));
    c.gamma_factor = std::tgamma(1.0 + double(j) / double(d));
    return c;
}

namespace detail {

NegativePower::NegativePower(double e) : e_(e) {
    if (e == 0.5) kind_ = Kind::half;
    else if (e == 1.0) kind_ = Kind::one;
    else if (e == 1.5) kind_ = Kind::three_halves;
    else if (e == 2.0) kind_ = Kind::two;
    else kind_ = Kind::generic;
}

double NegativePower::operator()(double x) const {
    switch (kind_) {
        case Kind::half: return 1.0 / std::sqrt(x);
        case Kind::one: return 1.0 / x;
        case Kind::three_halves: return 1.0 / (x * std::sqrt(x));
        case Kind::two: return 1.0 / (x * x);
        case Kind::generic: return std::pow(x, -e_);
    }
    return 0.0;
}

void random_unit_into(Rng& rng, int dim, Eigen::VectorXd& out) {
    out.resize(dim);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) out[i] = rng.normal();
        norm2 = out.squaredNorm();
    } while (norm2 < 1e-300);
    out /= std::sqrt(norm2);
}

double mean_of(const std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value() / double(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    CompensatedSum s;
    for (double x : v) s.add((x - mean) * (x - mean));
    return std::sqrt(s.value() / double(v.size() - 1) / double(v.size()));
}

} // namespace detail

namespace {

using detail::NegativePower;

void throw_nonpositive(double v) {
    std::ostringstream os;
    os << "laplace integrand hit a nonpositive value " << v
       << "; the positivity certificate does not hold";
    throw non_finite_error(os.str());
}

// (Gamma(j/d)/d) * integral over the unit sphere of E of h^{-j/d}.
// Two-point sum for dim E == 1, uniform Monte Carlo otherwise.
template <class H>
double sphere_laplace_raw(H&& h, int j, int d, std::uint64_t inner, Rng& rng,
                          Eigen::VectorXd& theta, const NegativePower& np,
                          double sphere_area) {
    const double gamma_scale = std::tgamma(double(j) / double(d)) / double(d);
    if (j == 1) {
        theta.resize(1);
        theta[0] = 1.0;
        const double v1 = h(theta);
        theta[0] = -1.0;
        const double v2 = h(theta);
        if (!(v1 > 0.0)) throw_nonpositive(v1);
        if (!(v2 > 0.0)) throw_nonpositive(v2);
        return gamma_scale * (np(v1) + np(v2));
    }
    CompensatedSum s;
    for (std::uint64_t k = 0; k < inner; ++k) {
        detail::random_unit_into(rng, j, theta);
        const double v = h(theta);
        if (!(v > 0.0)) throw_nonpositive(v);
        s.add(np(v));
    }
    return gamma_scale * sphere_area * (s.value() / double(inner));
}

enum class Functional { projection, restriction };

Estimate grassmann_average(const HomogeneousPolynomial& f, int j,
                           const EstimatorConfig& cfg, Functional kind) {
    const int n = f.dimension();
    const int d = f.degree();
    const VolumeConstants c = constants(j, n, d);
    const double sphere_area = double(j) * c.kappa_j;
    const double exponent = double(j) / double(d);
    const NegativePower np(exponent);

    std::vector<double> contributions(cfg.outer_samples);

    parallel_chunks(cfg.outer_samples, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
        Eigen::VectorXd theta, x(n);
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng(substream(cfg.seed, i));
            const Subspace E = sample_subspace(j, n, rng);
            try {
                if (kind == Functional::projection) {
                    const InfProjector proj(f, E, cfg.solver);
                    auto h = [&](const Eigen::VectorXd& th) { return proj.value(th); };
                    contributions[i] =
                        sphere_laplace_raw(h, j, d, cfg.inner_samples, rng, theta, np, sphere_area);
                } else {
                    const Eigen::MatrixXd& B = E.basis();
                    auto h = [&](const Eigen::VectorXd& th) {
                        x.noalias() = B * th;
                        return f(x);
                    };
                    contributions[i] =
                        sphere_laplace_raw(h, j, d, cfg.inner_samples, rng, theta, np, sphere_area);
                }
            } catch (const max_iters_error& e) {
                std::ostringstream os;
                os << e.what() << " (Grassmann draw #" << i << ")";
                throw max_iters_error(os.str());
            }
        }
    });

    const double mean = detail::mean_of(contributions);
    const double se = detail::std_error_of(contributions, mean);
    const double prefactor =
        std::pow(cfg.alpha, exponent) *
        ((kind == Functional::projection ? c.beta_jn : c.sigma_jn) / c.gamma_factor);

    Estimate est;
    est.value = prefactor * mean;
    est.std_error = prefactor * se;
    est.outer_samples = cfg.outer_samples;
    est.inner_samples = (j == 1) ? 2 : cfg.inner_samples;
    return est;
}

void validate_config(const EstimatorConfig& cfg) {
    if (cfg.outer_samples < 1 || cfg.inner_samples < 1)
        throw precondition_error("estimator sample counts must be >= 1");
    if (!(cfg.alpha > 0.0)) throw precondition_error("alpha must be positive");
}

} // namespace

Estimate laplace_integral(const std::function<double(const Eigen::VectorXd&)>& h, int degree,
                          const Subspace& E, std::uint64_t inner_samples, Rng& rng) {
    const int j = E.dimension();
    const int d = degree;
    if (d < 2 || d % 2 != 0) throw precondition_error("laplace_integral: degree must be even >= 2");
    const double gamma_scale = std::tgamma(double(j) / double(d)) / double(d);
    const NegativePower np(double(j) / double(d));

    Estimate est;
    Eigen::VectorXd theta;
    if (j == 1) {
        theta.resize(1);
        theta[0] = 1.0;
        const double v1 = h(theta);
        theta[0] = -1.0;
        const double v2 = h(theta);
        if (!(v1 > 0.0)) throw_nonpositive(v1);
        if (!(v2 > 0.0)) throw_nonpositive(v2);
        est.value = gamma_scale * (np(v1) + np(v2));
        est.std_error = 0.0;
        est.outer_samples = 1;
        est.inner_samples = 2;
        return est;
    }

    const double sphere_area = double(j) * unit_ball_volume(j);
    std::vector<double> vals(inner_samples);
    for (std::uint64_t k = 0; k < inner_samples; ++k) {
        detail::random_unit_into(rng, j, theta);
        const double v = h(theta);
        if (!(v > 0.0)) throw_nonpositive(v);
        vals[k] = np(v);
    }
    const double mean = detail::mean_of(vals);
    const double se = detail::std_error_of(vals, mean);
    est.value = gamma_scale * sphere_area * mean;
    est.std_error = gamma_scale * sphere_area * se;
    est.outer_samples = 1;
    est.inner_samples = inner_samples;
    return est;
}

Estimate intrinsic_volume(const HomogeneousPolynomial& f, int j, const EstimatorConfig& cfg) {
    validate_config(cfg);
    const int n = f.dimension();
    if (j < 0 || j > n) throw precondition_error("intrinsic_volume: need 0 <= j <= n");
    if (j == 0) return Estimate{1.0, 0.0, 0, 0};
    if (j == n) return volume_full(f, cfg);
    return grassmann_average(f, j, cfg, Functional::projection);
}

Estimate dual_volume(const HomogeneousPolynomial& f, int j, const EstimatorConfig& cfg) {
    validate_config(cfg);
    const int n = f.dimension();
    if (j < 0 || j > n) throw precondition_error("dual_volume: need 0 <= j <= n");
    if (j == 0) return Estimate{unit_ball_volume(n), 0.0, 0, 0};
    if (j == n) return volume_full(f, cfg);
    return grassmann_average(f, j, cfg, Functional::restriction);
}

Estimate volume_full(const HomogeneousPolynomial& f, const EstimatorConfig& cfg) {
    validate_config(cfg);
    const int n = f.dimension();
    const int d = f.degree();
    const double exponent = double(n) / double(d);
    const NegativePower np(exponent);
    const double gamma_scale = std::tgamma(exponent) / double(d);
    const double sphere_area = double(n) * unit_ball_volume(n);

    std::vector<double> contributions(cfg.outer_samples);
    parallel_chunks(cfg.outer_samples, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
        Eigen::VectorXd theta(n);
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng(substream(cfg.seed, i));
            CompensatedSum s;
            for (std::uint64_t k = 0; k < cfg.inner_samples; ++k) {
                detail::random_unit_into(rng, n, theta);
                const double v = f(theta);
                if (!(v > 0.0)) throw_nonpositive(v);
                s.add(np(v));
            }
            contributions[i] = gamma_scale * sphere_area * (s.value() / double(cfg.inner_samples));
        }
    });

    const double mean = detail::mean_of(contributions);
    const double se = detail::std_error_of(contributions, mean);
    const double prefactor = std::pow(cfg.alpha, exponent) / std::tgamma(1.0 + exponent);

    Estimate est;
    est.value = prefactor * mean;
    est.std_error = prefactor * se;
    est.outer_samples = cfg.outer_samples;
    est.inner_samples = cfg.inner_samples;
    return est;
}

} // namespace sublevel
