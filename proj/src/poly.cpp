#include "sublevel/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sublevel {

namespace {

double pow_small(double x, int e) {
    double r = 1.0;
    while (e-- > 0) r *= x;
    return r;
}

// TwoProd / TwoSum building blocks for the compensated evaluator.
inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double z = s - a;
    e = (a - (s - z)) + (b - z);
}

} // namespace

HomogeneousPolynomial::HomogeneousPolynomial(int n, int d, const std::vector<Term>& terms)
    : n_(n), d_(d) {
    // n == 1 occurs for block factors; top-level inputs are n >= 2.
    if (n < 1) throw precondition_error("ambient dimension must be >= 1");
    if (d < 2 || d % 2 != 0) throw precondition_error("degree must be even and >= 2");

    std::map<MultiIndex, double> merged;
    for (const auto& [mi, c] : terms) {
        if (int(mi.size()) != n)
            throw parse_error("multi-index length does not match dimension");
        int sum = 0;
        for (int e : mi) {
            if (e < 0) throw parse_error("negative exponent in multi-index");
            sum += e;
        }
        if (sum != d) throw parse_error("multi-index does not sum to the degree");
        if (!std::isfinite(c)) throw parse_error("non-finite coefficient");
        merged[mi] += c;
    }

    // Canonical order: lexicographically descending multi-indices.
    std::vector<std::pair<MultiIndex, double>> sorted(merged.begin(), merged.end());
    std::reverse(sorted.begin(), sorted.end());
    for (const auto& [mi, c] : sorted) {
        if (c == 0.0) continue;
        exps_.insert(exps_.end(), mi.begin(), mi.end());
        coeffs_.push_back(c);
    }

    if (d_ == 2 && !coeffs_.empty()) {
        quad_ = Eigen::MatrixXd::Zero(n_, n_);
        for (std::size_t t = 0; t < coeffs_.size(); ++t) {
            int i = -1, j = -1;
            for (int v = 0; v < n_; ++v) {
                const int e = exponent(t, v);
                if (e == 2) { i = j = v; }
                else if (e == 1) { (i < 0 ? i : j) = v; }
            }
            if (i == j) quad_(i, i) += coeffs_[t];
            else {
                quad_(i, j) += 0.5 * coeffs_[t];
                quad_(j, i) += 0.5 * coeffs_[t];
            }
        }
    }
}

HomogeneousPolynomial::MultiIndex HomogeneousPolynomial::multi_index(std::size_t term) const {
    MultiIndex mi(n_);
    for (int v = 0; v < n_; ++v) mi[v] = exponent(term, v);
    return mi;
}

std::vector<HomogeneousPolynomial::Term> HomogeneousPolynomial::terms() const {
    std::vector<Term> out;
    out.reserve(coeffs_.size());
    for (std::size_t t = 0; t < coeffs_.size(); ++t)
        out.emplace_back(multi_index(t), coeffs_[t]);
    return out;
}

void HomogeneousPolynomial::check_vector(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw dimension_mismatch("point dimension does not match polynomial");
}

double HomogeneousPolynomial::operator()(const Eigen::VectorXd& x) const {
    check_vector(x);
    double acc = 0.0;
    const std::size_t nt = coeffs_.size();
    for (std::size_t t = 0; t < nt; ++t) {
        double m = coeffs_[t];
        const int* e = &exps_[t * std::size_t(n_)];
        for (int v = 0; v < n_; ++v)
            if (e[v] > 0) m *= pow_small(x[v], e[v]);
        acc += m;
    }
    return acc;
}

double HomogeneousPolynomial::eval_compensated(const Eigen::VectorXd& x) const {
    check_vector(x);
    double s = 0.0, comp = 0.0;
    const std::size_t nt = coeffs_.size();
    for (std::size_t t = 0; t < nt; ++t) {
        // Monomial product with error tracking.
        double m = coeffs_[t], merr = 0.0;
        const int* e = &exps_[t * std::size_t(n_)];
        for (int v = 0; v < n_; ++v) {
            for (int k = 0; k < e[v]; ++k) {
                double p, perr;
                two_prod(m, x[v], p, perr);
                merr = merr * x[v] + perr;
                m = p;
            }
        }
        double snew, serr;
        two_sum(s, m, snew, serr);
        s = snew;
        comp += serr + merr;
    }
    return s + comp;
}

void HomogeneousPolynomial::gradient_into(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    check_vector(x);
    out.setZero(n_);
    const std::size_t nt = coeffs_.size();
    for (std::size_t t = 0; t < nt; ++t) {
        const int* e = &exps_[t * std::size_t(n_)];
        const double c = coeffs_[t];
        for (int v = 0; v < n_; ++v) {
            if (e[v] == 0) continue;
            double m = c * double(e[v]) * pow_small(x[v], e[v] - 1);
            for (int w = 0; w < n_; ++w)
                if (w != v && e[w] > 0) m *= pow_small(x[w], e[w]);
            out[v] += m;
        }
    }
}

Eigen::VectorXd HomogeneousPolynomial::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g;
    gradient_into(x, g);
    return g;
}

void HomogeneousPolynomial::hessian_into(const Eigen::VectorXd& x, Eigen::MatrixXd& out) const {
    check_vector(x);
    out.setZero(n_, n_);
    const std::size_t nt = coeffs_.size();
    for (std::size_t t = 0; t < nt; ++t) {
        const int* e = &exps_[t * std::size_t(n_)];
        const double c = coeffs_[t];
        for (int v = 0; v < n_; ++v) {
            if (e[v] == 0) continue;
            // diagonal
            if (e[v] >= 2) {
                double m = c * double(e[v]) * double(e[v] - 1) * pow_small(x[v], e[v] - 2);
                for (int w = 0; w < n_; ++w)
                    if (w != v && e[w] > 0) m *= pow_small(x[w], e[w]);
                out(v, v) += m;
            }
            // mixed, upper triangle
            for (int u = v + 1; u < n_; ++u) {
                if (e[u] == 0) continue;
                double m = c * double(e[v]) * double(e[u]) * pow_small(x[v], e[v] - 1) *
                           pow_small(x[u], e[u] - 1);
                for (int w = 0; w < n_; ++w)
                    if (w != v && w != u && e[w] > 0) m *= pow_small(x[w], e[w]);
                out(v, u) += m;
                out(u, v) += m;
            }
        }
    }
}

Eigen::MatrixXd HomogeneousPolynomial::hessian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h;
    hessian_into(x, h);
    return h;
}

const Eigen::MatrixXd& HomogeneousPolynomial::quadratic_form() const {
    if (d_ != 2) throw precondition_error("quadratic form requested for degree != 2");
    return quad_;
}

HomogeneousPolynomial HomogeneousPolynomial::scaled(double c) const {
    std::vector<Term> out = terms();
    for (auto& t : out) t.second *= c;
    return HomogeneousPolynomial(n_, d_, out);
}

HomogeneousPolynomial HomogeneousPolynomial::plus(const HomogeneousPolynomial& other,
                                                  double c) const {
    if (!same_shape(other))
        throw dimension_mismatch("polynomials have different (n, d)");
    std::vector<Term> out = terms();
    for (auto& t : other.terms()) out.emplace_back(t.first, c * t.second);
    return HomogeneousPolynomial(n_, d_, out);
}

namespace detail {

TermMap multiply(const TermMap& a, const TermMap& b, int n) {
    TermMap out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e(n);
            for (int v = 0; v < n; ++v) e[v] = ea[v] + eb[v];
            out[e] += ca * cb;
        }
    return out;
}

} // namespace detail

HomogeneousPolynomial compose_linear(const HomogeneousPolynomial& f, const Eigen::MatrixXd& R) {
    const int n = f.dimension();
    if (R.rows() != n || R.cols() != n)
        throw dimension_mismatch("linear map has wrong shape");

    // Linear forms u_i(x) = sum_j R(i,j) x_j as term maps.
    std::vector<detail::TermMap> lin(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (R(i, j) == 0.0) continue;
            std::vector<int> e(n, 0);
            e[j] = 1;
            lin[i][e] = R(i, j);
        }

    detail::TermMap acc;
    for (std::size_t t = 0; t < f.term_count(); ++t) {
        detail::TermMap mono{{std::vector<int>(n, 0), f.coefficient(t)}};
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < f.exponent(t, v); ++k)
                mono = detail::multiply(mono, lin[v], n);
        for (const auto& [e, c] : mono) acc[e] += c;
    }

    std::vector<HomogeneousPolynomial::Term> out(acc.begin(), acc.end());
    return HomogeneousPolynomial(n, f.degree(), out);
}

HomogeneousPolynomial ball_polynomial(int n, int d) {
    return quadratic_power(Eigen::MatrixXd::Identity(n, n), d);
}

HomogeneousPolynomial from_quadratic_form(const Eigen::MatrixXd& Q) {
    const int n = int(Q.rows());
    std::vector<HomogeneousPolynomial::Term> terms;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double c = (i == j) ? Q(i, i) : Q(i, j) + Q(j, i);
            if (c == 0.0) continue;
            std::vector<int> e(n, 0);
            e[i] += 1;
            e[j] += 1;
            terms.push_back({e, c});
        }
    return HomogeneousPolynomial(n, 2, terms);
}

HomogeneousPolynomial quadratic_power(const Eigen::MatrixXd& Q, int d) {
    if (d < 2 || d % 2 != 0) throw precondition_error("degree must be even and >= 2");
    const int n = int(Q.rows());
    HomogeneousPolynomial q = from_quadratic_form(Q);

    detail::TermMap base;
    for (const auto& [e, c] : q.terms()) base[e] = c;
    detail::TermMap acc = base;
    for (int k = 1; k < d / 2; ++k) acc = detail::multiply(acc, base, n);

    std::vector<HomogeneousPolynomial::Term> out(acc.begin(), acc.end());
    return HomogeneousPolynomial(n, d, out);
}

namespace {

Eigen::VectorXd random_unit(Rng& rng, int n) {
    Eigen::VectorXd u(n);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < n; ++i) u[i] = rng.normal();
        norm2 = u.squaredNorm();
    } while (norm2 < 1e-300);
    return u / std::sqrt(norm2);
}

// Projected gradient descent for f restricted to the unit sphere, with
// backtracking; returns the best point found from one start.
double sphere_descent(const HomogeneousPolynomial& f, Eigen::VectorXd& u,
                      const CertifyConfig& cfg) {
    double fu = f(u);
    Eigen::VectorXd grad(f.dimension()), tangent(f.dimension());
    double step = 1.0;
    for (int it = 0; it < cfg.descent_max_iters; ++it) {
        f.gradient_into(u, grad);
        tangent = grad - u.dot(grad) * u;
        const double tn = tangent.norm();
        if (tn <= cfg.descent_tol * (1.0 + std::abs(fu))) break;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd v = (u - step * tangent).normalized();
            const double fv = f(v);
            if (fv < fu - 1e-4 * step * tn * tn) {
                u = v;
                fu = fv;
                step = std::min(step * 2.0, 1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    return fu;
}

} // namespace

CoercivityCertificate certify_positive(const HomogeneousPolynomial& f,
                                       const CertifyConfig& cfg) {
    if (f.is_zero()) throw not_positive("zero polynomial");
    const int n = f.dimension();

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_u;
    for (int s = 0; s < cfg.positivity_starts; ++s) {
        Rng rng(substream(cfg.seed, std::uint64_t(s)));
        Eigen::VectorXd u = random_unit(rng, n);
        const double fu = sphere_descent(f, u, cfg);
        if (fu < best) {
            best = fu;
            best_u = u;
        }
        if (best <= 0.0) break;
    }

    if (!(best > 0.0)) {
        std::ostringstream os;
        os << "polynomial attains value " << best << " on the unit sphere";
        throw not_positive(os.str());
    }

    CoercivityCertificate cert;
    cert.varpi = (1.0 - cfg.safety_margin) * best;
    cert.witness_min = best_u;
    cert.sample_count = cfg.positivity_starts;
    return cert;
}

bool certify_convex(const HomogeneousPolynomial& f, const CertifyConfig& cfg) {
    const int n = f.dimension();
    Eigen::MatrixXd h(n, n);
    for (int s = 0; s < cfg.convexity_samples; ++s) {
        Rng rng(substream(cfg.seed ^ 0x55aa55aa55aa55aaull, std::uint64_t(s)));
        const Eigen::VectorXd u = random_unit(rng, n);
        f.hessian_into(u, h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
        if (lmin < -cfg.tol_psd * std::max(scale, 1e-300)) return false;
    }
    return true;
}

double radial(const HomogeneousPolynomial& f, const Eigen::VectorXd& u) {
    const double v = f(u);
    if (!(v > 0.0)) throw not_positive("polynomial not positive at the given direction");
    return std::pow(v, -1.0 / double(f.degree()));
}

} // namespace sublevel
