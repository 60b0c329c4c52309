#include "sublevel/variational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sublevel/grassmann.hpp"
#include "sublevel/operators.hpp"
#include "sublevel/parallel.hpp"
#include "sublevel/volumes.hpp"

namespace sublevel {

// ---------------------------------------------------------------------------
// canonical basis
// ---------------------------------------------------------------------------

namespace {

void enumerate_indices(int n, int d, std::vector<int>& cur,
                       std::vector<HomogeneousPolynomial::MultiIndex>& out) {
    if (int(cur.size()) == n - 1) {
        cur.push_back(d - std::accumulate(cur.begin(), cur.end(), 0));
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    const int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int e = d - used; e >= 0; --e) { // descending: lex-descending order overall
        cur.push_back(e);
        enumerate_indices(n, d, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<HomogeneousPolynomial::MultiIndex> monomial_basis(int n, int d) {
    std::vector<HomogeneousPolynomial::MultiIndex> out;
    std::vector<int> cur;
    enumerate_indices(n, d, cur, out);
    return out;
}

std::size_t basis_size(int n, int d) {
    // C(n + d - 1, d)
    double v = 1.0;
    for (int k = 1; k <= d; ++k) v *= double(n - 1 + k) / double(k);
    return std::size_t(std::llround(v));
}

HomogeneousPolynomial basis_polynomial(int n, int d, std::size_t index) {
    const auto basis = monomial_basis(n, d);
    if (index >= basis.size()) throw precondition_error("basis index out of range");
    return HomogeneousPolynomial(n, d, {{basis[index], 1.0}});
}

Eigen::VectorXd coefficients_in_basis(const HomogeneousPolynomial& f) {
    const auto basis = monomial_basis(f.dimension(), f.degree());
    std::map<HomogeneousPolynomial::MultiIndex, std::size_t> where;
    for (std::size_t k = 0; k < basis.size(); ++k) where[basis[k]] = k;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(long(basis.size()));
    for (const auto& [mi, coef] : f.terms()) c[long(where.at(mi))] = coef;
    return c;
}

HomogeneousPolynomial polynomial_from_coefficients(int n, int d, const Eigen::VectorXd& c) {
    const auto basis = monomial_basis(n, d);
    if (std::size_t(c.size()) != basis.size())
        throw dimension_mismatch("coefficient vector length does not match basis");
    std::vector<HomogeneousPolynomial::Term> terms;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (c[long(k)] != 0.0) terms.push_back({basis[k], c[long(k)]});
    return HomogeneousPolynomial(n, d, terms);
}

// ---------------------------------------------------------------------------
// shared moment batches: functional value and derivative moments on one set
// of common random draws
// ---------------------------------------------------------------------------

namespace {

struct MomentResult {
    double objective = 0.0;
    double objective_se = 0.0;
    Eigen::VectorXd derivative;     // Gateaux derivative per direction (sign included)
    Eigen::VectorXd derivative_se;
    std::uint64_t outer = 0;
    std::uint64_t inner = 0;
};

// Functional value and Gateaux derivatives along `dirs` in one pass over a
// common batch. The per-direction radial integrals are closed forms, so the
// derivative columns are the exact coefficient-gradients of the objective
// column under the same draws.
MomentResult batched_moments(const HomogeneousPolynomial& f, int j, VolumeFunctional variant,
                             const EstimatorConfig& cfg,
                             const std::vector<const HomogeneousPolynomial*>& dirs) {
    const int n = f.dimension();
    const int d = f.degree();
    const int K = int(dirs.size());
    if (j < 1 || j > n) throw precondition_error("moments: need 1 <= j <= n");
    for (const auto* p : dirs)
        if (p->dimension() != n || p->degree() != d)
            throw dimension_mismatch("direction polynomial has wrong (n, d)");

    const double ex_obj = double(j) / double(d);
    const double ex_grad = double(j + d) / double(d);
    const detail::NegativePower np_obj(ex_obj);
    const detail::NegativePower np_grad(ex_grad);
    const double gamma_obj = std::tgamma(ex_obj) / double(d);
    const double gamma_grad = std::tgamma(ex_grad) / double(d);

    double coef = 1.0;
    if (j < n) {
        const VolumeConstants c = constants(j, n, d);
        coef = (variant == VolumeFunctional::intrinsic) ? c.beta_jn : c.sigma_jn;
    }
    const double pre = coef / std::tgamma(1.0 + ex_obj);
    const double sphere_area = double(j) * unit_ball_volume(j);

    std::vector<double> obj(cfg.outer_samples);
    Eigen::MatrixXd grads(long(cfg.outer_samples), K);

    parallel_chunks(cfg.outer_samples, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
        Eigen::VectorXd theta, w(n);
        
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng(substream(cfg.seed, i));

            auto accumulate_direction = [&](const Eigen::VectorXd& point, double v,
                                            CompensatedSum& so, std::vector<CompensatedSum>& sg) {
                if (!(v > 0.0))
                    throw non_finite_error("moment integrand hit a nonpositive value");
                so.add(np_obj(v));
                const double gv = np_grad(v);
                for (int k = 0; k < K; ++k) sg[std::size_t(k)].add((*dirs[std::size_t(k)])(point)*gv);
            };

            CompensatedSum so;
            std::vector<CompensatedSum> sg(static_cast<std::size_t>(K));
            std::uint64_t samples = 0;

            try {
                if (j == n) {
                    for (std::uint64_t s = 0; s < cfg.inner_samples; ++s) {
                        detail::random_unit_into(rng, n, w);
                        accumulate_direction(w, f(w), so, sg);
                    }
                    samples = cfg.inner_samples;
                } else {
                    const Subspace E = sample_subspace(j, n, rng);
                    const Eigen::MatrixXd& B = E.basis();
                    const Eigen::MatrixXd& C = E.complement_basis();
                    const bool projection = variant == VolumeFunctional::intrinsic;
                    InfProjector proj(f, E, cfg.solver);

                    auto visit = [&](const Eigen::VectorXd& th) {
                        if (projection) {
                            const InfProjResult r = proj.solve(th);
                            w.noalias() = B * th;
                            if (C.cols() > 0) w.noalias() += C * r.minimizer;
                            accumulate_direction(w, r.value, so, sg);
                        } else {
                            w.noalias() = B * th;
                            accumulate_direction(w, f(w), so, sg);
                        }
                    };

                    if (j == 1) {
                        theta.resize(1);
                        theta[0] = 1.0;
                        visit(theta);
                        theta[0] = -1.0;
                        visit(theta);
                        samples = 0; // two-point sum, no area factor
                    } else {
                        for (std::uint64_t s = 0; s < cfg.inner_samples; ++s) {
                            detail::random_unit_into(rng, j, theta);
                            visit(theta);
                        }
                        samples = cfg.inner_samples;
                    }
                }
            } catch (const max_iters_error& e) {
                std::ostringstream os;
                os << e.what() << " (Grassmann draw #" << i << ")";
                throw max_iters_error(os.str());
            }

            const double factor = (samples == 0) ? 1.0 : sphere_area / double(samples);
            obj[i] = gamma_obj * factor * so.value();
            for (int k = 0; k < K; ++k)
                grads(long(i), k) = gamma_grad * factor * sg[std::size_t(k)].value();
        }
    });

    MomentResult out;
    out.outer = cfg.outer_samples;
    out.inner = (j == 1 && j != n) ? 2 : cfg.inner_samples;
    const double m = detail::mean_of(obj);
    out.objective = pre * m;
    out.objective_se = pre * detail::std_error_of(obj, m);
    out.derivative.resize(K);
    out.derivative_se.resize(K);
    for (int k = 0; k < K; ++k) {
        std::vector<double> col(cfg.outer_samples);
        for (std::uint64_t i = 0; i < cfg.outer_samples; ++i) col[i] = grads(long(i), k);
        const double gm = detail::mean_of(col);
        out.derivative[k] = -pre * gm;
        out.derivative_se[k] = pre * detail::std_error_of(col, gm);
    }
    return out;
}

} // namespace

Estimate gateaux_dual(const HomogeneousPolynomial& f, const HomogeneousPolynomial& phi, int j,
                      const EstimatorConfig& config) {
    if (j < 1 || j > f.dimension() - 1)
        throw precondition_error("gateaux_dual: need 1 <= j <= n-1");
    if (phi.is_zero()) return Estimate{0.0, 0.0, config.outer_samples, config.inner_samples};
    const MomentResult r =
        batched_moments(f, j, VolumeFunctional::dual, config, {&phi});
    return Estimate{r.derivative[0], r.derivative_se[0], r.outer, r.inner};
}

Estimate gateaux_intrinsic(const HomogeneousPolynomial& f, const HomogeneousPolynomial& phi,
                           int j, const EstimatorConfig& config) {
    if (j < 1 || j > f.dimension() - 1)
        throw precondition_error("gateaux_intrinsic: need 1 <= j <= n-1");
    if (phi.is_zero()) return Estimate{0.0, 0.0, config.outer_samples, config.inner_samples};
    const MomentResult r =
        batched_moments(f, j, VolumeFunctional::intrinsic, config, {&phi});
    return Estimate{r.derivative[0], r.derivative_se[0], r.outer, r.inner};
}

// ---------------------------------------------------------------------------
// KKT residuals
// ---------------------------------------------------------------------------

namespace {

KktReport kkt_residual_impl(const HomogeneousPolynomial& f_star,
                            const std::vector<std::pair<double, Eigen::VectorXd>>& atoms, int j,
                            VolumeFunctional variant, const EstimatorConfig& config) {
    if (atoms.empty()) throw precondition_error("kkt_residual: atom list is empty");
    const int n = f_star.dimension();
    const int d = f_star.degree();

    const auto basis = monomial_basis(n, d);
    std::vector<HomogeneousPolynomial> dirs;
    dirs.reserve(basis.size());
    for (const auto& mi : basis) dirs.emplace_back(n, d, std::vector<HomogeneousPolynomial::Term>{{mi, 1.0}});
    std::vector<const HomogeneousPolynomial*> dir_ptrs;
    for (const auto& p : dirs) dir_ptrs.push_back(&p);

    const MomentResult r = batched_moments(f_star, j, variant, config, dir_ptrs);

    KktReport rep;
    const int K = int(basis.size());
    rep.moments.resize(K);
    rep.moment_std_errors = r.derivative_se;
    rep.atomic = Eigen::VectorXd::Zero(K);
    rep.residuals.resize(K);

    double mass = 0.0;
    double feas = 0.0;
    for (const auto& [lam, x] : atoms) {
        if (!(lam > 0.0)) throw precondition_error("kkt_residual: atom weights must be positive");
        if (x.size() != n) throw dimension_mismatch("kkt_residual: atom dimension mismatch");
        mass += lam;
        feas = std::max(feas, std::abs(f_star(x) - 1.0));
        for (int k = 0; k < K; ++k) rep.atomic[k] += lam * dirs[std::size_t(k)](x);
    }

    for (int k = 0; k < K; ++k) {
        rep.moments[k] = -r.derivative[k]; // moment side carries no sign
        rep.residuals[k] = std::abs(rep.moments[k] - rep.atomic[k]);
    }
    rep.max_feasibility_gap = feas;
    rep.mass_gap = std::abs(mass - (double(j) / double(d)) * r.objective);
    return rep;
}

} // namespace

KktReport kkt_residual(const HomogeneousPolynomial& f_star,
                       const std::vector<std::pair<double, Eigen::VectorXd>>& atoms, int j,
                       const EstimatorConfig& config) {
    return kkt_residual_impl(f_star, atoms, j, VolumeFunctional::intrinsic, config);
}

// ---------------------------------------------------------------------------
// the constrained solver
// ---------------------------------------------------------------------------

namespace {

// 0 must lie strictly inside the convex hull: every direction must see a
// point with positive inner product. Sampled check at desk scale.
void check_interior(const std::vector<Eigen::VectorXd>& points, int n) {
    Rng rng(0x1e7e5107ull);
    Eigen::VectorXd u(n);
    double worst = std::numeric_limits<double>::infinity();
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        detail::random_unit_into(rng, n, u);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& x : points) best = std::max(best, u.dot(x));
        worst = std::min(worst, best);
        if (worst <= 0.0) break;
    }
    if (!(worst > 1e-9)) throw infeasible("origin is not strictly inside the point hull");
}

HomogeneousPolynomial random_certified(int n, int d, Rng& rng) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) A(i, k) = rng.normal();
    Eigen::MatrixXd Q = A.transpose() * A + 0.3 * Eigen::MatrixXd::Identity(n, n);
    return quadratic_power(Q / Q.trace(), d);
}

struct Objective {
    const std::vector<Eigen::VectorXd>& points;
    Eigen::MatrixXd Phi; // constraints: row i = basis values at point i
    int n, d, j;
    VolumeFunctional variant;
    std::vector<HomogeneousPolynomial> basis_polys;
    std::vector<const HomogeneousPolynomial*> basis_ptrs;

    double barrier_t = 1.0;
    EstimatorConfig batch; // fixed per epoch

    double value(const Eigen::VectorXd& c) const {
        const Eigen::VectorXd g = Phi * c;
        for (int i = 0; i < g.size(); ++i)
            if (g[i] >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
        double fval;
        try {
            HomogeneousPolynomial f = polynomial_from_coefficients(n, d, c);
            if (f.is_zero()) return std::numeric_limits<double>::infinity();
            const MomentResult r = batched_moments(f, j, variant, batch, {});
            fval = r.objective;
        } catch (const numerical_error&) {
            return std::numeric_limits<double>::infinity();
        }
        double bar = 0.0;
        for (int i = 0; i < g.size(); ++i) bar -= std::log(1.0 - g[i]);
        return fval + bar / barrier_t;
    }

    // objective, gradient of the barrier-augmented function
    std::pair<double, Eigen::VectorXd> value_grad(const Eigen::VectorXd& c) const {
        HomogeneousPolynomial f = polynomial_from_coefficients(n, d, c);
        const MomentResult r = batched_moments(f, j, variant, batch, basis_ptrs);
        const Eigen::VectorXd g = Phi * c;
        double val = r.objective;
        Eigen::VectorXd grad = r.derivative;
        for (int i = 0; i < g.size(); ++i) {
            const double slack = 1.0 - g[i];
            if (slack <= 0.0) return {std::numeric_limits<double>::infinity(), grad};
            val -= std::log(slack) / barrier_t;
            grad += Phi.row(i).transpose() / (slack * barrier_t);
        }
        return {val, grad};
    }
};

// Cheap positivity probe on a fixed direction set; full certification runs at
// epoch boundaries.
bool positivity_probe(const HomogeneousPolynomial& f, const std::vector<Eigen::VectorXd>& probes) {
    for (const auto& u : probes)
        if (!(f(u) > 0.0)) return false;
    return true;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int iters = 4000) {
    const double scale = (A.transpose() * A).norm();
    const double step = scale > 0 ? 1.0 / scale : 1.0;
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(A.cols(), b.cwiseAbs().maxCoeff() /
                                                                  std::max(1.0, double(A.cols())));
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd grad = A.transpose() * (A * lam - b);
        lam = (lam - step * grad).cwiseMax(0.0);
    }
    return lam;
}

} // namespace

LJSolution solve_P0(const std::vector<Eigen::VectorXd>& points, int j, int d,
                    VolumeFunctional variant, const VariationalConfig& config) {
    if (points.empty()) throw precondition_error("solve_P0: no points");
    const int n = int(points[0].size());
    for (const auto& x : points)
        if (int(x.size()) != n) throw dimension_mismatch("solve_P0: inconsistent point dimensions");
    if (j < 1 || j > n) throw precondition_error("solve_P0: need 1 <= j <= n");
    if (d < 2 || d % 2 != 0) throw precondition_error("solve_P0: degree must be even >= 2");

    const auto basis = monomial_basis(n, d);
    const std::size_t N = basis.size();
    if (N > 50) throw precondition_error("solve_P0: coefficient space too large for desk scale");

    {
        Eigen::MatrixXd P(n, long(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) P.col(long(i)) = points[i];
        if (Eigen::FullPivLU<Eigen::MatrixXd>(P).rank() < n)
            throw infeasible("solve_P0: points do not span the ambient space");
    }
    check_interior(points, n);

    Objective obj{points, {}, n, d, j, variant, {}, {}, 1.0, config.estimator};
    obj.Phi.resize(long(points.size()), long(N));
    obj.basis_polys.reserve(N);
    for (std::size_t k = 0; k < N; ++k)
        obj.basis_polys.emplace_back(n, d,
                                     std::vector<HomogeneousPolynomial::Term>{{basis[k], 1.0}});
    for (const auto& p : obj.basis_polys) obj.basis_ptrs.push_back(&p);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < N; ++k)
            obj.Phi(long(i), long(k)) = obj.basis_polys[k](points[i]);

    // Initial iterate: scaled isotropic polynomial, optionally mixed with a
    // random certified start (restarts).
    Eigen::VectorXd c = coefficients_in_basis(ball_polynomial(n, d));
    if (config.init_mix > 0.0) {
        Rng rng(splitmix64(config.init_seed + 0x9137ull));
        const Eigen::VectorXd cr = coefficients_in_basis(random_certified(n, d, rng));
        c = (1.0 - config.init_mix) * c + config.init_mix * cr;
    }
    {
        const double worst = (obj.Phi * c).maxCoeff();
        if (!(worst > 0.0)) throw infeasible("solve_P0: degenerate initialization");
        c *= 0.90 / worst;
    }

    // Fixed probe directions for the cheap positivity guard.
    std::vector<Eigen::VectorXd> probes;
    {
        Rng rng(0x9b0be5ull);
        Eigen::VectorXd u(n);
        for (int t = 0; t < 128; ++t) {
            detail::random_unit_into(rng, n, u);
            probes.push_back(u);
        }
    }

    CertifyConfig epoch_cert = config.certify;
    epoch_cert.positivity_starts = std::min(epoch_cert.positivity_starts, 16);
    epoch_cert.convexity_samples = std::min(epoch_cert.convexity_samples, 512);

    bool any_accept_ever = false;
    int stalled_epochs = 0;
    int epochs_run = 0;
    double step = config.initial_step;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        ++epochs_run;
        obj.batch.seed = substream(config.estimator.seed, std::uint64_t(epoch));
        obj.barrier_t = config.barrier_t0 * std::pow(config.barrier_growth, epoch);

        const Eigen::VectorXd epoch_start = c;
        bool any_accept = false;

        for (int it = 0; it < config.max_steps_per_epoch; ++it) {
            auto [val, grad] = obj.value_grad(c);
            if (!std::isfinite(val)) break;
            const Eigen::VectorXd p = -grad;
            const double slope = grad.dot(p);
            if (!(slope < 0.0)) break;

            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                const Eigen::VectorXd ctrial = c + step * p;
                HomogeneousPolynomial ftrial = polynomial_from_coefficients(n, d, ctrial);
                if (ftrial.is_zero() || !positivity_probe(ftrial, probes)) {
                    step *= 0.5;
                    continue;
                }
                const double vtrial = obj.value(ctrial);
                if (vtrial <= val + 1e-4 * step * slope) {
                    c = ctrial;
                    accepted = true;
                    any_accept = true;
                    any_accept_ever = true;
                    step = std::min(step * 1.5, 1e2);
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            if (step * p.norm() < config.step_tol) break;
        }

        // epoch-boundary certification with backtracking into the last
        // certified iterate
        bool certified = false;
        for (int half = 0; half <= 8; ++half) {
            HomogeneousPolynomial f = polynomial_from_coefficients(n, d, c);
            epoch_cert.seed = substream(config.certify.seed, std::uint64_t(epoch));
            try {
                certify_positive(f, epoch_cert);
                if (certify_convex(f, epoch_cert)) {
                    certified = true;
                    break;
                }
            } catch (const not_positive&) {
            }
            c = epoch_start + 0.5 * (c - epoch_start);
        }
        if (!certified) {
            c = epoch_start;
            ++stalled_epochs;
            if (stalled_epochs >= 2) break;
        } else {
            stalled_epochs = 0;
        }
        if (!any_accept && epoch == 0 && !any_accept_ever)
            throw no_progress("solve_P0: no step accepted from the initial iterate");
        if (!any_accept && obj.barrier_t > 1e5) break;
    }

    LJSolution sol{polynomial_from_coefficients(n, d, c), {}, {}, {}, {}, false, epochs_run};

    // final certification at full strength
    CertifyConfig final_cert = config.certify;
    certify_positive(sol.f_star, final_cert);
    if (!certify_convex(sol.f_star, final_cert))
        throw not_certified("solve_P0: final iterate failed convexity certification");
    for (const auto& x : points)
        if (sol.f_star(x) > 1.0 + 1e-9)
            throw not_certified("solve_P0: final iterate violates a containment constraint");

    EstimatorConfig final_batch = config.estimator;
    final_batch.seed = substream(config.estimator.seed, 0xf17a1ull);
    {
        const MomentResult r = batched_moments(sol.f_star, j, variant, final_batch, {});
        sol.objective = Estimate{r.objective, r.objective_se, r.outer, r.inner};
    }

    for (const auto& x : points)
        if (sol.f_star(x) >= 1.0 - config.contact_band) sol.contact_points.push_back(x);

    if (!sol.contact_points.empty()) {
        std::vector<const HomogeneousPolynomial*> dir_ptrs;
        for (const auto& p : obj.basis_polys) dir_ptrs.push_back(&p);
        const MomentResult r = batched_moments(sol.f_star, j, variant, final_batch, dir_ptrs);
        Eigen::MatrixXd A(long(N), long(sol.contact_points.size()));
        for (std::size_t l = 0; l < sol.contact_points.size(); ++l)
            for (std::size_t k = 0; k < N; ++k)
                A(long(k), long(l)) = obj.basis_polys[k](sol.contact_points[l]);
        const Eigen::VectorXd moments = -r.derivative;
        sol.contact_weights = nnls(A, moments);

        std::vector<std::pair<double, Eigen::VectorXd>> atoms;
        for (std::size_t l = 0; l < sol.contact_points.size(); ++l)
            if (sol.contact_weights[long(l)] > 1e-12)
                atoms.push_back({sol.contact_weights[long(l)], sol.contact_points[l]});
        if (!atoms.empty())
            sol.kkt_report = kkt_residual_impl(sol.f_star, atoms, j, variant, final_batch);
    }

    sol.converged = stalled_epochs == 0;
    return sol;
}

// ---------------------------------------------------------------------------
// (Q0): the isotropic polynomial against random competitors
// ---------------------------------------------------------------------------

bool check_Q0_ball(const std::function<double(const HomogeneousPolynomial&)>& norm, int n, int d,
                   int j, const EstimatorConfig& config) {
    // invariance spot-check under random signed permutations
    {
        Rng rng(0xc0ffee11ull);
        for (int trial = 0; trial < 6; ++trial) {
            HomogeneousPolynomial f = random_certified(n, d, rng);
            std::vector<int> perm(static_cast<std::size_t>(n));
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = n - 1; i > 0; --i)
                std::swap(perm[std::size_t(i)], perm[rng.bits() % std::uint64_t(i + 1)]);
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i)
                P(perm[std::size_t(i)], i) = (rng.uniform01() < 0.5) ? 1.0 : -1.0;
            const double a = norm(f);
            const double b = norm(compose_linear(f, P));
            if (std::abs(a - b) > 1e-8 * (1.0 + std::abs(a)))
                throw precondition_error("norm is not invariant under signed permutations");
        }
    }

    const HomogeneousPolynomial ball = ball_polynomial(n, d);
    const double bn = norm(ball);
    if (!(bn > 0.0)) throw precondition_error("norm vanishes on the isotropic polynomial");
    const HomogeneousPolynomial candidate = ball.scaled(1.0 / bn);

    auto objective = [&](const HomogeneousPolynomial& f, VolumeFunctional variant) {
        const MomentResult r = batched_moments(f, j, variant, config, {});
        return std::pair<double, double>{r.objective, r.objective_se};
    };

    for (VolumeFunctional variant : {VolumeFunctional::intrinsic, VolumeFunctional::dual}) {
        const auto [base, base_se] = objective(candidate, variant);
        Rng rng(0x0b5e55ull);
        for (int t = 0; t < 50; ++t) {
            HomogeneousPolynomial comp = random_certified(n, d, rng);
            comp = comp.scaled(1.0 / norm(comp));
            const auto [val, se] = objective(comp, variant);
            const double slack = 3.0 * std::sqrt(base_se * base_se + se * se);
            if (base > val + slack) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

double sphere_l2_norm(const HomogeneousPolynomial& f) {
    const int n = f.dimension();
    detail::TermMap fm;
    for (const auto& [mi, c] : f.terms()) fm[mi] += c;
    const detail::TermMap sq = detail::multiply(fm, fm, n);

    // integral over the unit sphere of a monomial with even exponents:
    // 2 prod Gamma((a_i+1)/2) / Gamma((n + deg)/2); zero if any a_i is odd
    double acc = 0.0;
    for (const auto& [e, c] : sq) {
        bool odd = false;
        int deg = 0;
        for (int a : e) {
            if (a % 2 != 0) odd = true;
            deg += a;
        }
        if (odd) continue;
        double lg = std::log(2.0) - std::lgamma(0.5 * (n + deg));
        for (int a : e) lg += std::lgamma(0.5 * (a + 1));
        acc += c * std::exp(lg);
    }
    const double area = double(n) * unit_ball_volume(n);
    return std::sqrt(std::max(0.0, acc / area));
}

double sphere_sup_norm(const HomogeneousPolynomial& f) {
    const int n = f.dimension();
    const int base_points = n <= 3 ? 256 : 64;
    Rng rng(0x5fa7b0b5ull);
    Eigen::VectorXd u(n), v(n);
    std::vector<int> perm(static_cast<std::size_t>(n));

    double best = 0.0;
    for (int t = 0; t < base_points; ++t) {
        detail::random_unit_into(rng, n, u);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            for (std::uint64_t signs = 0; signs < (1ull << n); ++signs) {
                for (int i = 0; i < n; ++i) {
                    const double s = (signs >> i) & 1 ? -1.0 : 1.0;
                    v[i] = s * u[perm[std::size_t(i)]];
                }
                best = std::max(best, std::abs(f(v)));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return best;
}

} // namespace sublevel
