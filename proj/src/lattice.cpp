#include "sublevel/lattice.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sublevel/grassmann.hpp"
#include "sublevel/operators.hpp"

namespace sublevel {

namespace intlin {

namespace {

void swap_cols(IntMatrix& m, int a, int b) { m.col(a).swap(m.col(b)); }

} // namespace

void column_hnf(const IntMatrix& A, IntMatrix& H, IntMatrix& U) {
    const int r = int(A.rows());
    const int n = int(A.cols());
    IntMatrix W = A;
    U = IntMatrix::Identity(n, n);

    int col = 0;
    for (int row = 0; row < r; ++row) {
        // gcd elimination across columns col..n-1 in this row
        while (true) {
            int piv = -1;
            long long best = 0;
            for (int c = col; c < n; ++c) {
                const long long v = std::llabs(W(row, c));
                if (v != 0 && (piv < 0 || v < best)) {
                    piv = c;
                    best = v;
                }
            }
            if (piv < 0) throw precondition_error("column_hnf: matrix does not have full row rank");
            if (piv != col) {
                swap_cols(W, piv, col);
                swap_cols(U, piv, col);
            }
            bool clean = true;
            for (int c = col + 1; c < n; ++c) {
                if (W(row, c) == 0) continue;
                const long long q = W(row, c) / W(row, col);
                if (q != 0) {
                    W.col(c) -= q * W.col(col);
                    U.col(c) -= q * U.col(col);
                }
                if (W(row, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (W(row, col) < 0) {
            W.col(col) = -W.col(col);
            U.col(col) = -U.col(col);
        }
        ++col;
    }
    H = W.leftCols(r);
}

int rank(IntMatrix m) {
    const auto inv = smith_invariants(std::move(m));
    int r = 0;
    for (long long v : inv)
        if (v != 0) ++r;
    return r;
}

std::vector<long long> smith_invariants(IntMatrix m) {
    const int rows = int(m.rows());
    const int cols = int(m.cols());
    const int k = std::min(rows, cols);
    std::vector<long long> inv;

    int top = 0;
    while (top < k) {
        // locate smallest nonzero entry in the remaining block
        int pr = -1, pc = -1;
        long long best = 0;
        for (int i = top; i < rows; ++i)
            for (int j = top; j < cols; ++j) {
                const long long v = std::llabs(m(i, j));
                if (v != 0 && (pr < 0 || v < best)) {
                    pr = i;
                    pc = j;
                    best = v;
                }
            }
        if (pr < 0) break;
        m.row(top).swap(m.row(pr));
        m.col(top).swap(m.col(pc));
        if (m(top, top) < 0) m.row(top) = -m.row(top);

        bool reduced = true;
        for (int i = top + 1; i < rows; ++i) {
            const long long q = m(i, top) / m(top, top);
            if (q != 0) m.row(i) -= q * m.row(top);
            if (m(i, top) != 0) reduced = false;
        }
        for (int j = top + 1; j < cols; ++j) {
            const long long q = m(top, j) / m(top, top);
            if (q != 0) m.col(j) -= q * m.col(top);
            if (m(top, j) != 0) reduced = false;
        }
        if (!reduced) continue;

        // divisibility fix-up: fold any non-multiple into the pivot row
        bool dirty = false;
        for (int i = top + 1; i < rows && !dirty; ++i)
            for (int j = top + 1; j < cols && !dirty; ++j)
                if (m(i, j) % m(top, top) != 0) {
                    m.row(top) += m.row(i);
                    dirty = true;
                }
        if (dirty) continue;

        inv.push_back(m(top, top));
        ++top;
    }
    while (int(inv.size()) < k) inv.push_back(0);
    return inv;
}

std::vector<int> moebius_sieve(long long up_to) {
    std::vector<int> mu(std::size_t(up_to + 1), 1);
    std::vector<bool> composite(std::size_t(up_to + 1), false);
    std::vector<long long> primes;
    if (up_to >= 0) mu[0] = 0;
    for (long long i = 2; i <= up_to; ++i) {
        if (!composite[std::size_t(i)]) {
            primes.push_back(i);
            mu[std::size_t(i)] = -1;
        }
        for (long long p : primes) {
            if (i * p > up_to) break;
            composite[std::size_t(i * p)] = true;
            if (i % p == 0) {
                mu[std::size_t(i * p)] = 0;
                break;
            }
            mu[std::size_t(i * p)] = -mu[std::size_t(i)];
        }
    }
    return mu;
}

} // namespace intlin

IntegerLatticeBasis::IntegerLatticeBasis(IntMatrix basis_columns) : basis_(std::move(basis_columns)) {
    const int n = int(basis_.rows());
    const int j = int(basis_.cols());
    if (n < 1 || j < 1 || j > n) throw precondition_error("lattice basis shape out of range");
    if (intlin::rank(basis_) != j)
        throw precondition_error("lattice basis columns are linearly dependent");

    Eigen::MatrixXd G = basis_.cast<double>();
    covolume_ = std::sqrt((G.transpose() * G).determinant());

    const auto inv = intlin::smith_invariants(basis_);
    primitive_ = true;
    for (int i = 0; i < j; ++i)
        if (inv[std::size_t(i)] != 1) primitive_ = false;
}

namespace {

// Streams every integer point of the box |x_i| <= R_i through fn, keeping an
// exact integer copy and a double copy in sync.
template <class F>
void for_each_box_point(const std::vector<long long>& R, std::uint64_t budget, F&& fn) {
    const int n = int(R.size());
    std::uint64_t total = 1;
    for (long long r : R) {
        const std::uint64_t width = std::uint64_t(2 * r + 1);
        if (total > budget / width)
            throw budget_exceeded("enumeration box exceeds the configured budget");
        total *= width;
    }

    IntVector x(n);
    Eigen::VectorXd xd(n);
    for (int i = 0; i < n; ++i) {
        x[i] = -R[std::size_t(i)];
        xd[i] = double(x[i]);
    }
    while (true) {
        fn(x, xd);
        int i = 0;
        while (i < n) {
            if (x[i] < R[std::size_t(i)]) {
                ++x[i];
                xd[i] = double(x[i]);
                break;
            }
            x[i] = -R[std::size_t(i)];
            xd[i] = double(x[i]);
            ++i;
        }
        if (i == n) break;
    }
}

long long box_radius(double alpha, const CoercivityCertificate& cert, int d) {
    if (!(alpha > 0.0)) throw precondition_error("alpha must be positive");
    if (!(cert.varpi > 0.0)) throw precondition_error("coercivity certificate is void");
    return (long long)std::ceil(std::pow(alpha / cert.varpi, 1.0 / double(d)));
}

// f(x) <= alpha with a compensated re-evaluation inside the guard band.
bool below_level(const HomogeneousPolynomial& f, const IntVector&, const Eigen::VectorXd& xd,
                 double alpha, double guard) {
    const double v = f(xd);
    if (std::abs(v - alpha) <= guard * std::abs(alpha))
        return f.eval_compensated(xd) <= alpha;
    return v <= alpha;
}

long long gcd_of(const IntVector& x) {
    long long g = 0;
    for (int i = 0; i < x.size(); ++i) g = std::gcd(g, std::llabs(x[i]));
    return g;
}

} // namespace

long long count_points(const HomogeneousPolynomial& f, double alpha,
                       const CoercivityCertificate& cert, const LatticeConfig& cfg) {
    const int n = f.dimension();
    const long long R = box_radius(alpha, cert, f.degree());
    long long count = 0;
    for_each_box_point(std::vector<long long>(std::size_t(n), R), cfg.max_enumeration,
                       [&](const IntVector& x, const Eigen::VectorXd& xd) {
                           if (below_level(f, x, xd, alpha, cfg.boundary_guard)) ++count;
                       });
    return count;
}

double min_nonzero(const HomogeneousPolynomial& f, const CoercivityCertificate& cert,
                   const LatticeConfig& cfg) {
    const int n = f.dimension();
    double axis_min = std::numeric_limits<double>::infinity();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        e[i] = 1.0;
        axis_min = std::min(axis_min, f(e));
        e[i] = -1.0;
        axis_min = std::min(axis_min, f(e));
        e[i] = 0.0;
    }
    const long long R = box_radius(axis_min, cert, f.degree());

    double best = std::numeric_limits<double>::infinity();
    for_each_box_point(std::vector<long long>(std::size_t(n), R), cfg.max_enumeration,
                       [&](const IntVector& x, const Eigen::VectorXd& xd) {
                           if (x.isZero()) return;
                           const double v = f(xd);
                           if (v <= best * (1.0 + 1e-9))
                               best = std::min(best, f.eval_compensated(xd));
                       });
    return best;
}

CountReport discrepancy_report(const HomogeneousPolynomial& f, double alpha,
                               const EstimatorConfig& est_cfg, const CoercivityCertificate& cert,
                               const LatticeConfig& cfg) {
    const int n = f.dimension();
    EstimatorConfig scaled = est_cfg;
    scaled.alpha = alpha;

    CountReport rep;
    rep.alpha = alpha;
    rep.count = count_points(f, alpha, cert, cfg);
    rep.main_term = volume_full(f, scaled);
    rep.components.reserve(std::size_t(n));
    CompensatedSum budget;
    for (int j = 0; j < n; ++j) {
        const Estimate ej = intrinsic_volume(f, j, scaled);
        rep.components.push_back(ej);
        budget.add(ej.value);
    }
    rep.error_bound = budget.value();
    const double gap = std::abs(double(rep.count) - rep.main_term.value);
    rep.ratio = gap / rep.error_bound;
    rep.bound_holds = gap <= rep.error_bound;
    return rep;
}

long long primitive_count(const HomogeneousPolynomial& f, double alpha,
                          const CoercivityCertificate& cert, const LatticeConfig& cfg) {
    const int n = f.dimension();
    const long long R = box_radius(alpha, cert, f.degree());
    long long count = 0;
    for_each_box_point(std::vector<long long>(std::size_t(n), R), cfg.max_enumeration,
                       [&](const IntVector& x, const Eigen::VectorXd& xd) {
                           if (gcd_of(x) != 1) return;
                           if (below_level(f, x, xd, alpha, cfg.boundary_guard)) ++count;
                       });
    return count;
}

long long moebius_check(const HomogeneousPolynomial& f, double alpha,
                        const CoercivityCertificate& cert, const LatticeConfig& cfg) {
    const double tau = min_nonzero(f, cert, cfg);
    const int d = f.degree();
    long long Q = (long long)std::floor(std::pow(alpha / tau, 1.0 / double(d)));
    while (std::pow(double(Q + 1), double(d)) * tau <= alpha) ++Q; // round-off guard
    if (Q < 1) return 0;

    const auto mu = intlin::moebius_sieve(Q);
    long long total = 0;
    for (long long q = 1; q <= Q; ++q) {
        if (mu[std::size_t(q)] == 0) continue;
        const double scaled = alpha / std::pow(double(q), double(d));
        const long long nstar = count_points(f, scaled, cert, cfg) - 1;
        total += mu[std::size_t(q)] * nstar;
    }
    return total;
}

namespace {

Subspace span_of_integer_columns(const IntMatrix& G) {
    const int n = int(G.rows());
    const int j = int(G.cols());
    Eigen::MatrixXd Gd = G.cast<double>();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Gd);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Subspace(q.leftCols(j), q.rightCols(n - j));
}

Estimate section_main_term(const HomogeneousPolynomial& f, const IntMatrix& G, double covolume,
                           double alpha, const EstimatorConfig& est_cfg) {
    const int j = int(G.cols());
    const Subspace E = span_of_integer_columns(G);
    Rng rng(substream(est_cfg.seed, 0x5ec71057ull));
    Eigen::VectorXd x(f.dimension());
    auto h = [&](const Eigen::VectorXd& th) {
        x.noalias() = E.basis() * th;
        return f(x);
    };
    Estimate lap = laplace_integral(h, f.degree(), E, est_cfg.inner_samples, rng);
    const double scale = std::pow(alpha, double(j) / double(f.degree())) /
                         std::tgamma(1.0 + double(j) / double(f.degree())) / covolume;
    lap.value *= scale;
    lap.std_error *= scale;
    return lap;
}

} // namespace

SublatticeCount sublattice_count(const HomogeneousPolynomial& f, const IntegerLatticeBasis& L,
                                 double alpha, const CoercivityCertificate& cert,
                                 const EstimatorConfig& est_cfg, const LatticeConfig& cfg) {
    if (f.dimension() != L.ambient_dimension())
        throw dimension_mismatch("sublattice_count: dimension mismatch");
    if (!L.primitive()) throw not_primitive("sublattice basis is not primitive");

    const int j = L.rank();
    const Eigen::MatrixXd Gd = L.basis().cast<double>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Gd);
    const double sigma_min = svd.singularValues().minCoeff();
    const double R_ambient = std::pow(alpha / cert.varpi, 1.0 / double(f.degree()));
    const long long Rc = (long long)std::ceil(R_ambient / sigma_min);

    long long count = 0;
    Eigen::VectorXd xd(f.dimension());
    IntVector x(f.dimension());
    for_each_box_point(std::vector<long long>(std::size_t(j), Rc), cfg.max_enumeration,
                       [&](const IntVector& c, const Eigen::VectorXd&) {
                           x.noalias() = L.basis() * c;
                           for (int i = 0; i < x.size(); ++i) xd[i] = double(x[i]);
                           if (below_level(f, x, xd, alpha, cfg.boundary_guard)) ++count;
                       });

    SublatticeCount out;
    out.count = count;
    out.main_term = section_main_term(f, L.basis(), L.covolume(), alpha, est_cfg);
    return out;
}

CosetCount coset_count(const HomogeneousPolynomial& f, const IntMatrix& A, const IntVector& b,
                       double alpha, const CoercivityCertificate& cert,
                       const EstimatorConfig& est_cfg, const LatticeConfig& cfg) {
    const int n = f.dimension();
    CosetCount out;

    if (A.rows() == 0) {
        // no constraints: the full lattice
        out.solvable = true;
        out.particular = IntVector::Zero(n);
        out.kernel_rank = n;
        out.count = count_points(f, alpha, cert, cfg);
        return out;
    }

    const int r = int(A.rows());
    if (A.cols() != n) throw dimension_mismatch("coset_count: constraint matrix width mismatch");
    if (b.size() != r) throw dimension_mismatch("coset_count: right-hand side length mismatch");
    if (intlin::rank(A) != r) throw precondition_error("coset_count: constraint matrix is rank deficient");

    IntMatrix H, U;
    intlin::column_hnf(A, H, U);

    // forward-substitute H y = b over the integers
    IntVector y = IntVector::Zero(r);
    for (int i = 0; i < r; ++i) {
        long long acc = b[i];
        for (int k = 0; k < i; ++k) acc -= H(i, k) * y[k];
        if (acc % H(i, i) != 0) {
            out.solvable = false;
            out.count = 0;
            return out;
        }
        y[i] = acc / H(i, i);
    }
    out.solvable = true;

    IntVector x0 = U.leftCols(r) * y;
    const IntMatrix K = U.rightCols(n - r);
    out.kernel_rank = n - r;

    if (n - r == 0) {
        out.particular = x0;
        Eigen::VectorXd xd = x0.cast<double>();
        out.count = below_level(f, x0, xd, alpha, cfg.boundary_guard) ? 1 : 0;
        return out;
    }

    // Babai rounding to shrink the particular solution before boxing.
    {
        const Eigen::MatrixXd Kd = K.cast<double>();
        const Eigen::VectorXd c =
            (Kd.transpose() * Kd).ldlt().solve(Kd.transpose() * x0.cast<double>());
        IntVector ci(n - r);
        for (int i = 0; i < n - r; ++i) ci[i] = (long long)std::llround(c[i]);
        x0 -= K * ci;
    }
    out.particular = x0;

    const Eigen::MatrixXd Kd = K.cast<double>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Kd);
    const double sigma_min = svd.singularValues().minCoeff();
    const double R_ambient = std::pow(alpha / cert.varpi, 1.0 / double(f.degree()));
    const double x0_norm = x0.cast<double>().norm();
    const long long Rc = (long long)std::ceil((R_ambient + x0_norm) / sigma_min);

    long long count = 0;
    IntVector x(n);
    Eigen::VectorXd xd(n);
    for_each_box_point(std::vector<long long>(std::size_t(n - r), Rc), cfg.max_enumeration,
                       [&](const IntVector& c, const Eigen::VectorXd&) {
                           x.noalias() = x0 + K * c;
                           for (int i = 0; i < n; ++i) xd[i] = double(x[i]);
                           if (below_level(f, x, xd, alpha, cfg.boundary_guard)) ++count;
                       });
    out.count = count;

    if (b.isZero()) {
        out.has_main_term = true;
        IntegerLatticeBasis L(K);
        out.main_term = section_main_term(f, L.basis(), L.covolume(), alpha, est_cfg);
    }
    return out;
}

ThetaResult theta_sum(const HomogeneousPolynomial& f, double t,
                      const CoercivityCertificate& cert, const LatticeConfig& cfg) {
    if (!(t > 0.0)) throw precondition_error("theta: t must be positive");
    if (!(cert.varpi > 0.0)) throw precondition_error("coercivity certificate is void");
    const int n = f.dimension();
    const int d = f.degree();

    // Comparison-series tail: sum over shells k > R of shell count times
    // exp(-t varpi k^d); decays superexponentially.
    auto tail_bound = [&](long long R) {
        CompensatedSum s;
        for (long long k = R + 1;; ++k) {
            const double shell =
                std::pow(2.0 * double(k) + 1.0, n) - std::pow(2.0 * double(k) - 1.0, n);
            const double term = shell * std::exp(-t * cert.varpi * std::pow(double(k), double(d)));
            s.add(term);
            if (term < 1e-300 || term < 1e-18 * s.value()) break;
            if (k > R + 10000000) break;
        }
        return s.value() * (1.0 + 1e-12);
    };

    long long R = 1;
    while (tail_bound(R) > 1e-12) {
        ++R;
        const double width = 2.0 * double(R) + 1.0;
        if (std::pow(width, n) > double(cfg.max_enumeration))
            throw budget_exceeded("theta: t too small for the enumeration budget");
    }

    CompensatedSum sum;
    for_each_box_point(std::vector<long long>(std::size_t(n), R), cfg.max_enumeration,
                       [&](const IntVector&, const Eigen::VectorXd& xd) {
                           sum.add(std::exp(-t * f(xd)));
                       });

    ThetaResult out;
    out.value = sum.value();
    out.tail_bound = tail_bound(R);
    out.radius = R;
    return out;
}

RationalCount rational_point_count(const HomogeneousPolynomial& f, double beta,
                                   const CoercivityCertificate& cert, const LatticeConfig& cfg) {
    const int n = f.dimension();
    if (!(beta > 0.0)) throw precondition_error("beta must be positive");
    const double alpha = std::pow(beta, double(f.degree()));

    RationalCount out;
    out.small_dimension = n < 3;

    const long long R = box_radius(alpha, cert, f.degree());
    long long free_count = 0, boundary = 0;
    for_each_box_point(std::vector<long long>(std::size_t(n), R), cfg.max_enumeration,
                       [&](const IntVector& x, const Eigen::VectorXd& xd) {
                           if (gcd_of(x) != 1) return;
                           if (!below_level(f, x, xd, alpha, cfg.boundary_guard)) return;
                           bool has_zero = false;
                           for (int i = 0; i < n; ++i)
                               if (x[i] == 0) has_zero = true;
                           if (has_zero)
                               ++boundary;
                           else
                               ++free_count;
                       });

    const long long orbit = 1LL << n;
    if (free_count % orbit != 0) {
        std::ostringstream os;
        os << "sign-orbit count " << free_count << " is not divisible by 2^" << n;
        throw divisibility_error(os.str());
    }
    out.count = free_count / orbit;
    out.boundary_excluded = boundary;
    return out;
}

} // namespace sublevel
