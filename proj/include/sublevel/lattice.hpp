#pragma once

#include <cstdint>
#include <vector>

#include "sublevel/estimate.hpp"
#include "sublevel/poly.hpp"
#include "sublevel/volumes.hpp"

namespace sublevel {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

struct LatticeConfig {
    std::uint64_t max_enumeration = 1000000000ull; // box size guard, in points
    double boundary_guard = 1e-9; // relative band for compensated re-evaluation
};

// Integer basis of a sublattice L <= Z^n (columns). Primitivity (L equals the
// integer points of its real span) is decided by the Smith invariants of the
// basis matrix.
class IntegerLatticeBasis {
  public:
    explicit IntegerLatticeBasis(IntMatrix basis_columns);

    int ambient_dimension() const { return int(basis_.rows()); }
    int rank() const { return int(basis_.cols()); }
    const IntMatrix& basis() const { return basis_; }
    double covolume() const { return covolume_; }
    bool primitive() const { return primitive_; }

  private:
    IntMatrix basis_;
    double covolume_ = 0.0;
    bool primitive_ = false;
};

// Exact count of {x in Z^n : f(x) <= alpha}; enumeration box from the
// coercivity certificate, boundary ties settled by compensated evaluation.
long long count_points(const HomogeneousPolynomial& f, double alpha,
                       const CoercivityCertificate& cert, const LatticeConfig& cfg = {});

// tau = min over nonzero integer points of f.
double min_nonzero(const HomogeneousPolynomial& f, const CoercivityCertificate& cert,
                   const LatticeConfig& cfg = {});

struct CountReport {
    double alpha = 0.0;
    long long count = 0;
    Estimate main_term;                  // V_n estimate scaled by alpha^{n/d}
    std::vector<Estimate> components;    // j = 0 .. n-1, each scaled by alpha^{j/d}
    double error_bound = 0.0;            // sum of component values (no dimensional constant)
    double ratio = 0.0;                  // |count - main| / error_bound
    bool bound_holds = false;
};

CountReport discrepancy_report(const HomogeneousPolynomial& f, double alpha,
                               const EstimatorConfig& est_cfg, const CoercivityCertificate& cert,
                               const LatticeConfig& cfg = {});

// gcd-filtered exact count of primitive points.
long long primitive_count(const HomogeneousPolynomial& f, double alpha,
                          const CoercivityCertificate& cert, const LatticeConfig& cfg = {});

// The same number via the finite Moebius sum over dilated counts; equality
// with primitive_count is the module self-test.
long long moebius_check(const HomogeneousPolynomial& f, double alpha,
                        const CoercivityCertificate& cert, const LatticeConfig& cfg = {});

struct SublatticeCount {
    long long count = 0;
    Estimate main_term; // vol_j of the unit section / det L, scaled by alpha^{j/d}
};

SublatticeCount sublattice_count(const HomogeneousPolynomial& f, const IntegerLatticeBasis& L,
                                 double alpha, const CoercivityCertificate& cert,
                                 const EstimatorConfig& est_cfg, const LatticeConfig& cfg = {});

struct CosetCount {
    bool solvable = false;
    long long count = 0;
    IntVector particular;   // one integer solution of A x = b (when solvable)
    int kernel_rank = 0;
    bool has_main_term = false; // set for b = 0
    Estimate main_term;
};

CosetCount coset_count(const HomogeneousPolynomial& f, const IntMatrix& A, const IntVector& b,
                       double alpha, const CoercivityCertificate& cert,
                       const EstimatorConfig& est_cfg, const LatticeConfig& cfg = {});

struct ThetaResult {
    double value = 0.0;
    double tail_bound = 0.0; // certified bound on the omitted tail
    long long radius = 0;    // sup-norm radius of the summed box
};

ThetaResult theta_sum(const HomogeneousPolynomial& f, double t,
                      const CoercivityCertificate& cert, const LatticeConfig& cfg = {});

struct RationalCount {
    long long count = 0;              // sign-orbit count of all-nonzero primitive points
    long long boundary_excluded = 0;  // primitive points fixed by some sign flip
    bool small_dimension = false;     // n < 3: asymptotics not claimed
};

// Fixed-orthant projective count at height bound beta: primitive points with
// f(x) <= beta^d and no zero coordinate, divided by 2^n (divisibility
// asserted).
RationalCount rational_point_count(const HomogeneousPolynomial& f, double beta,
                                   const CoercivityCertificate& cert,
                                   const LatticeConfig& cfg = {});

namespace intlin {

// Column-style Hermite reduction: returns U unimodular with A*U = [H | 0],
// H lower triangular with positive diagonal. A must have full row rank.
void column_hnf(const IntMatrix& A, IntMatrix& H, IntMatrix& U);

int rank(IntMatrix m);

// Diagonal of the Smith normal form (nonnegative, divisibility chain).
std::vector<long long> smith_invariants(IntMatrix m);

// mu(1..up_to) by sieve.
std::vector<int> moebius_sieve(long long up_to);

} // namespace intlin

} // namespace sublevel
