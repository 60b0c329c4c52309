#include "sublevel/blocks.hpp"

#include <cmath>

#include "sublevel/volumes.hpp"

namespace sublevel {

BlockStructure::BlockStructure(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw precondition_error("block structure needs at least one block");
    degree_ = blocks_[0].poly.degree();
    for (const auto& b : blocks_) {
        if (b.dims < 1) throw precondition_error("block dimension must be >= 1");
        if (b.poly.dimension() != b.dims)
            throw dimension_mismatch("block polynomial dimension does not match block size");
        if (b.poly.degree() != degree_)
            throw precondition_error("all blocks must share one degree");
        offsets_.push_back(ambient_);
        ambient_ += b.dims;
    }
}

HomogeneousPolynomial assemble(const BlockStructure& bs) {
    std::vector<HomogeneousPolynomial::Term> terms;
    for (std::size_t b = 0; b < bs.block_count(); ++b) {
        const auto& blk = bs.block(b);
        const int off = bs.offset(b);
        for (const auto& [mi, c] : blk.poly.terms()) {
            std::vector<int> e(bs.ambient_dimension(), 0);
            for (int v = 0; v < blk.dims; ++v) e[off + v] = mi[v];
            terms.push_back({e, c});
        }
    }
    return HomogeneousPolynomial(bs.ambient_dimension(), bs.degree(), terms);
}

Subspace block_subspace(const BlockStructure& bs,
                        const std::vector<std::pair<std::size_t, Eigen::MatrixXd>>& parts) {
    const int n = bs.ambient_dimension();
    int j = 0;
    for (const auto& [b, frame] : parts) {
        if (b >= bs.block_count()) throw precondition_error("block index out of range");
        if (frame.rows() != bs.block(b).dims)
            throw dimension_mismatch("block frame has wrong row count");
        j += int(frame.cols());
    }
    if (j < 1 || j > n) throw precondition_error("block subspace dimension out of range");

    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, j);
    int col = 0;
    for (const auto& [b, frame] : parts) {
        basis.block(bs.offset(b), col, frame.rows(), frame.cols()) = frame;
        col += int(frame.cols());
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // Replace the leading columns with the exact lifted frame (QR may flip
    // signs); the trailing columns provide the orthonormal complement.
    Eigen::MatrixXd complement = q.rightCols(n - j);
    return Subspace(basis, complement);
}

namespace {

// Per-block orthonormal frame of the projection of E onto block b, in block
// coordinates; empty when the projection is {0}.
Eigen::MatrixXd block_projection_frame(const Eigen::MatrixXd& basis, int offset, int dims) {
    const Eigen::MatrixXd part = basis.middleRows(offset, dims);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(part, Eigen::ComputeThinU);
    const double tol = 1e-9 * std::max(1.0, svd.singularValues().size() > 0
                                                ? svd.singularValues()(0)
                                                : 0.0);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    return svd.matrixU().leftCols(rank);
}

Subspace full_block_subspace(const Eigen::MatrixXd& frame) {
    const int m = int(frame.rows());
    const int r = int(frame.cols());
    if (r == m) return Subspace(frame, Eigen::MatrixXd(m, 0));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    return Subspace(frame, q.rightCols(m - r));
}

} // namespace

bool factor_check(const BlockStructure& bs, const Subspace& E, const Eigen::VectorXd& y,
                  double tol, const SolverConfig& solver) {
    if (E.ambient_dimension() != bs.ambient_dimension())
        throw dimension_mismatch("factor_check: subspace dimension mismatch");
    const int j = E.dimension();

    // E must split as the direct sum of its block projections.
    std::vector<Eigen::MatrixXd> frames(bs.block_count());
    int total_rank = 0;
    for (std::size_t b = 0; b < bs.block_count(); ++b) {
        frames[b] = block_projection_frame(E.basis(), bs.offset(b), bs.block(b).dims);
        total_rank += int(frames[b].cols());
    }
    if (total_rank != j)
        throw precondition_error("factor_check: subspace straddles blocks non-orthogonally");

    const HomogeneousPolynomial f = assemble(bs);
    const Eigen::VectorXd x = E.embed(y);

    const double lhs_proj = inf_project(f, E, y, solver).value;
    const double lhs_rest = f(x);

    double rhs_proj = 0.0;
    double rhs_rest = 0.0;
    for (std::size_t b = 0; b < bs.block_count(); ++b) {
        if (frames[b].cols() == 0) continue;
        const Subspace Eb = full_block_subspace(frames[b]);
        const Eigen::VectorXd xb = x.segment(bs.offset(b), bs.block(b).dims);
        const Eigen::VectorXd yb = Eb.coords(xb);
        rhs_proj += inf_project(bs.block(b).poly, Eb, yb, solver).value;
        rhs_rest += bs.block(b).poly(xb);
    }

    const bool proj_ok = std::abs(lhs_proj - rhs_proj) <= tol * (1.0 + std::abs(lhs_proj));
    const bool rest_ok = std::abs(lhs_rest - rhs_rest) <= tol * (1.0 + std::abs(lhs_rest));
    return proj_ok && rest_ok;
}

double two_block_norm_volume(double a, double b, int m, int n, int j, int d, double alpha) {
    if (!(a > 0.0) || !(b > 0.0)) throw precondition_error("block weights must be positive");
    if (m < 1 || m > n - 1) throw precondition_error("need 1 <= m <= n-1");
    if (j < 1 || j > n - 1) throw precondition_error("need 1 <= j <= n-1");
    if (d < 2 || d % 2 != 0) throw precondition_error("degree must be even >= 2");
    if (!(alpha > 0.0)) throw precondition_error("alpha must be positive");

    const int istar = std::max(0, j - (n - m));
    const VolumeConstants c = constants(j, n, d);
    const double dd = double(d);
    return std::pow(alpha, double(j) / dd) * c.beta_jn / c.gamma_factor *
           unit_ball_volume(istar) * unit_ball_volume(j - istar) *
           std::pow(a, -double(istar) / dd) * std::pow(b, -double(j - istar) / dd) *
           std::tgamma(1.0 + double(istar) / dd) * std::tgamma(1.0 + double(j - istar) / dd);
}

BlockStructure two_block_model(double a, double b, int m, int n, int d) {
    if (m < 1 || m > n - 1) throw precondition_error("need 1 <= m <= n-1");
    BlockStructure::Block first{m, ball_polynomial(m, d).scaled(a)};
    BlockStructure::Block second{n - m, ball_polynomial(n - m, d).scaled(b)};
    return BlockStructure({first, second});
}

} // namespace sublevel
