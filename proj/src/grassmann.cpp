#include "sublevel/grassmann.hpp"

namespace sublevel {

namespace {

void check_orthonormal(const Eigen::MatrixXd& m, const char* what) {
    const Eigen::MatrixXd g = m.transpose() * m;
    const double err = (g - Eigen::MatrixXd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw precondition_error(std::string(what) + " columns are not orthonormal");
}

} // namespace

Subspace::Subspace(Eigen::MatrixXd basis, Eigen::MatrixXd complement_basis)
    : basis_(std::move(basis)), complement_(std::move(complement_basis)) {
    const int n = int(basis_.rows());
    const int j = int(basis_.cols());
    if (j < 1 || j > n) throw precondition_error("subspace dimension out of range");
    if (complement_.rows() != n || complement_.cols() != n - j)
        throw precondition_error("complement frame has wrong shape");
    check_orthonormal(basis_, "basis");
    if (complement_.cols() > 0) {
        check_orthonormal(complement_, "complement");
        const double cross = (basis_.transpose() * complement_).cwiseAbs().maxCoeff();
        if (cross > 1e-10) throw precondition_error("basis and complement are not orthogonal");
    }
}

Subspace Subspace::full(int n) {
    return Subspace(Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd(n, 0));
}

Eigen::VectorXd Subspace::embed(const Eigen::VectorXd& y) const {
    if (y.size() != dimension()) throw dimension_mismatch("embed: coordinate length mismatch");
    return basis_ * y;
}

Eigen::VectorXd Subspace::coords(const Eigen::VectorXd& x) const {
    if (x.size() != ambient_dimension()) throw dimension_mismatch("coords: point length mismatch");
    return basis_.transpose() * x;
}

Eigen::VectorXd Subspace::complement_coords(const Eigen::VectorXd& x) const {
    if (x.size() != ambient_dimension())
        throw dimension_mismatch("complement_coords: point length mismatch");
    return complement_.transpose() * x;
}

Subspace sample_subspace(int j, int n, Rng& rng) {
    if (j < 1 || j > n - 1) throw precondition_error("sample: need 1 <= j <= n-1");

    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd g(n, j);
        for (int c = 0; c < j; ++c)
            for (int r = 0; r < n; ++r) g(r, c) = rng.normal();

        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(j, j);

        bool degenerate = false;
        for (int c = 0; c < j; ++c) {
            if (std::abs(r(c, c)) < 1e-12) {
                degenerate = true;
                break;
            }
            // Sign convention: positive R diagonal makes the draw exactly
            // Haar rather than Haar-up-to-column-signs.
            if (r(c, c) < 0.0) q.col(c) = -q.col(c);
        }
        if (degenerate) continue;

        return Subspace(q.leftCols(j), q.rightCols(n - j));
    }
    throw numerical_error("Grassmann sampling: 8 consecutive rank-deficient Gaussian draws");
}

Subspace GrassmannSampler::sample(int j, int n) {
    Rng rng(substream(seed_, counter_++));
    return sample_subspace(j, n, rng);
}

Subspace sample_subspace_at(std::uint64_t seed, std::uint64_t index, int j, int n) {
    Rng rng(substream(seed, index));
    return sample_subspace(j, n, rng);
}

} // namespace sublevel
