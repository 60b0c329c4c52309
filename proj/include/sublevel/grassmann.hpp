#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sublevel/errors.hpp"
#include "sublevel/rng.hpp"

namespace sublevel {

// Orthonormal frame for a j-dimensional subspace E of R^n together with a
// frame for its orthogonal complement. Immutable and cheap to share.
class Subspace {
  public:
    Subspace(Eigen::MatrixXd basis, Eigen::MatrixXd complement_basis);

    // Full space E = R^n (empty complement); used by integrators that treat
    // j = n through the same code path.
    static Subspace full(int n);

    int ambient_dimension() const { return int(basis_.rows()); }
    int dimension() const { return int(basis_.cols()); }
    int complement_dimension() const { return int(complement_.cols()); }

    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::MatrixXd& complement_basis() const { return complement_; }

    // basis * y, E-coordinates to ambient.
    Eigen::VectorXd embed(const Eigen::VectorXd& y) const;
    // basis^T * x, ambient to E-coordinates.
    Eigen::VectorXd coords(const Eigen::VectorXd& x) const;
    Eigen::VectorXd complement_coords(const Eigen::VectorXd& x) const;

  private:
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd complement_;
};

// Draws Haar-distributed subspaces: Gaussian n x j matrix, thin QR with the
// positive-diagonal sign convention, complement from the remaining columns of
// the full factor. A fixed seed yields a fixed stream.
class GrassmannSampler {
  public:
    explicit GrassmannSampler(std::uint64_t seed) : seed_(seed) {}

    Subspace sample(int j, int n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// One Haar draw from the substream of (seed, index); estimators use this so
// that draw i is the same no matter how work is split across workers.
Subspace sample_subspace_at(std::uint64_t seed, std::uint64_t index, int j, int n);

// Haar draw from an open-ended stream.
Subspace sample_subspace(int j, int n, Rng& rng);

} // namespace sublevel
