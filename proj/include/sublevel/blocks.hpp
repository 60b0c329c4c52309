#pragma once

#include <vector>

#include "sublevel/operators.hpp"
#include "sublevel/poly.hpp"

namespace sublevel {

// Orthogonal direct-sum description of a block-separable polynomial: ambient
// coordinates are assigned to blocks in order, block b covering dims(b)
// consecutive coordinates.
class BlockStructure {
  public:
    struct Block {
        int dims;
        HomogeneousPolynomial poly;
    };

    explicit BlockStructure(std::vector<Block> blocks);

    int ambient_dimension() const { return ambient_; }
    int degree() const { return degree_; }
    std::size_t block_count() const { return blocks_.size(); }
    const Block& block(std::size_t b) const { return blocks_[b]; }
    int offset(std::size_t b) const { return offsets_[b]; }

  private:
    std::vector<Block> blocks_;
    std::vector<int> offsets_;
    int ambient_ = 0;
    int degree_ = 0;
};

// The ambient polynomial f(x) = sum_b f_b(x_b).
HomogeneousPolynomial assemble(const BlockStructure& bs);

// Lifts per-block frames (orthonormal in block coordinates) into an ambient
// subspace E = direct sum of the parts; parts are (block index, m_b x r_b
// frame) pairs.
Subspace block_subspace(const BlockStructure& bs,
                        const std::vector<std::pair<std::size_t, Eigen::MatrixXd>>& parts);

// Verifies that both the infimal projection and the restriction of the
// assembled polynomial split across blocks at the point y in E-coordinates.
// E must decompose as the direct sum of its block intersections.
bool factor_check(const BlockStructure& bs, const Subspace& E, const Eigen::VectorXd& y,
                  double tol, const SolverConfig& solver = {});

// Closed form for V_j([a||x'||^d + b||x''||^d <= alpha]) with x' in R^m,
// x'' in R^(n-m), using the generic-intersection dimension
// i* = max(0, j - (n - m)).
double two_block_norm_volume(double a, double b, int m, int n, int j, int d, double alpha);

// The two-block norm model itself, for estimator comparisons.
BlockStructure two_block_model(double a, double b, int m, int n, int d);

} // namespace sublevel
