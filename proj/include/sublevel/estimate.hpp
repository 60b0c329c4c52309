#pragma once

#include <cstdint>

#include "sublevel/operators.hpp"

namespace sublevel {

// Monte Carlo scalar. std_error is the sample standard deviation of the
// per-subspace contributions divided by sqrt(outer_samples); inner sphere
// noise is folded into each contribution.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t outer_samples = 0;
    std::uint64_t inner_samples = 0;
};

struct EstimatorConfig {
    std::uint64_t seed = 0;
    std::uint64_t outer_samples = 2048;
    std::uint64_t inner_samples = 4096;
    SolverConfig solver;
    double alpha = 1.0;
    int workers = 1;
};

} // namespace sublevel
