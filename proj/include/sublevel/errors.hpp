#pragma once

#include <stdexcept>
#include <string>

namespace sublevel {

// Contract violations: bad inputs, unmet preconditions. The CLI maps these to
// exit code 2.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct dimension_mismatch : precondition_error {
    using precondition_error::precondition_error;
};

struct parse_error : precondition_error {
    using precondition_error::precondition_error;
};

// The polynomial is not positive away from the origin (or a positivity
// certificate was violated where one was assumed).
struct not_positive : precondition_error {
    using precondition_error::precondition_error;
};

struct not_primitive : precondition_error {
    using precondition_error::precondition_error;
};

struct infeasible : precondition_error {
    using precondition_error::precondition_error;
};

// Numerical failures: a computation could not be finished to tolerance or
// within budget. The CLI maps these to exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct max_iters_error : numerical_error {
    using numerical_error::numerical_error;
};

struct non_finite_error : numerical_error {
    using numerical_error::numerical_error;
};

struct budget_exceeded : numerical_error {
    using numerical_error::numerical_error;
};

struct no_progress : numerical_error {
    using numerical_error::numerical_error;
};

struct not_certified : numerical_error {
    using numerical_error::numerical_error;
};

struct divisibility_error : numerical_error {
    using numerical_error::numerical_error;
};

} // namespace sublevel
