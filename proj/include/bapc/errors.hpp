#pragma once

#include <stdexcept>
#include <string>

namespace bapc {

/// Normal-equation system is singular; a base-model fit is refused rather
/// than silently regularized.
struct RankDeficientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN or infinity where a finite value is required.
struct NonFiniteError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Incompatible vector/matrix dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A neighborhood or evaluation set came up empty.
struct EmptyNeighborhoodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated precondition on user-supplied values (domains, grids, configs).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A file could not be created or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bapc
