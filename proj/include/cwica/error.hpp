#pragma once

#include <stdexcept>
#include <string>

namespace cwica {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
struct dimension_error : error {
    using error::error;
};

/// Argument outside the mathematical domain of an operation.
struct domain_error : error {
    using error::error;
};

/// Invalid or inconsistent configuration (bad splits, empty grids, ...).
struct config_error : error {
    using error::error;
};

/// File system or parse failure; message names the offending path.
struct io_error : error {
    using error::error;
};

/// Numerically rank-deficient input where full rank is required.
struct degeneracy_error : error {
    using error::error;
};

} // namespace cwica
