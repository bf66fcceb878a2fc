#pragma once

#include <stdexcept>
#include <string>

namespace svi {

/// Requested stage count outside the supported range for the family.
struct unsupported_stage_count : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A nodal weight vanished; the conjugate coefficients cannot be formed.
struct zero_weight : std::domain_error {
    using std::domain_error::domain_error;
};

/// The source/target coefficient determinant vanished.
struct degenerate_endpoints : std::domain_error {
    using std::domain_error::domain_error;
};

/// Galerkin stepping needs at least two stages.
struct stage_count_too_small : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Pivot underflow in the dense LU factorization; usually signals an
/// irregular Lagrangian or a step size far too large.
struct singular_jacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace svi
