#ifndef BILLIARD_ERRORS_HPP
#define BILLIARD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace billiard {

/// Domain description is malformed (unknown type, forbidden frequency-1
/// coefficient, nonpositive radius, ...).
struct BadSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The radius of curvature h + h'' fails to stay positive (with margin).
struct ConvexityViolation : std::domain_error {
    using std::domain_error::domain_error;
};

/// Curvature jet requested beyond the supported order.
struct OrderTooHigh : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Boundary integrand returned NaN/Inf at a quadrature node.
struct NonFiniteIntegrand : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Chord endpoints coincide; the generating function is singular there.
struct CoincidentPoints : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Incidence angle outside the guard band around the tangential directions.
struct TangencyGuard : std::domain_error {
    using std::domain_error::domain_error;
};

/// An iterative solver failed to reach its residual target.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monotone cyclic order of orbit vertices could not be maintained.
struct OrderCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too few samples for the requested finite-difference stencil.
struct InsufficientSamples : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Caustic lengths failed to increase toward the perimeter as q grows.
struct NonMonotone : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares design matrix condition number exceeded the cutoff.
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace billiard

#endif
