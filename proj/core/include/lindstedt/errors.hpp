#pragma once

#include <stdexcept>
#include <string>

namespace lindstedt {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Equilibrium classification failures.
struct NotCritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Degenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Indefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The alpha-average of the force must vanish identically order by order;
// a violation beyond tolerance means the implementation is broken, never
// a property of the input.
struct ZeroAlphaAverageViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularHessian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A line that needs a true small-divisor propagator carries zero momentum.
struct ZeroDivisorLine : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeparationUnachievable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScaleOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularPropagator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NearSingularInversion : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lindstedt
