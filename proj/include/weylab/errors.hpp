#pragma once

#include <stdexcept>
#include <string>

namespace weylab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point outside the chart domain, or an expression singular at the point
// (division by zero, log/sqrt of a non-positive argument).
struct DomainError : Error {
    using Error::Error;
};

// Jet order above the supported maximum.
struct OrderError : Error {
    using Error::Error;
};

// Tensor slot arity / chart dimension mismatch.
struct ShapeError : Error {
    using Error::Error;
};

// Raise/lower against a bilinear form that is singular at a point.
struct SingularFormError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct DegenerateMetricError : Error {
    using Error::Error;
};

struct ZeroDensityError : Error {
    using Error::Error;
};

struct DegenerateSectionError : Error {
    using Error::Error;
};

struct NonLagrangianError : Error {
    using Error::Error;
};

struct NotFlatError : Error {
    using Error::Error;
};

struct TransversalityError : Error {
    using Error::Error;
};

}  // namespace weylab
