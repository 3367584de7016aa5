#pragma once

#include <stdexcept>
#include <string>

namespace tsvf {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or index mismatch between values that must share a space.
struct DimensionError : Error {
    using Error::Error;
};

// Pre- and post-selected states are (numerically) orthogonal.
struct OrthogonalError : Error {
    using Error::Error;
};

// A numeric contract failed: non-Hermitian input where Hermitian is required,
// all-zero ABL weights, sampling grid losing probability mass, and the like.
struct NumericError : Error {
    using Error::Error;
};

// Scenario text did not conform to the schema; message carries line/field.
struct ParseError : Error {
    using Error::Error;
};

} // namespace tsvf
