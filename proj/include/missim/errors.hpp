#pragma once

#include <stdexcept>
#include <string>

namespace missim {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data (ragged CSV rows, unparsable numeric literals, bad mask entries).
struct ParseError : Error {
    using Error::Error;
};

// Column names, kinds, or category sets do not line up.
struct SchemaError : Error {
    using Error::Error;
};

// A column gives no evidence for type inference.
struct InferenceError : Error {
    using Error::Error;
};

// Invalid configuration: bad rates, missing labels, unknown mechanism names.
struct ConfigError : Error {
    using Error::Error;
};

// Matrix/grid dimensions do not match.
struct ShapeError : Error {
    using Error::Error;
};

// Operation called in the wrong lifecycle state (e.g. get_mask before transform).
struct StateError : Error {
    using Error::Error;
};

// Data fails a statistical precondition (nothing to test, too few observations).
struct DataError : Error {
    using Error::Error;
};

// Imputation evaluation cannot proceed (cells still missing, no evaluated columns).
struct EvalError : Error {
    using Error::Error;
};

// Imputer cannot be fitted (all-missing column).
struct FitError : Error {
    using Error::Error;
};

// Argument outside a mathematical function's domain.
struct DomainError : Error {
    using Error::Error;
};

// An operation received an empty input it cannot handle.
struct EmptyInputError : Error {
    using Error::Error;
};

// A user-registered mechanism kernel violated the shared mechanism contract.
struct MechanismContractError : Error {
    using Error::Error;
};

// Underlying stream or file failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace missim
