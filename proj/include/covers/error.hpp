#pragma once

#include <stdexcept>
#include <string>

namespace covers {

// Error taxonomy mirrors the CLI exit codes:
// parse (2), validation (3), unsound plan (4), verification/inconsistency (5).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct UnknownAttributeError : ValidationError {
    using ValidationError::ValidationError;
};

struct SchemaMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct SchemaNotCoveredError : ValidationError {
    using ValidationError::ValidationError;
};

struct UncoverableNodeError : ValidationError {
    using ValidationError::ValidationError;
};

struct TooLargeError : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidDecompositionError : ValidationError {
    using ValidationError::ValidationError;
};

struct MalformedOrderError : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyIntersectionError : ValidationError {
    using ValidationError::ValidationError;
};

struct BadMappingError : ValidationError {
    using ValidationError::ValidationError;
};

struct MalformedSignatureError : ValidationError {
    using ValidationError::ValidationError;
};

struct UnsoundPlanError : Error {
    using Error::Error;
};

// Raised when a cover-join runs on uncalibrated inputs (debug check) or
// when a claimed cover fails verification.
struct InconsistentInputsError : Error {
    using Error::Error;
};

struct NotACoverError : Error {
    using Error::Error;
};

} // namespace covers
