#pragma once

#include <stdexcept>
#include <string>

namespace repsim {

/// Base of every error raised by the library. Callers that only care about
/// "something failed" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row counts (or other extents) of two operands disagree.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the input (zero denominator, too few rows).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Construction-time rejection: non-finite entries, zero extents.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed RSAM payload or CSV file.
class FormatError : public Error {
public:
    using Error::Error;
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class EmptyResult : public Error {
public:
    using Error::Error;
};

/// Invalid training recipe or configuration bounds.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace repsim
