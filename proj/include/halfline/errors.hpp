#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A user-supplied field returned a non-finite value.
struct EvaluationError : Error {
    using Error::Error;
};

/// An operation was called with inputs violating its preconditions.
struct PreconditionError : Error {
    using Error::Error;
};

/// A linear solve or other numeric step broke down.
struct NumericalError : Error {
    using Error::Error;
};

/// Grid/array shapes do not match.
struct ShapeError : Error {
    using Error::Error;
};

/// Stored data violates a structural invariant (e.g. policy value outside A).
struct DataError : Error {
    using Error::Error;
};

/// Too few usable samples/records for the requested statistic.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// The fixed-point iteration is growing instead of contracting.
struct DivergenceError : Error {
    DivergenceError(const std::string& msg, double q) : Error(msg), last_q_estimate(q) {}
    double last_q_estimate;
};

/// Config file is malformed; line is 1-based, 0 when not tied to a line.
struct ConfigError : Error {
    ConfigError(const std::string& msg, int line_no = 0) : Error(msg), line(line_no) {}
    int line;
};

}  // namespace halfline
