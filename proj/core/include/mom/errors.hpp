#ifndef MOM_ERRORS_HPP
#define MOM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mom {

/// Base class of every domain error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EpsilonOutOfRange : public Error {
public:
    using Error::Error;
};

/// A custom alpha mapping failed the admissibility check 2e < alpha(e) < 1.
class InvalidMapping : public Error {
public:
    using Error::Error;
};

/// Outlier fraction at or above 1/2: no block calibration exists.
class BreakdownExceeded : public Error {
public:
    using Error::Error;
};

/// Two-sample joint fraction e_x + e_y - e_x*e_y at or above 1/2.
class JointBreakdownExceeded : public Error {
public:
    using Error::Error;
};

/// Diagonal-pairing fraction e_x + e_y at or above 1/2.
class SumBreakdownExceeded : public Error {
public:
    using Error::Error;
};

/// Requested confidence level outside the admissible interval.
/// Bounds are carried in natural-log space (log of a probability).
class DeltaOutOfRange : public Error {
public:
    DeltaOutOfRange(const std::string& what, double log_lower, double log_upper)
        : Error(what), log_lower_(log_lower), log_upper_(log_upper) {}
    double log_lower() const { return log_lower_; }
    double log_upper() const { return log_upper_; }

private:
    double log_lower_;
    double log_upper_;
};

class DegenerateRange : public Error {
public:
    using Error::Error;
};

class InvalidBlockCount : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

class PartitionMismatch : public Error {
public:
    using Error::Error;
};

class SampleTooSmall : public Error {
public:
    using Error::Error;
};

class BlockTooSmall : public Error {
public:
    using Error::Error;
};

class DatasetTooSmall : public Error {
public:
    using Error::Error;
};

class UnsupportedKernelDegree : public Error {
public:
    using Error::Error;
};

/// A kernel or loss evaluation produced NaN/inf; propagating it through a
/// median would silently corrupt the ordering, so we fail instead.
class NonFiniteKernel : public Error {
public:
    using Error::Error;
};

class NonFiniteGradient : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

/// The expectation bound needs e > 0; callers must use the clean-sample
/// variant when no outliers are assumed.
class EpsilonZero : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mom

#endif
