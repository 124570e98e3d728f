#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace handdmp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violation on a caller-supplied value.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range content in an input file. `line()` is 1-based, 0 when
/// the problem is not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Wrist, thumb and index landmarks coincide.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// Original-variant DMP with goal == start on some axis.
class DegenerateSpan : public Error {
public:
    DegenerateSpan(std::size_t axis, double span)
        : Error("degenerate span on axis " + std::to_string(axis) + ": |g - x0| = " +
                std::to_string(span) + " (use the modified variant)"),
          axis_(axis) {}
    std::size_t axis() const { return axis_; }

private:
    std::size_t axis_;
};

/// A basis function has no support over the fitted phase samples.
class UnsupportedBasis : public Error {
public:
    explicit UnsupportedBasis(std::size_t index)
        : Error("basis function " + std::to_string(index) + " has no phase support"),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Numerical integration produced a non-finite state.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(std::size_t step, const std::string& where)
        : Error(where + " diverged at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class SingularJacobian : public Error {
public:
    explicit SingularJacobian(double condition)
        : Error("jacobian is singular (condition number " + std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

}  // namespace handdmp
