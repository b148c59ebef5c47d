#pragma once

#include <stdexcept>
#include <string>

namespace pvfsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteInput : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class EmptyComplement : public Error { using Error::Error; };
class ZeroVarianceResponse : public Error { using Error::Error; };
class InvalidResponse : public Error { using Error::Error; };
class AllCensored : public Error { using Error::Error; };

/// Coordinate descent did not reach tolerance within the sweep budget.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int lambda_index)
        : Error(what + " (lambda index " + std::to_string(lambda_index) + ")"),
          lambda_index_(lambda_index) {}
    int lambda_index() const noexcept { return lambda_index_; }

private:
    int lambda_index_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace pvfsr
