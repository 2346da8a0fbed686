#pragma once

#include <stdexcept>
#include <string>

namespace fracns {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not reach its accuracy target.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

class EmbeddingError : public Error {
public:
    using Error::Error;
};

class LengthError : public Error {
public:
    using Error::Error;
};

class RegressionError : public Error {
public:
    using Error::Error;
};

class InsufficientReplicates : public Error {
public:
    InsufficientReplicates(const std::string& what, long long minimum)
        : Error(what), minimum_(minimum) {}
    long long minimum() const { return minimum_; }

private:
    long long minimum_;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class ModelMismatch : public Error {
public:
    using Error::Error;
};

/// A parameter triple violates a well-posedness inequality.
class GateError : public Error {
public:
    using Error::Error;
};

/// Picard residuals stopped decreasing.
class NoContraction : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fracns
