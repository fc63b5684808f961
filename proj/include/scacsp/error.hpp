#pragma once

#include <stdexcept>
#include <string>

namespace scacsp {

/// Broad failure category; the CLI maps each to a stable exit code.
enum class ErrorKind { usage = 2, data = 3, numerical = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bad arguments, inconsistent dimensions, invalid configuration.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Malformed or inconsistent input data (files, manifests, epochs).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// A matrix that must be full rank is not.
class RankError : public NumericalError {
public:
    RankError(const std::string& what, int deficient)
        : NumericalError(what), deficient_(deficient) {}
    int deficient_dimensions() const noexcept { return deficient_; }

private:
    int deficient_;
};

/// A matrix that must be positive definite is not.
class DefinitenessError : public NumericalError {
public:
    DefinitenessError(const std::string& what, double eigenvalue)
        : NumericalError(what), eigenvalue_(eigenvalue) {}
    double offending_eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// The two class means coincide so no discriminative direction exists.
class DegeneracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Every requested scatter subspace is semi-empty.
class SemiEmptyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace scacsp
