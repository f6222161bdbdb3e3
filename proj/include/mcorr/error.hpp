#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcorr {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
    Usage = 1,
    Data = 2,
    Numeric = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class InsufficientSampleError : public Error {
public:
    explicit InsufficientSampleError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// A variable with zero (or negative) variance; `column()` is 0-based.
class DegenerateVariableError : public Error {
public:
    DegenerateVariableError(std::size_t column, const std::string& what)
        : Error(ErrorKind::Data, what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Malformed input table; the message names the row and column.
class DataFormatError : public Error {
public:
    explicit DataFormatError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NotPsdError : public Error {
public:
    explicit NotPsdError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class SingularBlockError : public Error {
public:
    explicit SingularBlockError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class InvalidParameterError : public Error {
public:
    explicit InvalidParameterError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class UnreachableTargetError : public Error {
public:
    UnreachableTargetError(double max_psi, const std::string& what)
        : Error(ErrorKind::Usage, what), max_psi_(max_psi) {}
    double max_psi() const noexcept { return max_psi_; }

private:
    double max_psi_;
};

class NumericDegeneracyError : public Error {
public:
    explicit NumericDegeneracyError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace mcorr
