#pragma once

#include <stdexcept>
#include <string>

namespace hsusy {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the supported domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Gamma function evaluated at (or within 1e-12 of) a non-positive integer.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Two operands live on different grids.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

// Iterative numerics (series, eigensolver) failed to reach tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Non-finite samples where finite ones are required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

// A superpotential chain that develops a pole on the grid. Carries the
// chain level i, the target energy index k and the offending coordinate.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, int level, int energy_index, double x)
        : Error(what), level_(level), energy_index_(energy_index), x_(x) {}

    int level() const { return level_; }
    int energy_index() const { return energy_index_; }
    double x() const { return x_; }

private:
    int level_;
    int energy_index_;
    double x_;
};

// A state failed to match the eigenvector or neighbour it should overlap.
class OverlapError : public Error {
public:
    using Error::Error;
};

}  // namespace hsusy
