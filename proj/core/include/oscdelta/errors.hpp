// errors.hpp: exception hierarchy shared by the solvers and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace oscdelta {

// Coarse category; the CLI maps it onto its exit code.
enum class ErrorKind {
    InvalidInput,   // parameter or configuration violates a precondition
    Solver,         // numerical failure (singular pivot, missing root, ...)
    Convergence,    // iteration cap reached without meeting tolerance
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what)
        : Error(ErrorKind::InvalidInput, what) {}
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what)
        : Error(ErrorKind::Solver, what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what)
        : Error(ErrorKind::Convergence, what) {}
};

// Re-raise `e` with a context prefix, preserving its category.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
    throw Error(e.kind(), context + ": " + e.what());
}

} // namespace oscdelta
