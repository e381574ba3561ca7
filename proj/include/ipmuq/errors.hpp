/// @file errors.hpp
/// @brief Exception hierarchy shared by all ipmuq modules.
#pragma once

#include <stdexcept>
#include <string>

namespace ipmuq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the support of a function (e.g. xi outside [-1,1]^p).
struct DomainError : Error {
    using Error::Error;
};

/// A dual vector outside the domain of the entropy inverse gradient u_s.
struct InadmissibleDual : Error {
    using Error::Error;
};

/// A physical state with non-positive density or pressure reached a flux.
struct AdmissibilityError : Error {
    using Error::Error;
    int cell = -1;
    int point = -1;
    AdmissibilityError(const std::string& what, int cell_index, int point_index)
        : Error(what), cell(cell_index), point(point_index) {}
};

/// Symmetric positive-definite factorization of a dual Hessian failed.
/// `rule` names the quadrature rule the Hessian was assembled with.
struct IllConditionedHessian : Error {
    std::string rule;
    IllConditionedHessian(const std::string& what, std::string rule_name)
        : Error(what + " [rule: " + rule_name + "]"), rule(std::move(rule_name)) {}
};

struct LineSearchFailure : Error {
    using Error::Error;
};

/// Iteration cap reached (dual Newton loop or pseudo-time loop).
struct NonConvergence : Error {
    using Error::Error;
    int iterations = 0;
    double last_value = 0.0;
    NonConvergence(const std::string& what, int iters, double value)
        : Error(what), iterations(iters), last_value(value) {}
};

struct PreconditionError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
    int line = 0;
    ParseError(const std::string& what, int line_number)
        : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
};

struct ConfigError : Error {
    using Error::Error;
};

struct IncompatibleSnapshot : Error {
    using Error::Error;
};

}  // namespace ipmuq
