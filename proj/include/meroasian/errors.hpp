#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meroasian {

enum class ErrorKind {
    Pole,
    Domain,
    Bracket,
    Convergence,
    Continuation,
    Singular,
    Degenerate,
    Contour,
    Model,
    Sampler,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Pole: return "PoleError";
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::Bracket: return "BracketError";
        case ErrorKind::Convergence: return "ConvergenceError";
        case ErrorKind::Continuation: return "ContinuationError";
        case ErrorKind::Singular: return "SingularError";
        case ErrorKind::Degenerate: return "DegenerateError";
        case ErrorKind::Contour: return "ContourError";
        case ErrorKind::Model: return "ModelError";
        case ErrorKind::Sampler: return "SamplerError";
    }
    return "NumericalError";
}

// Base for every failure raised by the numerical layers. The CLI maps these
// to exit code 1 and prints kind() in the message.
class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public NumericalError {
public:
    explicit TypedError(const std::string& what) : NumericalError(K, what) {}
};

using PoleError = TypedError<ErrorKind::Pole>;
using DomainError = TypedError<ErrorKind::Domain>;
using BracketError = TypedError<ErrorKind::Bracket>;
using ConvergenceError = TypedError<ErrorKind::Convergence>;
using ContinuationError = TypedError<ErrorKind::Continuation>;
using SingularError = TypedError<ErrorKind::Singular>;
using DegenerateError = TypedError<ErrorKind::Degenerate>;
using ContourError = TypedError<ErrorKind::Contour>;
using ModelError = TypedError<ErrorKind::Model>;
using SamplerError = TypedError<ErrorKind::Sampler>;

}  // namespace meroasian
