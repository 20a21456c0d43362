#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qqbf {

using cplx = std::complex<double>;

/// A point on the extended complex plane (one-point compactification).
/// The distinguished point at infinity has no sign or direction.
struct ExtComplex {
    cplx value{0.0, 0.0};
    bool is_inf = false;

    ExtComplex() = default;
    ExtComplex(cplx v) : value(v) {}                     // NOLINT: implicit by design
    ExtComplex(double re, double im) : value(re, im) {}

    static ExtComplex infinity() {
        ExtComplex z;
        z.is_inf = true;
        return z;
    }

    bool finite() const { return !is_inf; }
};

/// Base for every library error; `kind` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& detail)
        : std::runtime_error(detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

/// Malformed or inconsistent caller input: bad JSON, coprimality violation,
/// degree/qubit mismatch, out-of-range arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// Mathematically infeasible request: incompatible function pair, no room for
/// an auxiliary direction, a non-contraction where one is required, or an
/// unreachable degenerate solve branch.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A circuit failed its end-to-end verification against the target function.
class VerificationError : public Error {
public:
    using Error::Error;
};

} // namespace qqbf
