#ifndef RFSO_ERRORS_HPP
#define RFSO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rfso {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. a gamma pole).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Residue series cannot be used because two or more poles coincide.
/// The caller is expected to fall back to the contour evaluator.
class PoleCoincidence : public Error {
public:
    using Error::Error;
};

/// Residue series is not applicable for a reason other than pole coincidence
/// (no right-hand pole family, or |z| = 1 with p = q).
class SeriesNotApplicable : public Error {
public:
    using Error::Error;
};

/// The two pole families interleave; no straight vertical contour separates them.
class ContourNotSeparable : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive procedure missed its tolerance.
class NonConvergent : public Error {
public:
    NonConvergent(const std::string& what, double achieved_error = 0.0)
        : Error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Adaptive quadrature hit its interval cap before meeting tolerance.
class QuadratureNonConvergent : public NonConvergent {
public:
    using NonConvergent::NonConvergent;
};

/// Jakes correlation fell below zero (delay beyond the first J0 root).
class NegativeCorrelation : public Error {
public:
    using Error::Error;
};

/// No (k, l) pair with k + l <= 64 approximates beta2/beta1 within tolerance.
class NotRationalizable : public Error {
public:
    using Error::Error;
};

/// Ideal hardware (delta = 0) has no SNDR or capacity ceiling.
class InfiniteCeiling : public Error {
public:
    using Error::Error;
};

/// Parameters lie outside the family a closed form supports
/// (e.g. beta2*k not an integer).
class UnsupportedParameters : public Error {
public:
    using Error::Error;
};

/// Scenario or configuration failed validation. Messages name the field.
class ConfigInvalid : public Error {
public:
    using Error::Error;
};

} // namespace rfso

#endif // RFSO_ERRORS_HPP
