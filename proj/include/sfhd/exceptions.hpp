#ifndef SFHD_EXCEPTIONS_HPP
#define SFHD_EXCEPTIONS_HPP

#include <stdexcept>
#include <string>

namespace sfhd {

/// Base class for all numerical failures raised by this library.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A series term exceeded the configured log-magnitude threshold; the
/// series route is unreliable for these arguments and the caller should
/// switch to the Laplace-inversion oracle.
class TruncationOverflow : public NumericError {
public:
    explicit TruncationOverflow(const std::string& msg) : NumericError(msg) {}
};

/// mu is within the guard radius of c/(2D), where the 1/Omega factors of
/// the alpha==beta closed form amplify rounding.
class BranchPointSingularity : public NumericError {
public:
    explicit BranchPointSingularity(const std::string& msg) : NumericError(msg) {}
};

/// The contour quadrature's node-doubling consistency check failed.
class ContourFailure : public NumericError {
public:
    explicit ContourFailure(const std::string& msg) : NumericError(msg) {}
};

/// A series hit its term cap while terms were still growing.
class NonConvergence : public NumericError {
public:
    explicit NonConvergence(const std::string& msg) : NumericError(msg) {}
};

/// Successive quadrature refinements failed to agree.
class QuadratureFailure : public NumericError {
public:
    explicit QuadratureFailure(const std::string& msg) : NumericError(msg) {}
};

/// Harmonic coefficients violate the conjugate symmetry a_{l,-m} = (-1)^m conj(a_{l,m}).
class SymmetryViolation : public NumericError {
public:
    explicit SymmetryViolation(const std::string& msg) : NumericError(msg) {}
};

} // namespace sfhd

#endif
