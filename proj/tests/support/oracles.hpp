#ifndef SFHD_TESTS_ORACLES_HPP
#define SFHD_TESTS_ORACLES_HPP

#include "sfhd/spectra.hpp"

#include <complex>
#include <functional>

// Independent reference implementations used only by tests. These deliberately
// avoid the library's evaluation paths: power series instead of recurrences,
// explicit Rodrigues coefficients, plain trapezoid quadrature.
namespace oracles {

/// j_l(x) from the defining power series of J_{l+1/2}, in extended precision.
double jl_series(int l, double x);

/// P_l(x) from the explicit Rodrigues expansion
/// P_l(x) = 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k,l) x^{l-2k}.
double legendre_rodrigues(int l, double x);

/// Plain (unsigned) associated Legendre P_l^m by the seeded double recurrence,
/// normalized afterwards in log space. Returns N_lm P_l^m with the
/// Condon-Shortley phase, comparable to sfhd::normalized_assoc_legendre.
double normalized_plm_reference(int l, int m, double x);

/// Composite trapezoid on [a, b] with n panels.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

/// The discrete measure of the paper's first numerical example:
/// mu_i = 1 + 4(i-1), sigma_i = 100/i (variance sigma_i^2), i = 1..10.
sfhd::DiscreteMeasure section4_measure();

/// Smaller-amplitude two-band measure in the style of the second numerical
/// example (low band on [0,20], high band on [80,90], c=1, D=2).
sfhd::DiscreteMeasure two_band_measure();

} // namespace oracles

#endif
