#ifndef SFHD_SPECFUN_HPP
#define SFHD_SPECFUN_HPP

#include <complex>
#include <span>

namespace sfhd {

/// Arguments of the three-parameter Mittag-Leffler (Prabhakar) function
/// E^zeta_{a,b}(z) = sum_k (zeta)_k z^k / (k! Gamma(a k + b)).
struct PrabhakarArgs {
    double a;     ///< > 0
    double b;     ///< > 0
    double zeta;  ///< > 0
    double z;

    /// Throws std::invalid_argument unless a, b, zeta are all > 0.
    void validate() const;
};

/// ln Gamma(x) for x > 0. Relative error <= 1e-13.
/// Throws std::domain_error for x <= 0.
double log_gamma(double x);

/// Prabhakar function for real argument. Summed until the term drops below
/// 1e-16 of the partial sum (monotone-decay phase only) or the 10000-term
/// cap; raises NonConvergence if the cap is hit while terms still grow.
double prabhakar_ml(const PrabhakarArgs& args);

/// One-parameter Mittag-Leffler E_alpha(z) = E^1_{alpha,1}(z) for complex z.
/// alpha must lie in (0, 1].
std::complex<double> mittag_leffler(double alpha, std::complex<double> z);

/// Spherical Bessel function j_l(x), l >= 0, x >= 0. j_0 and j_1 use the
/// closed forms; higher orders use the rescaled downward (Miller) recurrence.
double spherical_bessel(int l, double x);

/// j_0(x) .. j_{out.size()-1}(x) from a single downward sweep.
void spherical_bessel_array(double x, std::span<double> out);

/// Legendre polynomial P_l(x), |x| <= 1, by the three-term recurrence.
double legendre_p(int l, double x);

/// Fully normalized associated Legendre values for fixed m:
/// out[j] = N_{l,m} P_l^m(cos_theta) for l = m .. m + out.size() - 1,
/// with N_{l,m} = sqrt((2l+1)(l-m)!/(4 pi (l+m)!)) and the Condon-Shortley
/// phase (-1)^m included. Stable for l up to a few hundred.
void normalized_assoc_legendre(int m, double cos_theta, double sin_theta,
                               std::span<double> out);

/// Complex spherical harmonic Y_lm(theta, phi) with the normalization
/// Y_lm = (-1)^m sqrt((2l+1)(l-m)!/(4 pi (l+m)!)) e^{i m phi} P_l^m(cos theta).
/// Satisfies Y_{l,-m} = (-1)^m conj(Y_{l,m}).
/// Throws std::invalid_argument if |m| > l.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

namespace detail {
/// Internal extended-precision variants used by the kernel series.
long double lgamma_ld(long double x);
long double tgamma_ld(long double x);

/// Prabhakar series in complex extended precision; tracks the largest term
/// magnitude seen (for overflow guards). cap: term count limit.
std::complex<long double> prabhakar_series_cld(long double a, long double b,
                                               long double zeta,
                                               std::complex<long double> z,
                                               int cap, long double* max_abs_term);
} // namespace detail

} // namespace sfhd

#endif
