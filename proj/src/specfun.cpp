#include "sfhd/specfun.hpp"
#include "sfhd/exceptions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfhd {

namespace {
constexpr int kSeriesCap = 10000;
} // namespace

void PrabhakarArgs::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(zeta > 0.0))
        throw std::invalid_argument("PrabhakarArgs: a, b, zeta must all be > 0");
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: x must be > 0, got " + std::to_string(x));
    return boost::math::lgamma(x);
}

namespace detail {

long double lgamma_ld(long double x) {
    return boost::math::lgamma(x);
}

long double tgamma_ld(long double x) {
    return std::tgamma(x);
}

// Neumaier-compensated accumulator.
template <typename T>
struct Kahan {
    T sum{};
    T comp{};
    void add(T term) {
        T t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    T value() const { return sum + comp; }
};

template <typename T>
struct KahanC {
    std::complex<T> sum{};
    std::complex<T> comp{};
    void add(std::complex<T> term) {
        std::complex<T> t = sum + term;
        comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    std::complex<T> value() const { return sum + comp; }
};

std::complex<long double> prabhakar_series_cld(long double a, long double b,
                                               long double zeta,
                                               std::complex<long double> z,
                                               int cap, long double* max_abs_term) {
    KahanC<long double> acc;
    std::complex<long double> coef{1.0L, 0.0L}; // (zeta)_k z^k / k!
    long double prev = std::numeric_limits<long double>::infinity();
    long double maxabs = 0.0L;
    bool growing = true;
    int k = 0;
    for (; k < cap; ++k) {
        std::complex<long double> term = coef / tgamma_ld(a * k + b);
        long double mag = std::abs(term);
        if (!std::isfinite(mag))
            throw NonConvergence("prabhakar series overflowed extended precision");
        if (mag > maxabs) maxabs = mag;
        acc.add(term);
        growing = mag > prev;
        if (mag <= prev && mag < 1e-18L * std::abs(acc.sum) && k > 4) break;
        prev = mag;
        coef *= (zeta + static_cast<long double>(k)) * z / static_cast<long double>(k + 1);
    }
    if (max_abs_term) *max_abs_term = maxabs;
    if (k >= cap && growing)
        throw NonConvergence("prabhakar series hit the term cap while terms still grow");
    return acc.value();
}

} // namespace detail

double prabhakar_ml(const PrabhakarArgs& args) {
    args.validate();
    long double maxabs = 0.0L;
    auto v = detail::prabhakar_series_cld(args.a, args.b, args.zeta,
                                          {static_cast<long double>(args.z), 0.0L},
                                          kSeriesCap, &maxabs);
    return static_cast<double>(v.real());
}

std::complex<double> mittag_leffler(double alpha, std::complex<double> z) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("mittag_leffler: alpha must lie in (0, 1]");
    auto v = detail::prabhakar_series_cld(alpha, 1.0L, 1.0L,
                                          {static_cast<long double>(z.real()),
                                           static_cast<long double>(z.imag())},
                                          kSeriesCap, nullptr);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

double spherical_bessel(int l, double x) {
    if (l < 0) throw std::invalid_argument("spherical_bessel: l must be >= 0");
    if (!(x >= 0.0)) throw std::invalid_argument("spherical_bessel: x must be >= 0");
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (l == 0) return std::sin(x) / x;
    if (l == 1) return std::sin(x) / (x * x) - std::cos(x) / x;

    // Downward Miller recurrence from l_start = l + max(20, ceil(1.5 x)),
    // normalized against j_0. Growth on the way down can overflow for large
    // l and small x, so both running values are rescaled by powers of two
    // and the target's scale deficit is tracked as an exponent.
    const int l_start = l + std::max(20, static_cast<int>(std::ceil(1.5 * x)));
    double jp = 0.0;      // j_{n+1} (unnormalized)
    double jc = 1e-300;   // j_n
    double target = 0.0;
    int target_exp = 0;   // power-of-two rescales applied after passing l
    bool have_target = false;
    for (int n = l_start; n >= 1; --n) {
        double jm = (2.0 * n + 1.0) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (n - 1 == l) {
            target = jc;
            have_target = true;
        }
        if (std::abs(jc) > 1e250) {
            jc = std::ldexp(jc, -1000);
            jp = std::ldexp(jp, -1000);
            if (have_target) target_exp += 1000;
        }
    }
    // jc now holds unnormalized j_0.
    const double j0 = std::sin(x) / x;
    const double ratio = target / jc;
    return std::ldexp(ratio * j0, -target_exp);
}

void spherical_bessel_array(double x, std::span<double> out) {
    if (out.empty()) return;
    if (!(x >= 0.0)) throw std::invalid_argument("spherical_bessel_array: x must be >= 0");
    const int l_max = static_cast<int>(out.size()) - 1;
    if (x == 0.0) {
        out[0] = 1.0;
        for (int l = 1; l <= l_max; ++l) out[l] = 0.0;
        return;
    }
    out[0] = std::sin(x) / x;
    if (l_max == 0) return;
    out[1] = std::sin(x) / (x * x) - std::cos(x) / x;
    if (l_max == 1) return;

    const int l_start = l_max + std::max(20, static_cast<int>(std::ceil(1.5 * x)));
    std::vector<double> raw(static_cast<std::size_t>(l_max) + 1);
    std::vector<int> scale_at(static_cast<std::size_t>(l_max) + 1, 0);
    double jp = 0.0, jc = 1e-300;
    int scales = 0;
    for (int n = l_start; n >= 1; --n) {
        const double jm = (2.0 * n + 1.0) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (n - 1 <= l_max) {
            raw[n - 1] = jc;
            scale_at[n - 1] = scales;
        }
        if (std::abs(jc) > 1e250) {
            jc = std::ldexp(jc, -1000);
            jp = std::ldexp(jp, -1000);
            ++scales;
        }
    }
    const double norm = out[0] / raw[0];
    for (int l = 2; l <= l_max; ++l)
        out[l] = std::ldexp(raw[l] * norm, -1000 * (scale_at[0] - scale_at[l]));
}

double legendre_p(int l, double x) {
    if (l < 0) throw std::invalid_argument("legendre_p: l must be >= 0");
    if (std::abs(x) > 1.0) throw std::invalid_argument("legendre_p: |x| must be <= 1");
    if (l == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int n = 1; n < l; ++n) {
        double pn1 = ((2.0 * n + 1.0) * x * p - n * pm1) / (n + 1.0);
        pm1 = p;
        p = pn1;
    }
    return p;
}

void normalized_assoc_legendre(int m, double cos_theta, double sin_theta,
                               std::span<double> out) {
    if (m < 0) throw std::invalid_argument("normalized_assoc_legendre: m must be >= 0");
    if (out.empty()) return;
    constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);
    // Seed: N_{m,m} P_m^m(cos) with Condon-Shortley phase.
    double pmm = std::sqrt(inv4pi);
    for (int k = 1; k <= m; ++k)
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_theta;
    out[0] = pmm;
    if (out.size() == 1) return;
    double pm1 = pmm;
    double p = std::sqrt(2.0 * m + 3.0) * cos_theta * pmm;
    out[1] = p;
    for (std::size_t j = 2; j < out.size(); ++j) {
        const int l = m + static_cast<int>(j);
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                   (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        const double pl = a * (cos_theta * p - b * pm1);
        pm1 = p;
        p = pl;
        out[j] = pl;
    }
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0) throw std::invalid_argument("spherical_harmonic: l must be >= 0");
    const int ma = std::abs(m);
    if (ma > l)
        throw std::invalid_argument("spherical_harmonic: |m| must be <= l");
    double plm;
    {
        // Only the last entry of the (m..l) run is needed here; batch callers
        // use normalized_assoc_legendre directly.
        double buf[1];
        std::span<double> s(buf, 1);
        if (l == ma) {
            normalized_assoc_legendre(ma, std::cos(theta), std::sin(theta), s);
            plm = buf[0];
        } else {
            std::vector<double> run(static_cast<std::size_t>(l - ma) + 1);
            normalized_assoc_legendre(ma, std::cos(theta), std::sin(theta), run);
            plm = run.back();
        }
    }
    const std::complex<double> e{std::cos(ma * phi), std::sin(ma * phi)};
    std::complex<double> y = plm * e;
    if (m < 0) {
        y = std::conj(y);
        if (ma % 2 != 0) y = -y;
    }
    return y;
}

} // namespace sfhd
