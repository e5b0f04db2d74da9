#include "sfhd/kernel.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace sfhd {

namespace {

using CLD = std::complex<long double>;
constexpr long double kPi = std::numbers::pi_v<long double>;

void check_args(double mu, double t) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("kernel: mu must be finite and >= 0");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("kernel: t must be finite and >= 0");
}

struct KahanLD {
    long double sum = 0.0L;
    long double comp = 0.0L;
    void add(long double term) {
        long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    long double value() const { return sum + comp; }
};

} // namespace

void ModelParams::validate() const {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("model.alpha must lie in (0, 1]");
    if (!(beta >= 0.0))
        throw std::invalid_argument("model.beta must be >= 0");
    const double ab = alpha + beta;
    if (!(ab > 1.0) || ab > 2.0)
        throw std::invalid_argument("model.alpha + model.beta must lie in (1, 2]");
    if (!(c > 0.0))
        throw std::invalid_argument("model.c must be > 0");
    if (!(d_coef > 0.0))
        throw std::invalid_argument("model.d_coef must be > 0");
}

void KernelConfig::validate() const {
    if (n_terms < 1) throw std::invalid_argument("kernel.n_terms must be >= 1");
    if (m_terms < 1) throw std::invalid_argument("kernel.m_terms must be >= 1");
    if (!(oracle_tol > 0.0)) throw std::invalid_argument("kernel.oracle_tol must be > 0");
}

std::string_view to_string(HRoute r) {
    switch (r) {
        case HRoute::series: return "series";
        case HRoute::alpha_eq_beta: return "alpha_eq_beta";
        case HRoute::classical: return "classical";
        case HRoute::laplace: return "laplace";
    }
    return "?";
}

namespace {

// The reciprocal gamma factors 1/Gamma(beta k + (alpha+beta)(n+1) + 1) depend
// only on (alpha, beta) and the truncation orders, so they are shared across
// every (mu, t) evaluation. Rows are concatenated: row n holds k < M - n.
struct GammaTable {
    std::vector<long double> inv_gamma;
    std::vector<std::size_t> row_start;
};

std::shared_ptr<const GammaTable> gamma_table(double alpha, double beta, int n_terms, int m_terms) {
    using Key = std::tuple<double, double, int, int>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const GammaTable>> cache;
    const Key key{alpha, beta, n_terms, m_terms};
    {
        std::scoped_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<GammaTable>();
    table->row_start.reserve(n_terms + 1);
    std::size_t total = 0;
    for (int n = 0; n < n_terms; ++n) {
        table->row_start.push_back(total);
        total += static_cast<std::size_t>(std::max(0, m_terms - n));
    }
    table->row_start.push_back(total);
    table->inv_gamma.resize(total);
    const long double ab = static_cast<long double>(alpha) + beta;
    for (int n = 0; n < n_terms; ++n) {
        const long double b = ab * (n + 1) + 1.0L;
        long double* row = table->inv_gamma.data() + table->row_start[n];
        for (int k = 0; k < m_terms - n; ++k)
            row[k] = 1.0L / detail::tgamma_ld(static_cast<long double>(beta) * k + b);
    }
    std::scoped_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(table));
    return it->second;
}

} // namespace

// The binomial double sum is evaluated grouped by the power of
// (mu^2 c^2 t^{alpha+beta}): with k = m - n the truncated sum
//   sum_{m<M} sum_{n<=min(m,N-1)}  ==  sum_{n<N} sum_{k<M-n}
// regroups to
//   H = 1 + sum_{n<N} (-q)^{n+1} sum_{k<M-n} (n+1)_k (-x)^k / (k! Gamma(beta k + b_n)),
//   q = mu^2 c^2 t^{alpha+beta},  x = c^2 t^beta / D,  b_n = (alpha+beta)(n+1) + 1,
// which keeps intermediate magnitudes close to the true term sizes. Terms are
// formed directly in extended precision; Gamma(beta k + b_n) stays far below
// the long-double overflow limit for any sane truncation order.
double h_series(const ModelParams& params, const KernelConfig& cfg, double mu, double t) {
    params.validate();
    cfg.validate();
    check_args(mu, t);
    if (t == 0.0 || mu == 0.0) return 1.0;

    const long double alpha = params.alpha;
    const long double beta = params.beta;
    const long double c2 = static_cast<long double>(params.c) * params.c;
    const long double D = params.d_coef;
    const long double tl = t;
    const long double mul = mu;

    const long double q = mul * mul * c2 * std::pow(tl, alpha + beta);
    const long double x = c2 / D * std::pow(tl, beta);
    const long double guard = std::exp(static_cast<long double>(cfg.term_log_threshold));

    const int N = cfg.n_terms;
    const int M = cfg.m_terms;
    const auto table = gamma_table(params.alpha, params.beta, N, M);

    KahanLD outer;
    long double qn = q;            // q^{n+1}
    long double sign_outer = -1.0L; // (-1)^{n+1}
    for (int n = 0; n < N; ++n) {
        const long double* inv_gamma = table->inv_gamma.data() + table->row_start[n];
        KahanLD inner;
        long double coef = 1.0L;   // (n+1)_k x^k / k!
        long double sign = 1.0L;   // (-1)^k
        for (int k = 0; k < M - n; ++k) {
            const long double term = sign * coef * inv_gamma[k];
            if (std::fabs(term) * qn > guard)
                throw TruncationOverflow(
                    "h_series: term log-magnitude exceeds threshold " +
                    std::to_string(cfg.term_log_threshold) + " at mu=" + std::to_string(mu) +
                    ", t=" + std::to_string(t));
            inner.add(term);
            coef *= static_cast<long double>(n + 1 + k) * x / static_cast<long double>(k + 1);
            sign = -sign;
        }
        outer.add(sign_outer * qn * inner.value());
        qn *= q;
        sign_outer = -sign_outer;
    }
    return static_cast<double>(1.0L + outer.value());
}

double h_alpha_eq_beta(const ModelParams& params, double mu, double t) {
    params.validate();
    check_args(mu, t);
    if (params.alpha != params.beta)
        throw std::invalid_argument("h_alpha_eq_beta requires alpha == beta");
    if (t == 0.0 || mu == 0.0) return 1.0;

    const long double c = params.c;
    const long double D = params.d_coef;
    const long double alpha = params.alpha;
    const long double disc = 1.0L - 4.0L * static_cast<long double>(mu) * mu * D * D / (c * c);
    CLD omega = disc >= 0.0L ? CLD{std::sqrt(disc), 0.0L} : CLD{0.0L, std::sqrt(-disc)};
    if (std::abs(omega) < 1e-12L)
        throw BranchPointSingularity("h_alpha_eq_beta: mu is within 1e-12 of c/(2D)");

    const CLD a_plus = c * c / (2.0L * D) * (1.0L + omega);
    const CLD a_minus = c * c / (2.0L * D) * (1.0L - omega);
    const long double ta = std::pow(static_cast<long double>(t), alpha);

    // Reliability guard: the Mittag-Leffler series loses ~e^{maxlog} * ulp
    // to cancellation, same failure mode as the double series.
    constexpr long double kGuardLog = 21.0L;
    long double max1 = 0.0L, max2 = 0.0L;
    const CLD e_minus = detail::prabhakar_series_cld(alpha, 1.0L, 1.0L, -a_minus * ta, 10000, &max1);
    const CLD e_plus = detail::prabhakar_series_cld(alpha, 1.0L, 1.0L, -a_plus * ta, 10000, &max2);
    const CLD w_minus = (1.0L + omega) / (2.0L * omega);
    const CLD w_plus = (1.0L - omega) / (2.0L * omega);
    if (std::max(max1 * std::abs(w_minus), max2 * std::abs(w_plus)) > std::exp(kGuardLog))
        throw TruncationOverflow("h_alpha_eq_beta: Mittag-Leffler terms exceed the reliability guard");

    const CLD h = w_minus * e_minus - w_plus * e_plus;
    const long double re = h.real();
    const long double im = h.imag();
    if (std::fabs(im) > 1e-9L * (1.0L + std::fabs(re)))
        throw NumericError("h_alpha_eq_beta: imaginary residual exceeds tolerance");
    return static_cast<double>(re);
}

double h_classical(const ModelParams& params, double mu, double t) {
    params.validate();
    check_args(mu, t);
    if (params.alpha != 1.0 || params.beta != 1.0)
        throw std::invalid_argument("h_classical requires alpha == beta == 1");
    const double c = params.c, D = params.d_coef;
    const double pref = std::exp(-c * c * t / (2.0 * D));
    const double disc = c * c / (4.0 * D * D) - mu * mu;
    if (disc == 0.0)
        return pref * (1.0 + c * c * t / (2.0 * D));
    if (disc > 0.0) {
        const double w = std::sqrt(disc);
        return pref * (std::cosh(c * t * w) + c / (2.0 * D * w) * std::sinh(c * t * w));
    }
    const double w = std::sqrt(-disc);
    return pref * (std::cos(c * t * w) + c / (2.0 * D * w) * std::sin(c * t * w));
}

namespace {

// Trapezoid evaluation of the Talbot contour integral with M nodes on the
// contour s(theta) = r theta (cot theta + i), theta in (-pi, pi):
//   f(t) = (r/M) [ e^{rt} F(r)/2 + sum_{k=1}^{M-1} Re(e^{t s_k} F(s_k)(1 + i sigma_k)) ],
//   sigma = theta + (theta cot theta - 1) cot theta.
// The contour scale r is fixed by the caller, so doubling M refines the same
// quadrature and converges to the contour integral.
class TalbotContour {
public:
    TalbotContour(const ModelParams& p, double mu)
        : ab_(static_cast<long double>(p.alpha) + p.beta),
          a_(p.alpha),
          cc_(static_cast<long double>(p.c) * p.c / p.d_coef),
          mu2c2_(static_cast<long double>(mu) * mu * p.c * p.c) {}

    CLD transform(CLD s) const {
        return (std::pow(s, ab_ - 1.0L) + cc_ * std::pow(s, a_ - 1.0L)) /
               (std::pow(s, ab_) + cc_ * std::pow(s, a_) + mu2c2_);
    }

    long double evaluate(long double r, long double t, int nodes) const {
        KahanLD acc;
        acc.add(0.5L * std::exp(r * t) * transform(CLD{r, 0.0L}).real());
        for (int k = 1; k < nodes; ++k) {
            const long double th = kPi * k / nodes;
            const long double cot = std::cos(th) / std::sin(th);
            const CLD s{r * th * cot, r * th};
            const long double sigma = th + (th * cot - 1.0L) * cot;
            const CLD v = std::exp(s * static_cast<long double>(t)) * transform(s) * CLD{1.0L, sigma};
            acc.add(v.real());
        }
        return r / nodes * acc.value();
    }

private:
    long double ab_, a_, cc_, mu2c2_;
};

} // namespace

double h_laplace_oracle(const ModelParams& params, const KernelConfig& cfg, double mu, double t) {
    params.validate();
    cfg.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("h_laplace_oracle requires t > 0; use H(mu, 0) = 1");
    check_args(mu, t);

    const TalbotContour contour(params, mu);
    const long double ab = static_cast<long double>(params.alpha) + params.beta;
    // Denominator root moduli: |s|^{ab} ~ mu^2 c^2 and |s|^beta ~ c^2/D.
    const long double rho = std::max(
        std::pow(static_cast<long double>(mu) * mu * params.c * params.c, 1.0L / ab),
        params.beta > 0.0 ? std::pow(static_cast<long double>(params.c) * params.c / params.d_coef,
                                     1.0L / static_cast<long double>(params.beta))
                          : 0.0L);

    // Base scale is the M=32 fixed-Talbot choice. When the conjugate roots at
    // arg ~ +-pi/(alpha+beta) rise above the base contour's reach (r pi), a
    // wider contour encloses them; rt stays <= 30 so e^{rt} cannot swamp the
    // extended-precision cancellation. Beyond that range the roots' residues
    // are damped by e^{Re(pole) t}.
    const long double r_base = 2.0L * 32.0L / (5.0L * t);
    const long double im_pole = rho * std::sin(kPi / ab);
    const long double r_wide =
        std::min(std::max(r_base, 1.35L * im_pole / kPi), 30.0L / t);
    const long double tol = cfg.oracle_tol;

    // The enclosing scale goes first: an un-enclosed pole can leave the
    // refinement stable at a value missing that residue.
    const bool base_encloses = 1.2L * im_pole <= r_base * kPi;
    const long double scales[2] = {base_encloses ? r_base : r_wide,
                                   base_encloses ? r_wide : r_base};
    for (int which = 0; which < 2; ++which) {
        const long double r = scales[which];
        if (which == 1 && scales[1] == scales[0]) break;
        long double prev = contour.evaluate(r, t, 32);
        for (int nodes = 64; nodes <= 1024; nodes *= 2) {
            const long double cur = contour.evaluate(r, t, nodes);
            if (std::fabs(cur - prev) <= tol * (1.0L + std::fabs(cur)))
                return static_cast<double>(cur);
            prev = cur;
        }
    }
    throw ContourFailure("h_laplace_oracle: node-doubling check failed at mu=" +
                         std::to_string(mu) + ", t=" + std::to_string(t));
}

double h_eval(const ModelParams& params, const KernelConfig& cfg, double mu, double t,
              HRoute* route_used) {
    params.validate();
    cfg.validate();
    check_args(mu, t);
    auto done = [&](double v, HRoute r) {
        if (route_used) *route_used = r;
        return v;
    };
    if (t == 0.0 || mu == 0.0) return done(1.0, HRoute::series);
    if (params.alpha == 1.0 && params.beta == 1.0)
        return done(h_classical(params, mu, t), HRoute::classical);
    if (params.alpha == params.beta) {
        try {
            return done(h_alpha_eq_beta(params, mu, t), HRoute::alpha_eq_beta);
        } catch (const BranchPointSingularity&) {
        } catch (const TruncationOverflow&) {
        }
    }
    try {
        return done(h_series(params, cfg, mu, t), HRoute::series);
    } catch (const TruncationOverflow&) {
        return done(h_laplace_oracle(params, cfg, mu, t), HRoute::laplace);
    }
}

} // namespace sfhd
