#include "sfhd/spectra.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sfhd {

namespace detail {
// 16-point Gauss-Legendre on [-1, 1], positive half.
const double kGL16Nodes[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
const double kGL16Weights[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};
} // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOctaveTail = 1e-8;
constexpr int kMaxOctaves = 48;

} // namespace

void DiscreteMeasure::validate() const {
    if (atoms.empty())
        throw std::invalid_argument("measure: needs at least one atom");
    double prev = 0.0;
    for (const auto& a : atoms) {
        if (!(a.mu > prev))
            throw std::invalid_argument("measure: atom frequencies must be strictly increasing and > 0");
        if (!(a.sigma2 > 0.0))
            throw std::invalid_argument("measure: atom variances must be > 0");
        prev = a.mu;
    }
}

void MaternSpectrum::validate() const {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("matern.sigma2 must be > 0");
    if (!(a > 0.0)) throw std::invalid_argument("matern.a must be > 0");
    if (!(nu > 0.0)) throw std::invalid_argument("matern.nu must be > 0");
}

double matern_density(const MaternSpectrum& spec, double mu) {
    spec.validate();
    if (!(mu >= 0.0)) throw std::invalid_argument("matern_density: mu must be >= 0");
    const double lognum = log_gamma(spec.nu + 1.5) + 2.0 * spec.nu * std::log(spec.a);
    const double logden = 1.5 * std::log(kPi) + log_gamma(spec.nu) +
                          (spec.nu + 1.5) * std::log(spec.a * spec.a + mu * mu);
    return spec.sigma2 * std::exp(lognum - logden);
}

DiscreteMeasure discretize(const MaternSpectrum& spec, int n_atoms, double mu_cut) {
    spec.validate();
    if (n_atoms < 1) throw std::invalid_argument("discretize: n_atoms must be >= 1");
    if (!(mu_cut > 0.0)) throw std::invalid_argument("discretize: mu_cut must be > 0");
    const double dmu = mu_cut / n_atoms;
    DiscreteMeasure m;
    m.atoms.reserve(n_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        const double mu = (i + 0.5) * dmu;
        m.atoms.push_back({mu, 4.0 * kPi * mu * mu * matern_density(spec, mu) * dmu});
    }
    return m;
}

ConditionDiagnostic check_condition_227(const DiscreteMeasure& measure, const ModelParams& params,
                                        const KernelConfig& cfg, double t) {
    measure.validate();
    double total = 0.0, last = 0.0;
    for (const auto& a : measure.atoms) {
        const double h = h_eval(params, cfg, a.mu, t);
        last = a.mu * a.mu * h * h * a.sigma2;
        total += last;
    }
    return {total, total > 0.0 ? last / total : 0.0};
}

ConditionDiagnostic check_condition_227(const MaternSpectrum& spec, const ModelParams& params,
                                        const KernelConfig& cfg, double t) {
    spec.validate();
    auto integrand = [&](double mu) {
        const double h = h_eval(params, cfg, mu, t);
        return mu * mu * h * h * 4.0 * kPi * mu * mu * matern_density(spec, mu);
    };
    const double panel_w = std::min(kPi / 2.0, spec.a / 2.0);
    double total = 0.0, lo = 0.0, hi = 1.0;
    double prev_octave = std::numeric_limits<double>::infinity();
    bool prev_valid = false;
    for (int k = 0; k < kMaxOctaves; ++k) {
        const double part = detail::gauss_legendre_panels(integrand, lo, hi, panel_w);
        total += part;
        if (total > 0.0 && part < kOctaveTail * total)
            return {total, part / total};
        // Decreasing-tail check once past the initial rise around mu ~ a.
        if (lo > 4.0 * std::max(spec.a, 1.0)) {
            if (prev_valid && part >= prev_octave)
                throw NonConvergence(
                    "check_condition_227: octave contributions are not decreasing (nu too small "
                    "for this model)");
            prev_octave = part;
            prev_valid = true;
        }
        lo = hi;
        hi *= 2.0;
    }
    throw NonConvergence("check_condition_227: octave sweep did not converge within " +
                         std::to_string(kMaxOctaves) + " octaves");
}

namespace {

// C_l = 2 pi^2 J^2_{l+1/2}(mu)/mu ... with J_{l+1/2}(mu) = sqrt(2 mu / pi) j_l(mu),
// so the per-atom weight is 2 pi^2 (2/pi) j_l(mu)^2 = 4 pi j_l(mu)^2.
AngularSpectrum spectrum_discrete_impl(const DiscreteMeasure& measure, const ModelParams& params,
                                       const KernelConfig& cfg, int l_max, double t, double t_prime,
                                       bool parallel) {
    measure.validate();
    if (l_max < 0) throw std::invalid_argument("angular_spectrum: l_max must be >= 0");
    const int n_atoms = static_cast<int>(measure.atoms.size());

    // One kernel evaluation per (atom, time), shared across l.
    std::vector<double> h_t(n_atoms), h_tp(n_atoms);
    std::vector<std::vector<double>> jl(n_atoms, std::vector<double>(l_max + 1));
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
    for (int i = 0; i < n_atoms; ++i) {
        const double mu = measure.atoms[i].mu;
        h_t[i] = h_eval(params, cfg, mu, t);
        h_tp[i] = t_prime == t ? h_t[i] : h_eval(params, cfg, mu, t_prime);
        spherical_bessel_array(mu, jl[i]);
    }

    AngularSpectrum out;
    out.l_max = l_max;
    out.t = t;
    out.t_prime = t_prime;
    out.values.assign(l_max + 1, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
    for (int l = 0; l <= l_max; ++l) {
        double s = 0.0;
        for (int i = 0; i < n_atoms; ++i) {
            const double j = jl[i][l];
            s += j * j * h_t[i] * h_tp[i] * measure.atoms[i].sigma2;
        }
        out.values[l] = 4.0 * kPi * s;
    }
    return out;
}

struct MaternNodeTable {
    std::vector<double> mu, weight, common; // common = w * 16 pi^2 mu^2 g H H'
};

// Gauss-Legendre nodes for [lo, hi] split into panels <= max_width.
void append_panel_nodes(double lo, double hi, double max_width, std::vector<double>& mu,
                        std::vector<double>& w) {
    const int n_panels = std::max(1, static_cast<int>((hi - lo) / max_width) + 1);
    const double pw = (hi - lo) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        const double mid = lo + (p + 0.5) * pw;
        const double half = 0.5 * pw;
        for (int i = 0; i < 8; ++i) {
            mu.push_back(mid - half * detail::kGL16Nodes[i]);
            w.push_back(half * detail::kGL16Weights[i]);
            mu.push_back(mid + half * detail::kGL16Nodes[i]);
            w.push_back(half * detail::kGL16Weights[i]);
        }
    }
}

AngularSpectrum spectrum_matern_impl(const MaternSpectrum& spec, const ModelParams& params,
                                     const KernelConfig& cfg, int l_max, double t, double t_prime,
                                     bool parallel) {
    spec.validate();
    if (l_max < 0) throw std::invalid_argument("angular_spectrum: l_max must be >= 0");
    check_condition_227(spec, params, cfg, t);
    if (t_prime != t) check_condition_227(spec, params, cfg, t_prime);

    auto integrate = [&](double max_width) {
        std::vector<double> totals(l_max + 1, 0.0);
        double lo = 0.0, hi = 1.0;
        for (int k = 0; k < kMaxOctaves; ++k) {
            std::vector<double> mu, w;
            append_panel_nodes(lo, hi, max_width, mu, w);
            const int n = static_cast<int>(mu.size());
            std::vector<double> common(n);
            std::vector<std::vector<double>> jl(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
            for (int i = 0; i < n; ++i) {
                const double h1 = h_eval(params, cfg, mu[i], t);
                const double h2 = t_prime == t ? h1 : h_eval(params, cfg, mu[i], t_prime);
                common[i] = w[i] * 16.0 * kPi * kPi * mu[i] * mu[i] *
                            matern_density(spec, mu[i]) * h1 * h2;
                jl[i].resize(l_max + 1);
                spherical_bessel_array(mu[i], jl[i]);
            }
            std::vector<double> part(l_max + 1, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
            for (int l = 0; l <= l_max; ++l) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += common[i] * jl[i][l] * jl[i][l];
                part[l] = s;
            }
            double max_total = 0.0;
            for (int l = 0; l <= l_max; ++l) {
                totals[l] += part[l];
                max_total = std::max(max_total, std::abs(totals[l]));
            }
            // per-l tail criterion: the small high-l coefficients must not
            // carry a relatively larger truncation than the dominant ones
            bool done = max_total > 0.0;
            for (int l = 0; done && l <= l_max; ++l)
                done = std::abs(part[l]) < kOctaveTail * (std::abs(totals[l]) + 1e-12 * max_total);
            if (done) return totals;
            lo = hi;
            hi *= 2.0;
        }
        throw QuadratureFailure("angular_spectrum_matern: octave sweep did not converge");
    };

    const std::vector<double> coarse = integrate(kPi / 2.0);
    const std::vector<double> fine = integrate(kPi / 4.0);
    double max_fine = 0.0;
    for (double v : fine) max_fine = std::max(max_fine, std::abs(v));
    for (int l = 0; l <= l_max; ++l) {
        const double tol = 1e-7 * (std::abs(fine[l]) + 1e-12 * max_fine);
        if (std::abs(fine[l] - coarse[l]) > tol)
            throw QuadratureFailure("angular_spectrum_matern: refinement check failed at l=" +
                                    std::to_string(l));
    }

    AngularSpectrum out;
    out.l_max = l_max;
    out.t = t;
    out.t_prime = t_prime;
    out.values = fine;
    return out;
}

} // namespace

AngularSpectrum angular_spectrum_discrete(const DiscreteMeasure& measure, const ModelParams& params,
                                          const KernelConfig& cfg, int l_max, double t,
                                          double t_prime) {
    return spectrum_discrete_impl(measure, params, cfg, l_max, t, t_prime, true);
}

AngularSpectrum angular_spectrum_discrete_serial(const DiscreteMeasure& measure,
                                                 const ModelParams& params, const KernelConfig& cfg,
                                                 int l_max, double t, double t_prime) {
    return spectrum_discrete_impl(measure, params, cfg, l_max, t, t_prime, false);
}

AngularSpectrum angular_spectrum_matern(const MaternSpectrum& spec, const ModelParams& params,
                                        const KernelConfig& cfg, int l_max, double t,
                                        double t_prime) {
    return spectrum_matern_impl(spec, params, cfg, l_max, t, t_prime, true);
}

AngularSpectrum angular_spectrum_matern_serial(const MaternSpectrum& spec, const ModelParams& params,
                                               const KernelConfig& cfg, int l_max, double t,
                                               double t_prime) {
    return spectrum_matern_impl(spec, params, cfg, l_max, t, t_prime, false);
}

} // namespace sfhd
