#include "sfhd/covariance.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfhd {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

} // namespace

void CovarianceRequest::validate() const {
    if (!(gamma >= 0.0) || gamma > kPi)
        throw std::invalid_argument("covariance: gamma must lie in [0, pi]");
    if (!(t >= 0.0) || !(t_prime >= 0.0))
        throw std::invalid_argument("covariance: times must be >= 0");
}

double covariance_direct(const DiscreteMeasure& measure, const ModelParams& params,
                         const KernelConfig& cfg, const CovarianceRequest& req) {
    measure.validate();
    req.validate();
    const double chord = 2.0 * std::sin(req.gamma / 2.0);
    double total = 0.0;
    for (const auto& a : measure.atoms) {
        const double h1 = h_eval(params, cfg, a.mu, req.t);
        const double h2 = req.t_prime == req.t ? h1 : h_eval(params, cfg, a.mu, req.t_prime);
        total += sinc(a.mu * chord) * h1 * h2 * a.sigma2;
    }
    return total;
}

double covariance_direct(const MaternSpectrum& spec, const ModelParams& params,
                         const KernelConfig& cfg, const CovarianceRequest& req) {
    spec.validate();
    req.validate();
    const double chord = 2.0 * std::sin(req.gamma / 2.0);
    auto integrand = [&](double mu) {
        const double h1 = h_eval(params, cfg, mu, req.t);
        const double h2 = req.t_prime == req.t ? h1 : h_eval(params, cfg, mu, req.t_prime);
        return sinc(mu * chord) * h1 * h2 * 4.0 * kPi * mu * mu * matern_density(spec, mu);
    };
    // Same octave scheme as the other continuous-measure integrals; the panel
    // width resolves both the sinc oscillation and the density scale.
    const double osc = chord > 0.0 ? kPi / (2.0 * chord) : kPi / 2.0;
    const double panel_w = std::min({kPi / 2.0, osc, spec.a / 2.0});
    double total = 0.0, lo = 0.0, hi = 1.0;
    for (int k = 0; k < 48; ++k) {
        const double part = detail::gauss_legendre_panels(integrand, lo, hi, panel_w);
        total += part;
        if (std::abs(total) > 0.0 && std::abs(part) < 1e-8 * std::abs(total)) return total;
        lo = hi;
        hi *= 2.0;
    }
    throw QuadratureFailure("covariance_direct: octave sweep did not converge");
}

double covariance_from_spectrum(const AngularSpectrum& spectrum, double gamma) {
    if (spectrum.values.size() != static_cast<std::size_t>(spectrum.l_max) + 1)
        throw std::invalid_argument("covariance_from_spectrum: malformed spectrum");
    const double x = std::cos(gamma);
    // Single pass over l with the Legendre three-term recurrence.
    double total = spectrum.values[0];
    if (spectrum.l_max >= 1) {
        double pm1 = 1.0; // P_0
        double p = x;     // P_1
        total += 3.0 * spectrum.values[1] * p;
        for (int l = 2; l <= spectrum.l_max; ++l) {
            const double pl = ((2.0 * l - 1.0) * x * p - (l - 1.0) * pm1) / l;
            total += (2.0 * l + 1.0) * spectrum.values[l] * pl;
            pm1 = p;
            p = pl;
        }
    }
    return total / (4.0 * kPi);
}

namespace {

std::vector<std::vector<double>> grid_impl(const DiscreteMeasure& measure, const ModelParams& params,
                                           const KernelConfig& cfg, const std::vector<double>& gammas,
                                           const std::vector<double>& times, bool parallel) {
    measure.validate();
    if (gammas.empty() || times.empty())
        throw std::invalid_argument("covariance_grid: gamma and time lists must be nonempty");
    const int n_atoms = static_cast<int>(measure.atoms.size());
    const int n_t = static_cast<int>(times.size());
    const int n_g = static_cast<int>(gammas.size());

    // Kernel cache per (atom, time).
    std::vector<double> h(static_cast<std::size_t>(n_atoms) * n_t);
#pragma omp parallel for schedule(static) collapse(2) num_threads(thread_count()) if (parallel)
    for (int i = 0; i < n_atoms; ++i)
        for (int j = 0; j < n_t; ++j)
            h[static_cast<std::size_t>(i) * n_t + j] = h_eval(params, cfg, measure.atoms[i].mu, times[j]);

    std::vector<std::vector<double>> out(n_g, std::vector<double>(n_t));
#pragma omp parallel for schedule(static) collapse(2) num_threads(thread_count()) if (parallel)
    for (int g = 0; g < n_g; ++g) {
        for (int j = 0; j < n_t; ++j) {
            const double chord = 2.0 * std::sin(gammas[g] / 2.0);
            double s = 0.0;
            for (int i = 0; i < n_atoms; ++i) {
                const double hij = h[static_cast<std::size_t>(i) * n_t + j];
                s += sinc(measure.atoms[i].mu * chord) * hij * hij * measure.atoms[i].sigma2;
            }
            out[g][j] = s;
        }
    }
    return out;
}

} // namespace

std::vector<std::vector<double>> covariance_grid(const DiscreteMeasure& measure,
                                                 const ModelParams& params, const KernelConfig& cfg,
                                                 const std::vector<double>& gammas,
                                                 const std::vector<double>& times) {
    return grid_impl(measure, params, cfg, gammas, times, true);
}

std::vector<std::vector<double>> covariance_grid_serial(const DiscreteMeasure& measure,
                                                        const ModelParams& params,
                                                        const KernelConfig& cfg,
                                                        const std::vector<double>& gammas,
                                                        const std::vector<double>& times) {
    return grid_impl(measure, params, cfg, gammas, times, false);
}

} // namespace sfhd
