#ifndef SFHD_SPECTRA_HPP
#define SFHD_SPECTRA_HPP

#include "sfhd/kernel.hpp"

#include <algorithm>
#include <vector>

namespace sfhd {

/// One atom (mu_i, sigma_i^2) of a discrete spectral measure.
struct DiscreteAtom {
    double mu;
    double sigma2;
};

/// Discrete spectral measure G with finite support 0 < mu_1 < mu_2 < ...
struct DiscreteMeasure {
    std::vector<DiscreteAtom> atoms;

    void validate() const;
};

/// Matern spectral density g(mu) = sigma^2 Gamma(nu+3/2) a^{2nu} /
/// (pi^{3/2} Gamma(nu) (a^2+mu^2)^{nu+3/2}); the induced measure density is
/// G'(mu) = 4 pi mu^2 g(mu).
struct MaternSpectrum {
    double sigma2;
    double a;
    double nu;

    void validate() const;
};

/// Angular time-dependent power spectrum C_l(t, t') for l = 0 .. l_max.
struct AngularSpectrum {
    int l_max = 0;
    double t = 0.0;
    double t_prime = 0.0;
    std::vector<double> values;
};

/// Diagnostic of the finiteness condition int mu^2 |H(mu,t)|^2 G(dmu) < inf.
struct ConditionDiagnostic {
    double finite_estimate;
    double tail_bound_ratio; ///< last octave (discrete: last atom) over total
};

double matern_density(const MaternSpectrum& spec, double mu);

/// Midpoint discretization of a Matern spectrum on (0, mu_cut]:
/// sigma_i^2 = 4 pi mu_i^2 g(mu_i) dmu.
DiscreteMeasure discretize(const MaternSpectrum& spec, int n_atoms, double mu_cut);

ConditionDiagnostic check_condition_227(const DiscreteMeasure& measure, const ModelParams& params,
                                        const KernelConfig& cfg, double t);

/// Matern case: adaptive quadrature with mu_cut grown by octaves until the
/// last octave contributes < 1e-8 of the total. Raises NonConvergence when
/// octave contributions stop decreasing (nu too small for the given model).
ConditionDiagnostic check_condition_227(const MaternSpectrum& spec, const ModelParams& params,
                                        const KernelConfig& cfg, double t);

/// C_l(t,t') = 2 pi^2 sum_i J^2_{l+1/2}(mu_i)/mu_i H(mu_i,t) H(mu_i,t') sigma_i^2.
/// Kernel values are computed once per atom and shared across l; the l loop
/// is OpenMP-parallel with schedule-independent output.
AngularSpectrum angular_spectrum_discrete(const DiscreteMeasure& measure, const ModelParams& params,
                                          const KernelConfig& cfg, int l_max, double t, double t_prime);

/// Serial reference implementation (identical arithmetic, no OpenMP).
AngularSpectrum angular_spectrum_discrete_serial(const DiscreteMeasure& measure,
                                                 const ModelParams& params, const KernelConfig& cfg,
                                                 int l_max, double t, double t_prime);

/// C_l(t,t') = 2 pi^2 int_0^inf J^2_{l+1/2}(mu)/mu H(mu,t) H(mu,t') G(dmu)
/// by composite Gauss-Legendre panels (width <= pi/2) over octaves, with a
/// panel-doubling refinement check (QuadratureFailure beyond 1e-7 relative).
AngularSpectrum angular_spectrum_matern(const MaternSpectrum& spec, const ModelParams& params,
                                        const KernelConfig& cfg, int l_max, double t, double t_prime);

AngularSpectrum angular_spectrum_matern_serial(const MaternSpectrum& spec, const ModelParams& params,
                                               const KernelConfig& cfg, int l_max, double t,
                                               double t_prime);

namespace detail {
/// Composite 16-point Gauss-Legendre over [a, b] with panels <= max_width.
template <typename F>
double gauss_legendre_panels(F&& f, double a, double b, double max_width);

extern const double kGL16Nodes[8];
extern const double kGL16Weights[8];
} // namespace detail

template <typename F>
double detail::gauss_legendre_panels(F&& f, double a, double b, double max_width) {
    const int n_panels = std::max(1, static_cast<int>((b - a) / max_width) + 1);
    const double w = (b - a) / n_panels;
    double total = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double lo = a + p * w;
        const double mid = lo + 0.5 * w;
        const double half = 0.5 * w;
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double dx = half * kGL16Nodes[i];
            s += kGL16Weights[i] * (f(mid - dx) + f(mid + dx));
        }
        total += s * half;
    }
    return total;
}

} // namespace sfhd

#endif
