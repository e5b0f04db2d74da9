#ifndef SFHD_FIELDSIM_HPP
#define SFHD_FIELDSIM_HPP

#include "sfhd/spectra.hpp"

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace sfhd {

/// Controls for seeded field realizations on the equal-angle sphere grid.
struct SimulationConfig {
    int l_max = 100;              ///< <= 200 (stable associated-Legendre range)
    std::uint64_t seed = 0;
    std::vector<double> times;    ///< each >= 0
    int grid_n_theta = 180;       ///< >= 2
    int grid_n_phi = 360;         ///< >= 4

    void validate() const;
};

/// Laplace-series coefficients a_lm(t), 0 <= l <= l_max, -l <= m <= l, stored
/// dense with index l(l+1)+m. Physical coefficients satisfy the conjugate
/// symmetry a_{l,-m} = (-1)^m conj(a_{l,m}).
struct HarmonicCoefficients {
    double t = 0.0;
    int l_max = 0;
    std::vector<std::complex<double>> coeffs;

    explicit HarmonicCoefficients(int lmax = 0, double time = 0.0)
        : t(time), l_max(lmax), coeffs(static_cast<std::size_t>(lmax + 1) * (lmax + 1)) {}

    std::complex<double>& at(int l, int m) { return coeffs[static_cast<std::size_t>(l) * (l + 1) + m]; }
    const std::complex<double>& at(int l, int m) const {
        return coeffs[static_cast<std::size_t>(l) * (l + 1) + m];
    }

    /// Largest violation of the conjugate symmetry (0 for physical inputs).
    double symmetry_defect() const;
};

/// Equal-angle grid of real field values: theta_j = (j + 1/2) pi / n_theta
/// (cell centers), phi_k = 2 pi k / n_phi, values in row-major (theta, phi).
struct SphereGrid {
    std::vector<double> thetas;
    std::vector<double> phis;
    std::vector<double> values;

    int n_theta() const { return static_cast<int>(thetas.size()); }
    int n_phi() const { return static_cast<int>(phis.size()); }
    double& at(int j, int k) { return values[static_cast<std::size_t>(j) * phis.size() + k]; }
    double at(int j, int k) const { return values[static_cast<std::size_t>(j) * phis.size() + k]; }

    double sample_variance() const;
};

/// Draws a_lm(t) = sum_i 2 sqrt(pi) j_l(mu_i) H(mu_i, t) Z_lm(mu_i) with
/// counter-based Gaussian variates keyed by (seed, l, m, i): m = 0 draws are
/// real N(0, sigma_i^2), m > 0 draws are complex with independent real and
/// imaginary parts N(0, sigma_i^2 / 2), m < 0 filled by conjugate symmetry.
/// The same (seed, l, m, i) variates recur for every t, so one realization
/// evolves coherently in time.
HarmonicCoefficients sample_coefficients(const DiscreteMeasure& measure, const ModelParams& params,
                                         const KernelConfig& cfg, const SimulationConfig& sim,
                                         double t);

HarmonicCoefficients sample_coefficients_serial(const DiscreteMeasure& measure,
                                                const ModelParams& params, const KernelConfig& cfg,
                                                const SimulationConfig& sim, double t);

/// Real-field synthesis T(theta_j, phi_k) = sum_l [a_l0 Y_l0 + 2 Re sum_{m>0} a_lm Y_lm].
/// Raises SymmetryViolation if the coefficients break conjugate symmetry
/// beyond 1e-12; asserts the residual imaginary content stays below
/// 1e-10 of the field amplitude.
SphereGrid synthesize(const HarmonicCoefficients& coeffs, const SimulationConfig& sim);

SphereGrid synthesize_serial(const HarmonicCoefficients& coeffs, const SimulationConfig& sim);

/// One grid per requested time, all sharing the same underlying variates.
std::vector<std::pair<double, SphereGrid>> simulate_evolution(const DiscreteMeasure& measure,
                                                              const ModelParams& params,
                                                              const KernelConfig& cfg,
                                                              const SimulationConfig& sim);

/// Discrete quadrature analysis g_lm = sum_{j,k} T(theta_j, phi_k)
/// conj(Y_lm) sin(theta_j) dtheta dphi on the equal-angle grid.
HarmonicCoefficients analyze_grid(const SphereGrid& grid, int l_max);

} // namespace sfhd

#endif
