#ifndef SFHD_COVARIANCE_HPP
#define SFHD_COVARIANCE_HPP

#include "sfhd/spectra.hpp"

#include <vector>

namespace sfhd {

/// Point request for the space-time covariance R(cos gamma, t, t').
struct CovarianceRequest {
    double gamma;   ///< angular distance, in [0, pi]
    double t;       ///< >= 0
    double t_prime; ///< >= 0

    void validate() const;
};

/// R(cos gamma, t, t') = sum_i sinc(2 mu_i sin(gamma/2)) H(mu_i,t) H(mu_i,t') sigma_i^2,
/// with the sinc factor replaced by its limit 1 at gamma = 0.
double covariance_direct(const DiscreteMeasure& measure, const ModelParams& params,
                         const KernelConfig& cfg, const CovarianceRequest& req);

/// Continuous analogue: quadrature of the same integrand against 4 pi mu^2 g(mu) dmu.
double covariance_direct(const MaternSpectrum& spec, const ModelParams& params,
                         const KernelConfig& cfg, const CovarianceRequest& req);

/// Legendre reconstruction R = (1/4pi) sum_{l<=l_max} (2l+1) C_l P_l(cos gamma).
double covariance_from_spectrum(const AngularSpectrum& spectrum, double gamma);

/// Matrix R(cos gamma_i, t_j, t_j): one row per gamma, one column per t.
/// Kernel values are cached per (atom, t); entries are OpenMP-parallel with
/// schedule-independent output.
std::vector<std::vector<double>> covariance_grid(const DiscreteMeasure& measure,
                                                 const ModelParams& params, const KernelConfig& cfg,
                                                 const std::vector<double>& gammas,
                                                 const std::vector<double>& times);

/// Serial reference implementation (identical arithmetic, no OpenMP).
std::vector<std::vector<double>> covariance_grid_serial(const DiscreteMeasure& measure,
                                                        const ModelParams& params,
                                                        const KernelConfig& cfg,
                                                        const std::vector<double>& gammas,
                                                        const std::vector<double>& times);

} // namespace sfhd

#endif
