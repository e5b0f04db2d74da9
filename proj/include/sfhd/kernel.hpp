#ifndef SFHD_KERNEL_HPP
#define SFHD_KERNEL_HPP

#include <string_view>

namespace sfhd {

/// Parameters of the fractional hyperbolic diffusion equation
/// (1/c^2) d^{alpha+beta}_t q + (1/D) d^alpha_t q = Laplacian q.
struct ModelParams {
    double alpha;   ///< in (0, 1]
    double beta;    ///< >= 0, with 1 < alpha + beta <= 2
    double c;       ///< propagation speed, > 0
    double d_coef;  ///< diffusion coefficient D, > 0

    /// Throws std::invalid_argument with a field-specific message on violation.
    void validate() const;
};

/// Truncation and reliability controls for evaluating H(mu, t).
struct KernelConfig {
    int n_terms = 80;  ///< truncation of the inner series index n
    int m_terms = 80;  ///< truncation of the outer series index m
    /// Log-magnitude above which a series term makes the series route
    /// unreliable (raises TruncationOverflow). The default keeps the
    /// double-series roundoff below ~1e-9 in extended precision.
    double term_log_threshold = 21.0;
    /// Agreement tolerance for the Laplace oracle's node-doubling self-check.
    double oracle_tol = 1e-6;

    void validate() const;
};

/// Which evaluation route produced an h_eval result.
enum class HRoute { series, alpha_eq_beta, classical, laplace };

std::string_view to_string(HRoute r);

/// Truncated double series of the Fourier kernel:
/// H = 1 - mu^2 c^2 t^{alpha+beta} sum_{m<M} sum_{n<=min(m,N-1)} C(m,n)
///       (-c^2 t^beta / D)^m (mu^2 D t^alpha)^n / Gamma(beta m + alpha n + alpha + beta + 1).
/// Raises TruncationOverflow when any term's log-magnitude exceeds
/// cfg.term_log_threshold.
double h_series(const ModelParams& params, const KernelConfig& cfg, double mu, double t);

/// Closed form for alpha == beta:
/// H = ((1+Omega)/2Omega) E_alpha(-A_- t^alpha) - ((1-Omega)/2Omega) E_alpha(-A_+ t^alpha),
/// Omega = sqrt(1 - 4 mu^2 D^2 / c^2) (imaginary for mu > c/2D),
/// A_pm = (c^2/2D)(1 +- Omega). Raises BranchPointSingularity when
/// |Omega| < 1e-12 and TruncationOverflow when the Mittag-Leffler terms
/// exceed the reliability guard.
double h_alpha_eq_beta(const ModelParams& params, double mu, double t);

/// Classical closed form for alpha == beta == 1 (cosh/sinh branch for
/// mu <= c/2D, cos/sin branch for mu > c/2D, analytic limit at the junction).
double h_classical(const ModelParams& params, double mu, double t);

/// Numerical inversion of
/// H~(s) = (s^{alpha+beta-1} + c^2 D^{-1} s^{alpha-1}) /
///         (s^{alpha+beta} + c^2 D^{-1} s^alpha + mu^2 c^2)
/// on a fixed Talbot contour with >= 32 nodes, validated by doubling the
/// node count on the same contour. The contour scale adapts to the
/// transform's root moduli so the conjugate root pair is enclosed whenever
/// its residues matter. Requires t > 0; raises ContourFailure if the
/// doubling check cannot be satisfied. Limitation: for alpha+beta close to
/// 2 with very large mu*t the barely-damped roots can exceed the reachable
/// contour and contribute a few parts in 1e6 undetected.
double h_laplace_oracle(const ModelParams& params, const KernelConfig& cfg, double mu, double t);

/// Route dispatcher: t == 0 or mu == 0 -> 1; alpha == beta == 1 -> classical;
/// alpha == beta -> closed form (falling back to the series near the branch
/// point or on overflow); otherwise series, falling back to the Laplace
/// oracle on TruncationOverflow.
double h_eval(const ModelParams& params, const KernelConfig& cfg, double mu, double t,
              HRoute* route_used = nullptr);

} // namespace sfhd

#endif
