#include "sfhd/fieldsim.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/rng.hpp"
#include "sfhd/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sfhd {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSymmetryTol = 1e-12;
} // namespace

void SimulationConfig::validate() const {
    if (l_max < 0 || l_max > 200)
        throw std::invalid_argument("simulation.l_max must lie in [0, 200]");
    if (grid_n_theta < 2) throw std::invalid_argument("simulation.grid_n_theta must be >= 2");
    if (grid_n_phi < 4) throw std::invalid_argument("simulation.grid_n_phi must be >= 4");
    for (double t : times)
        if (!(t >= 0.0)) throw std::invalid_argument("simulation.times must all be >= 0");
}

double HarmonicCoefficients::symmetry_defect() const {
    double worst = 0.0;
    for (int l = 0; l <= l_max; ++l) {
        worst = std::max(worst, std::abs(at(l, 0).imag()));
        for (int m = 1; m <= l; ++m) {
            const std::complex<double> expect =
                (m % 2 == 0 ? 1.0 : -1.0) * std::conj(at(l, m));
            worst = std::max(worst, std::abs(at(l, -m) - expect));
        }
    }
    return worst;
}

double SphereGrid::sample_variance() const {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return var / static_cast<double>(values.size());
}

namespace {

HarmonicCoefficients sample_impl(const DiscreteMeasure& measure, const ModelParams& params,
                                 const KernelConfig& cfg, const SimulationConfig& sim, double t,
                                 bool parallel) {
    measure.validate();
    sim.validate();
    const int l_max = sim.l_max;
    const int n_atoms = static_cast<int>(measure.atoms.size());

    // Deterministic per-atom weights w_{l,i} = 2 sqrt(pi) j_l(mu_i) H(mu_i, t).
    std::vector<double> h(n_atoms), sigma(n_atoms);
    std::vector<std::vector<double>> jl(n_atoms, std::vector<double>(l_max + 1));
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
    for (int i = 0; i < n_atoms; ++i) {
        h[i] = h_eval(params, cfg, measure.atoms[i].mu, t);
        sigma[i] = std::sqrt(measure.atoms[i].sigma2);
        spherical_bessel_array(measure.atoms[i].mu, jl[i]);
    }
    const double two_sqrt_pi = 2.0 * std::sqrt(kPi);

    HarmonicCoefficients out(l_max, t);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
    for (int l = 0; l <= l_max; ++l) {
        for (int m = 0; m <= l; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (int i = 0; i < n_atoms; ++i) {
                const double w = two_sqrt_pi * jl[i][l] * h[i];
                const auto [g1, g2] = rng::gaussian_pair(sim.seed, l, m, i);
                if (m == 0) {
                    acc += w * sigma[i] * g1;
                } else {
                    const double half = sigma[i] * std::numbers::sqrt2 / 2.0;
                    acc += w * std::complex<double>(half * g1, half * g2);
                }
            }
            out.at(l, m) = acc;
            if (m > 0) out.at(l, -m) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(acc);
        }
    }
    return out;
}

SphereGrid synth_impl(const HarmonicCoefficients& coeffs, const SimulationConfig& sim,
                      bool parallel) {
    sim.validate();
    const double defect = coeffs.symmetry_defect();
    if (defect > kSymmetryTol)
        throw SymmetryViolation("synthesize: conjugate symmetry defect " + std::to_string(defect) +
                                " exceeds 1e-12");
    const int l_max = coeffs.l_max;
    const int nt = sim.grid_n_theta, np = sim.grid_n_phi;

    SphereGrid grid;
    grid.thetas.resize(nt);
    grid.phis.resize(np);
    grid.values.assign(static_cast<std::size_t>(nt) * np, 0.0);
    for (int j = 0; j < nt; ++j) grid.thetas[j] = (j + 0.5) * kPi / nt;
    for (int k = 0; k < np; ++k) grid.phis[k] = 2.0 * kPi * k / np;

    // Residual imaginary content comes only from Im a_l0 (bounded by the
    // symmetry check); tracked per row and asserted against the field scale.
    std::vector<double> row_imag(nt, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (parallel)
    for (int j = 0; j < nt; ++j) {
        const double theta = grid.thetas[j];
        const double ct = std::cos(theta), st = std::sin(theta);
        std::vector<double> plm(l_max + 1);
        // c_m(theta) = sum_l a_lm N_lm P_lm(cos theta); field = Re sum_m eps_m c_m e^{im phi}
        std::vector<std::complex<double>> cm(l_max + 1, {0.0, 0.0});
        double imag0 = 0.0;
        for (int m = 0; m <= l_max; ++m) {
            std::span<double> run(plm.data(), static_cast<std::size_t>(l_max - m) + 1);
            normalized_assoc_legendre(m, ct, st, run);
            std::complex<double> acc{0.0, 0.0};
            for (int l = m; l <= l_max; ++l) acc += coeffs.at(l, m) * run[l - m];
            if (m == 0) {
                imag0 = std::abs(acc.imag());
                cm[0] = {acc.real(), 0.0};
            } else {
                cm[m] = 2.0 * acc;
            }
        }
        row_imag[j] = imag0;
        for (int k = 0; k < np; ++k) {
            const double phi = grid.phis[k];
            double v = cm[0].real();
            for (int m = 1; m <= l_max; ++m)
                v += cm[m].real() * std::cos(m * phi) - cm[m].imag() * std::sin(m * phi);
            grid.at(j, k) = v;
        }
    }
    double max_abs = 0.0, max_imag = 0.0;
    for (double v : grid.values) max_abs = std::max(max_abs, std::abs(v));
    for (double v : row_imag) max_imag = std::max(max_imag, v);
    if (max_imag > 1e-10 * std::max(max_abs, 1e-300))
        throw SymmetryViolation("synthesize: residual imaginary part exceeds 1e-10 of the field");
    return grid;
}

} // namespace

HarmonicCoefficients sample_coefficients(const DiscreteMeasure& measure, const ModelParams& params,
                                         const KernelConfig& cfg, const SimulationConfig& sim,
                                         double t) {
    return sample_impl(measure, params, cfg, sim, t, true);
}

HarmonicCoefficients sample_coefficients_serial(const DiscreteMeasure& measure,
                                                const ModelParams& params, const KernelConfig& cfg,
                                                const SimulationConfig& sim, double t) {
    return sample_impl(measure, params, cfg, sim, t, false);
}

SphereGrid synthesize(const HarmonicCoefficients& coeffs, const SimulationConfig& sim) {
    return synth_impl(coeffs, sim, true);
}

SphereGrid synthesize_serial(const HarmonicCoefficients& coeffs, const SimulationConfig& sim) {
    return synth_impl(coeffs, sim, false);
}

std::vector<std::pair<double, SphereGrid>> simulate_evolution(const DiscreteMeasure& measure,
                                                              const ModelParams& params,
                                                              const KernelConfig& cfg,
                                                              const SimulationConfig& sim) {
    sim.validate();
    if (sim.times.empty())
        throw std::invalid_argument("simulate_evolution: simulation.times must be nonempty");
    std::vector<std::pair<double, SphereGrid>> out;
    out.reserve(sim.times.size());
    for (double t : sim.times)
        out.emplace_back(t, synthesize(sample_coefficients(measure, params, cfg, sim, t), sim));
    return out;
}

HarmonicCoefficients analyze_grid(const SphereGrid& grid, int l_max) {
    if (l_max < 0) throw std::invalid_argument("analyze_grid: l_max must be >= 0");
    const int nt = grid.n_theta(), np = grid.n_phi();
    const double dphi = 2.0 * kPi / np;

    // Colatitude quadrature weights, exact for trigonometric polynomials up
    // to degree nt - 1 on the cell-center grid (Driscoll-Healy form):
    // w_j = (4/nt) sin(theta_j) sum_p sin((2p+1) theta_j) / (2p+1).
    std::vector<double> wtheta(nt);
    for (int j = 0; j < nt; ++j) {
        double s = 0.0;
        for (int p = 0; p < nt / 2; ++p)
            s += std::sin((2.0 * p + 1.0) * grid.thetas[j]) / (2.0 * p + 1.0);
        wtheta[j] = 4.0 / nt * std::sin(grid.thetas[j]) * s;
    }

    HarmonicCoefficients out(l_max, 0.0);
    // Phi transform first: f_m(theta_j) = sum_k T(j,k) e^{-im phi_k} dphi.
    std::vector<std::vector<std::complex<double>>> fm(
        nt, std::vector<std::complex<double>>(l_max + 1));
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int j = 0; j < nt; ++j) {
        for (int m = 0; m <= l_max; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (int k = 0; k < np; ++k) {
                const double phi = grid.phis[k];
                acc += grid.at(j, k) * std::complex<double>(std::cos(m * phi), -std::sin(m * phi));
            }
            fm[j][m] = acc * dphi;
        }
    }
    for (int m = 0; m <= l_max; ++m) {
        std::vector<double> plm(static_cast<std::size_t>(l_max - m) + 1);
        std::vector<std::complex<double>> acc(static_cast<std::size_t>(l_max - m) + 1, {0.0, 0.0});
        for (int j = 0; j < nt; ++j) {
            const double theta = grid.thetas[j];
            normalized_assoc_legendre(m, std::cos(theta), std::sin(theta), plm);
            const std::complex<double> f = fm[j][m] * wtheta[j];
            for (int l = m; l <= l_max; ++l) acc[l - m] += f * plm[l - m];
        }
        for (int l = m; l <= l_max; ++l) {
            out.at(l, m) = acc[l - m];
            if (m > 0) out.at(l, -m) = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(acc[l - m]);
        }
    }
    return out;
}

} // namespace sfhd
