// sfhd: kernel, spectrum, covariance, simulation and verification runs for
// the spherical fractional hyperbolic diffusion random field.
#include "sfhd/config.hpp"
#include "sfhd/covariance.hpp"
#include "sfhd/csv.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/fieldsim.hpp"
#include "sfhd/kernel.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/specfun.hpp"
#include "sfhd/spectra.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <clocale>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sfhd;

namespace {

constexpr int kExitVerifyFailure = 1;
constexpr int kExitComputeFailure = 2;
constexpr int kExitUsage = 64;

struct Overrides {
    std::optional<double> alpha, beta, c, d_coef;
    std::optional<int> n_terms, m_terms;
    std::optional<double> term_log_threshold, oracle_tol;
    std::optional<int> l_max, grid_n_theta, grid_n_phi;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;

    void apply(RunConfig& cfg) const {
        if (alpha) cfg.model.alpha = *alpha;
        if (beta) cfg.model.beta = *beta;
        if (c) cfg.model.c = *c;
        if (d_coef) cfg.model.d_coef = *d_coef;
        if (n_terms) cfg.kernel.n_terms = *n_terms;
        if (m_terms) cfg.kernel.m_terms = *m_terms;
        if (term_log_threshold) cfg.kernel.term_log_threshold = *term_log_threshold;
        if (oracle_tol) cfg.kernel.oracle_tol = *oracle_tol;
        if (output_dir) cfg.output_dir = *output_dir;
        if (l_max || seed || grid_n_theta || grid_n_phi) {
            if (!cfg.simulation) cfg.simulation = SimulationConfig{};
            if (l_max) cfg.simulation->l_max = *l_max;
            if (seed) cfg.simulation->seed = *seed;
            if (grid_n_theta) cfg.simulation->grid_n_theta = *grid_n_theta;
            if (grid_n_phi) cfg.simulation->grid_n_phi = *grid_n_phi;
        }
    }
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--model.alpha", ov.alpha);
    cmd->add_option("--model.beta", ov.beta);
    cmd->add_option("--model.c", ov.c);
    cmd->add_option("--model.d_coef", ov.d_coef);
    cmd->add_option("--kernel.n_terms", ov.n_terms);
    cmd->add_option("--kernel.m_terms", ov.m_terms);
    cmd->add_option("--kernel.term_log_threshold", ov.term_log_threshold);
    cmd->add_option("--kernel.oracle_tol", ov.oracle_tol);
    cmd->add_option("--simulation.l_max", ov.l_max);
    cmd->add_option("--simulation.seed", ov.seed);
    cmd->add_option("--simulation.grid_n_theta", ov.grid_n_theta);
    cmd->add_option("--simulation.grid_n_phi", ov.grid_n_phi);
    cmd->add_option("--output_dir", ov.output_dir);
}

RunConfig prepare(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg = load_config(config_path);
    ov.apply(cfg);
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    // Writability check up front rather than after a long computation.
    const fs::path probe = fs::path(cfg.output_dir) / ".sfhd_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw std::invalid_argument("output_dir is not writable: " + cfg.output_dir);
    }
    fs::remove(probe);
    return cfg;
}

int cmd_kernel(const RunConfig& cfg, const std::vector<double>& mus, const std::vector<double>& ts) {
    if (mus.empty() || ts.empty()) {
        std::cerr << "kernel: --mu and --t must be nonempty\n";
        return kExitUsage;
    }
    const fs::path out_path = fs::path(cfg.output_dir) / "kernel.csv";
    io::CsvWriter out(out_path.string(), "mu,t,H,route");
    for (double mu : mus) {
        for (double t : ts) {
            HRoute route;
            double h;
            try {
                h = h_eval(cfg.model, cfg.kernel, mu, t, &route);
            } catch (const NumericError& e) {
                std::cerr << "kernel evaluation failed at mu=" << io::num(mu) << ", t=" << io::num(t)
                          << ": " << e.what() << '\n';
                return kExitComputeFailure;
            }
            out.row(mu, t, h, std::string(to_string(route)));
        }
    }
    std::cout << out_path.string() << '\n';
    return 0;
}

int cmd_spectrum(const RunConfig& cfg, int l_max, double t, double t_prime) {
    AngularSpectrum spec;
    try {
        if (cfg.measure.type == MeasureConfig::Type::discrete)
            spec = angular_spectrum_discrete(cfg.measure.discrete, cfg.model, cfg.kernel, l_max, t,
                                             t_prime);
        else
            spec = angular_spectrum_matern(cfg.measure.matern, cfg.model, cfg.kernel, l_max, t,
                                           t_prime);
    } catch (const NumericError& e) {
        std::cerr << "spectrum computation failed: " << e.what() << '\n';
        return kExitComputeFailure;
    }
    const fs::path out_path = fs::path(cfg.output_dir) / "spectrum.csv";
    io::CsvWriter out(out_path.string(), "l,C_l");
    double summability = 0.0;
    for (int l = 0; l <= l_max; ++l) {
        out.row(l, spec.values[l]);
        summability += (2.0 * l + 1.0) * spec.values[l];
    }
    std::cout << out_path.string() << '\n';
    std::cout << "sum_(2l+1)C_l = " << io::num(summability) << '\n';
    return 0;
}

int cmd_covariance(const RunConfig& cfg, const std::vector<double>& gammas,
                   const std::vector<double>& ts, bool from_spectrum, int l_max) {
    if (gammas.empty() || ts.empty()) {
        std::cerr << "covariance: --gamma and --t must be nonempty\n";
        return kExitUsage;
    }
    const fs::path out_path = fs::path(cfg.output_dir) / "covariance.csv";
    try {
        io::CsvWriter out(out_path.string(), "gamma_rad,t,t_prime,R");
        if (from_spectrum) {
            for (double t : ts) {
                AngularSpectrum spec;
                if (cfg.measure.type == MeasureConfig::Type::discrete)
                    spec = angular_spectrum_discrete(cfg.measure.discrete, cfg.model, cfg.kernel,
                                                     l_max, t, t);
                else
                    spec = angular_spectrum_matern(cfg.measure.matern, cfg.model, cfg.kernel, l_max,
                                                   t, t);
                for (double g : gammas) out.row(g, t, t, covariance_from_spectrum(spec, g));
            }
        } else if (cfg.measure.type == MeasureConfig::Type::discrete) {
            const auto grid = covariance_grid(cfg.measure.discrete, cfg.model, cfg.kernel, gammas, ts);
            for (std::size_t i = 0; i < gammas.size(); ++i)
                for (std::size_t j = 0; j < ts.size(); ++j)
                    out.row(gammas[i], ts[j], ts[j], grid[i][j]);
        } else {
            for (double g : gammas)
                for (double t : ts)
                    out.row(g, t, t,
                            covariance_direct(cfg.measure.matern, cfg.model, cfg.kernel,
                                              CovarianceRequest{g, t, t}));
        }
    } catch (const NumericError& e) {
        std::cerr << "covariance computation failed: " << e.what() << '\n';
        return kExitComputeFailure;
    }
    std::cout << out_path.string() << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    if (!cfg.simulation) {
        std::cerr << "simulate: config has no simulation section\n";
        return kExitUsage;
    }
    if (cfg.measure.type != MeasureConfig::Type::discrete) {
        std::cerr << "simulate: simulation requires a discrete measure (use discretize for "
                     "continuous spectra)\n";
        return kExitUsage;
    }
    const SimulationConfig& sim = *cfg.simulation;
    try {
        // Shared coefficient file: the t = 0 realization (H = 1) that every
        // requested time evolves from.
        const HarmonicCoefficients base =
            sample_coefficients(cfg.measure.discrete, cfg.model, cfg.kernel, sim, 0.0);
        const fs::path coeff_path = fs::path(cfg.output_dir) / "coefficients.csv";
        io::CsvWriter coeff_out(coeff_path.string(), "l,m,re,im");
        for (int l = 0; l <= base.l_max; ++l)
            for (int m = 0; m <= l; ++m)
                coeff_out.row(l, m, base.at(l, m).real(), base.at(l, m).imag());
        std::cout << coeff_path.string() << '\n';

        const auto evolution = simulate_evolution(cfg.measure.discrete, cfg.model, cfg.kernel, sim);
        for (std::size_t idx = 0; idx < evolution.size(); ++idx) {
            const auto& [t, grid] = evolution[idx];
            char name[64];
            std::snprintf(name, sizeof name, "grid_%03zu.csv", idx);
            const fs::path grid_path = fs::path(cfg.output_dir) / name;
            io::CsvWriter out(grid_path.string(), "theta_rad,phi_rad,value");
            for (int j = 0; j < grid.n_theta(); ++j)
                for (int k = 0; k < grid.n_phi(); ++k)
                    out.row(grid.thetas[j], grid.phis[k], grid.at(j, k));
            std::cout << grid_path.string() << "  t=" << io::num(t)
                      << "  sample_variance=" << io::num(grid.sample_variance()) << '\n';
        }
    } catch (const NumericError& e) {
        std::cerr << "simulation failed: " << e.what() << '\n';
        return kExitComputeFailure;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify: the cross-route and statistical invariant suite.

struct VerifyReport {
    int failures = 0;
    void check(const std::string& name, double measured, double tol) {
        const bool ok = measured <= tol;
        if (!ok) ++failures;
        std::printf("[%s] %-52s measured=%.3e tol=%.3e\n", ok ? "ok" : "FAIL", name.c_str(),
                    measured, tol);
    }
    void fail(const std::string& name, const std::string& why) {
        ++failures;
        std::printf("[FAIL] %-52s %s\n", name.c_str(), why.c_str());
    }
};

int cmd_verify(const RunConfig& cfg) {
    VerifyReport rep;
    const ModelParams& p = cfg.model;
    const KernelConfig& k = cfg.kernel;

    // 1. initial condition H(mu, 0) = 1 and flat start at t -> 0.
    {
        double worst = 0.0;
        for (double mu : {0.0, 0.5, 1.0, 5.0, 20.0}) {
            worst = std::max(worst, std::abs(h_eval(p, k, mu, 0.0) - 1.0));
            worst = std::max(worst, std::abs(h_eval(p, k, mu, 1e-5) - 1.0));
        }
        rep.check("initial condition H(mu,0)=1, |H(mu,1e-5)-1|", worst, 1e-6);
    }

    const std::vector<double> mus{0.5, 1.0, 2.0, 5.0, 10.0};
    const std::vector<double> ts{0.05, 0.1, 0.3, 0.5};

    // 2. series vs Laplace oracle.
    try {
        double worst = 0.0;
        int skipped = 0;
        for (double mu : mus)
            for (double t : ts) {
                try {
                    worst = std::max(worst,
                                     std::abs(h_series(p, k, mu, t) - h_laplace_oracle(p, k, mu, t)));
                } catch (const TruncationOverflow&) {
                    ++skipped;
                }
            }
        rep.check("kernel series vs Laplace oracle", worst, 1e-6);
        if (skipped)
            std::printf("       (series overflow at %d/%zu grid points; oracle route used)\n",
                        skipped, mus.size() * ts.size());
    } catch (const NumericError& e) {
        rep.fail("kernel series vs Laplace oracle", e.what());
    }

    // 3. closed form vs series when alpha == beta.
    if (p.alpha == p.beta) {
        double worst = 0.0;
        for (double mu : mus)
            for (double t : ts) {
                try {
                    worst = std::max(worst,
                                     std::abs(h_series(p, k, mu, t) - h_alpha_eq_beta(p, mu, t)));
                } catch (const NumericError&) {
                }
            }
        rep.check("kernel series vs alpha==beta closed form", worst, 1e-8);
    } else {
        ModelParams q = p;
        q.beta = q.alpha;
        if (q.alpha + q.beta > 1.0) {
            double worst = 0.0;
            for (double mu : mus)
                for (double t : ts) {
                    try {
                        worst = std::max(
                            worst, std::abs(h_series(q, k, mu, t) - h_alpha_eq_beta(q, mu, t)));
                    } catch (const NumericError&) {
                    }
                }
            rep.check("kernel series vs alpha==beta closed form", worst, 1e-8);
        }
    }

    // 4. truncation stability: doubling both term counts.
    {
        KernelConfig dbl = k;
        dbl.n_terms *= 2;
        dbl.m_terms *= 2;
        double worst = 0.0;
        for (double mu : mus)
            for (double t : ts) {
                try {
                    worst = std::max(worst, std::abs(h_series(p, k, mu, t) - h_series(p, dbl, mu, t)));
                } catch (const TruncationOverflow&) {
                }
            }
        rep.check("truncation stability (terms doubled)", worst, 1e-10);
    }

    // 5. boundedness envelope.
    {
        double worst = 0.0;
        for (double mu = 0.0; mu <= 20.0; mu += 2.5)
            for (double t = 0.0; t <= 1.0; t += 0.125)
                worst = std::max(worst, std::abs(h_eval(p, k, mu, t)));
        rep.check("kernel envelope |H| on [0,20]x[0,1]", worst, 1.5);
    }

    // Spectrum checks need a discrete measure; discretize a Matern config.
    DiscreteMeasure measure = cfg.measure.type == MeasureConfig::Type::discrete
                                  ? cfg.measure.discrete
                                  : discretize(cfg.measure.matern, 64, 30.0);

    // 6. C_l(t,t) >= 0.
    try {
        const auto spec = angular_spectrum_discrete(measure, p, k, 60, 0.1, 0.1);
        double worst = 0.0;
        for (double v : spec.values) worst = std::max(worst, -v);
        rep.check("angular spectrum nonnegativity at t=t'", worst, 0.0);
    } catch (const NumericError& e) {
        rep.fail("angular spectrum nonnegativity at t=t'", e.what());
    }

    // 7. C_l time symmetry.
    try {
        const auto a = angular_spectrum_discrete(measure, p, k, 40, 0.1, 0.3);
        const auto b = angular_spectrum_discrete(measure, p, k, 40, 0.3, 0.1);
        double worst = 0.0;
        for (int l = 0; l <= 40; ++l) worst = std::max(worst, std::abs(a.values[l] - b.values[l]));
        rep.check("angular spectrum symmetry in (t, t')", worst, 1e-12);
    } catch (const NumericError& e) {
        rep.fail("angular spectrum symmetry in (t, t')", e.what());
    }

    // 8. addition theorem: direct covariance vs Legendre reconstruction.
    try {
        const auto spec = angular_spectrum_discrete(measure, p, k, 100, 0.1, 0.1);
        const double scale = covariance_direct(measure, p, k, {0.0, 0.1, 0.1});
        double worst = 0.0;
        for (double g : {0.0, std::numbers::pi / 8, std::numbers::pi / 4, std::numbers::pi / 2,
                         3 * std::numbers::pi / 4, std::numbers::pi}) {
            const double direct = covariance_direct(measure, p, k, {g, 0.1, 0.1});
            worst = std::max(worst, std::abs(direct - covariance_from_spectrum(spec, g)));
        }
        rep.check("addition theorem (direct vs spectrum)", worst, 1e-6 * std::abs(scale));
    } catch (const NumericError& e) {
        rep.fail("addition theorem (direct vs spectrum)", e.what());
    }

    // 9. Legendre endpoint and spherical-harmonic orthonormality.
    {
        double worst = 0.0;
        for (int l = 0; l <= 200; ++l) worst = std::max(worst, std::abs(legendre_p(l, 1.0) - 1.0));
        rep.check("legendre_p(l, 1) = 1 up to l=200", worst, 0.0);
    }
    {
        const int nt = 128, np = 256;
        std::vector<double> wth(nt);
        for (int j = 0; j < nt; ++j) {
            const double th = (j + 0.5) * std::numbers::pi / nt;
            double s = 0.0;
            for (int p2 = 0; p2 < nt / 2; ++p2)
                s += std::sin((2.0 * p2 + 1.0) * th) / (2.0 * p2 + 1.0);
            wth[j] = 4.0 / nt * std::sin(th) * s;
        }
        double worst = 0.0;
        for (auto [l1, m1, l2, m2] : {std::array<int, 4>{3, 2, 3, 2}, {5, -3, 5, -3},
                                      {4, 1, 6, 1}, {7, 2, 7, -2}, {0, 0, 2, 0}}) {
            std::complex<double> acc{0.0, 0.0};
            for (int j = 0; j < nt; ++j) {
                const double th = (j + 0.5) * std::numbers::pi / nt;
                std::complex<double> row{0.0, 0.0};
                for (int kk = 0; kk < np; ++kk) {
                    const double ph = 2.0 * std::numbers::pi * kk / np;
                    row += spherical_harmonic(l1, m1, th, ph) *
                           std::conj(spherical_harmonic(l2, m2, th, ph));
                }
                acc += row * wth[j];
            }
            acc *= 2.0 * std::numbers::pi / np;
            const double expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(acc - expect));
        }
        rep.check("spherical harmonic orthonormality (grid)", worst, 1e-6);
    }

    // 10. synthesis/analysis round trip.
    try {
        SimulationConfig sim;
        sim.l_max = 10;
        sim.seed = 2024;
        sim.grid_n_theta = 128;
        sim.grid_n_phi = 256;
        const auto coeffs = sample_coefficients(measure, p, k, sim, 0.05);
        const auto grid = synthesize(coeffs, sim);
        const auto back = analyze_grid(grid, sim.l_max);
        double worst = 0.0;
        for (int l = 0; l <= sim.l_max; ++l)
            for (int m = -l; m <= l; ++m)
                worst = std::max(worst, std::abs(back.at(l, m) - coeffs.at(l, m)));
        rep.check("synthesis/analysis round trip (l<=10)", worst, 1e-4);
    } catch (const NumericError& e) {
        rep.fail("synthesis/analysis round trip (l<=10)", e.what());
    }

    // 11. Monte-Carlo spectrum recovery at reduced replicate count.
    try {
        const int n_seeds = 200;
        const double t = 0.05;
        const auto spec = angular_spectrum_discrete(measure, p, k, 5, t, t);
        SimulationConfig sim;
        sim.l_max = 5;
        double worst_sigma = 0.0;
        std::vector<double> mean(6, 0.0), m2(6, 0.0);
        std::vector<int> count(6, 0);
        for (int s = 0; s < n_seeds; ++s) {
            sim.seed = 1000 + s;
            const auto coeffs = sample_coefficients(measure, p, k, sim, t);
            for (int l : {0, 2, 5})
                for (int m = -l; m <= l; ++m) {
                    const double v = std::norm(coeffs.at(l, m));
                    ++count[l];
                    const double d = v - mean[l];
                    mean[l] += d / count[l];
                    m2[l] += d * (v - mean[l]);
                }
        }
        for (int l : {0, 2, 5}) {
            const double se = std::sqrt(m2[l] / (count[l] - 1) / count[l]);
            worst_sigma = std::max(worst_sigma, std::abs(mean[l] - spec.values[l]) / se);
        }
        rep.check("Monte-Carlo spectrum recovery (std errors)", worst_sigma, 6.0);
    } catch (const NumericError& e) {
        rep.fail("Monte-Carlo spectrum recovery (std errors)", e.what());
    }

    // 12. determinism across thread counts.
    try {
        SimulationConfig sim;
        sim.l_max = 16;
        sim.seed = 77;
        sim.grid_n_theta = 32;
        sim.grid_n_phi = 64;
        const int saved = thread_count();
        set_thread_count(1);
        const auto g1 = synthesize(sample_coefficients(measure, p, k, sim, 0.05), sim);
        set_thread_count(8);
        const auto g8 = synthesize(sample_coefficients(measure, p, k, sim, 0.05), sim);
        set_thread_count(saved);
        double worst = 0.0;
        for (std::size_t i = 0; i < g1.values.size(); ++i)
            if (g1.values[i] != g8.values[i]) worst = 1.0;
        rep.check("determinism across thread counts (bitwise)", worst, 0.0);
    } catch (const NumericError& e) {
        rep.fail("determinism across thread counts (bitwise)", e.what());
    }

    std::printf("%d check(s) failed\n", rep.failures);
    return rep.failures == 0 ? 0 : kExitVerifyFailure;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"spherical fractional hyperbolic diffusion random field toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    auto* kernel_cmd = app.add_subcommand("kernel", "evaluate the Fourier kernel H(mu, t)");
    std::vector<double> mus, ts;
    kernel_cmd->add_option("--config", config_path)->required();
    kernel_cmd->add_option("--mu", mus, "frequencies to evaluate")->expected(-1);
    kernel_cmd->add_option("--t", ts, "times to evaluate")->expected(-1);
    add_override_flags(kernel_cmd, ov);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "compute the angular power spectrum C_l");
    int l_max = 100;
    double t0 = 0.0, t1 = -1.0;
    spectrum_cmd->add_option("--config", config_path)->required();
    spectrum_cmd->add_option("--l_max", l_max);
    spectrum_cmd->add_option("--t", t0);
    spectrum_cmd->add_option("--t-prime", t1);
    add_override_flags(spectrum_cmd, ov);

    auto* cov_cmd = app.add_subcommand("covariance", "compute the covariance R(cos gamma, t, t)");
    std::vector<double> gammas, cov_ts;
    bool from_spectrum = false;
    int cov_lmax = 100;
    cov_cmd->add_option("--config", config_path)->required();
    cov_cmd->add_option("--gamma", gammas, "angular distances (radians)")->expected(-1);
    cov_cmd->add_option("--t", cov_ts, "times")->expected(-1);
    cov_cmd->add_flag("--from-spectrum", from_spectrum,
                      "reconstruct from C_l instead of the direct sum");
    cov_cmd->add_option("--l_max", cov_lmax, "spectrum order for --from-spectrum");
    add_override_flags(cov_cmd, ov);

    auto* sim_cmd = app.add_subcommand("simulate", "simulate seeded field realizations");
    sim_cmd->add_option("--config", config_path)->required();
    add_override_flags(sim_cmd, ov);

    auto* verify_cmd = app.add_subcommand("verify", "run the cross-route invariant suite");
    verify_cmd->add_option("--config", config_path)->required();
    add_override_flags(verify_cmd, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        const RunConfig cfg = prepare(config_path, ov);
        if (*kernel_cmd) return cmd_kernel(cfg, mus, ts);
        if (*spectrum_cmd) return cmd_spectrum(cfg, l_max, t0, t1 < 0.0 ? t0 : t1);
        if (*cov_cmd) return cmd_covariance(cfg, gammas, cov_ts, from_spectrum, cov_lmax);
        if (*sim_cmd) return cmd_simulate(cfg);
        if (*verify_cmd) return cmd_verify(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "computation failed: " << e.what() << '\n';
        return kExitComputeFailure;
    }
    return kExitUsage;
}
