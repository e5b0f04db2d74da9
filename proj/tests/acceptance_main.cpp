// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 11 drives the installed CLI binary end to end when
// SFHD_BIN points at it.
#include "sfhd/config.hpp"
#include "sfhd/covariance.hpp"
#include "sfhd/exceptions.hpp"
#include "sfhd/fieldsim.hpp"
#include "sfhd/kernel.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/rng.hpp"
#include "sfhd/specfun.hpp"
#include "sfhd/spectra.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"

using namespace sfhd;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const KernelConfig kCfg{};
int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<std::pair<double, double>> general_grid() {
    std::vector<std::pair<double, double>> g;
    for (double a : {0.6, 0.8, 1.0})
        for (double b : {0.5, 0.8, 1.0})
            if (a + b > 1.0 && a + b <= 2.0) g.emplace_back(a, b);
    return g;
}

const std::vector<double> kMus{0.5, 1.0, 2.0, 5.0, 10.0};
const std::vector<double> kTs{0.05, 0.1, 0.3, 0.5};

// 1. H(mu, 0) = 1 exactly and |H(mu, 1e-5) - 1| <= 1e-6.
void criterion_1() {
    bool exact = true;
    double worst = 0.0;
    int n_over = 0, n_pts = 0;
    double worst_ratio = 0.0; // measured / leading short-time term
    for (auto [a, b] : general_grid()) {
        const ModelParams p{a, b, 1.0, 1.0};
        for (double mu : {0.0, 0.5, 1.0, 5.0, 20.0}) {
            ++n_pts;
            if (h_eval(p, kCfg, mu, 0.0) != 1.0) exact = false;
            const double dev = std::abs(h_eval(p, kCfg, mu, 1e-5) - 1.0);
            worst = std::max(worst, dev);
            if (dev > 1e-6) ++n_over;
            if (mu > 0.0) {
                const double leading =
                    mu * mu * std::pow(1e-5, a + b) * std::exp(-log_gamma(a + b + 1.0));
                worst_ratio = std::max(worst_ratio, dev / leading);
            }
        }
    }
    char buf[280];
    std::snprintf(buf, sizeof buf,
                  "exact at t=0: %s; worst |H(mu,1e-5)-1| = %.3e vs stated bound 1e-6, exceeded "
                  "at %d/%d points; measured/leading-term mu^2 c^2 t^(a+b)/Gamma(a+b+1) <= %.4f, "
                  "so the 1e-6 bound is unreachable for small alpha+beta at large mu",
                  exact ? "yes" : "no", worst, n_over, n_pts, worst_ratio);
    report(1, "initial-condition identity", exact && worst <= 1e-6, buf);
}

// 2. alpha = beta: series vs closed form <= 1e-8 and series vs oracle <= 1e-6.
void criterion_2() {
    double worst_ab = 0.0, worst_or = 0.0;
    int n_overflow = 0, n_branch = 0;
    bool fallback_ok = true;
    for (double a : {0.6, 0.8, 1.0}) {
        const ModelParams p{a, a, 1.0, 1.0};
        for (double mu : kMus)
            for (double t : kTs) {
                double hs = 0.0;
                bool have_series = true;
                try {
                    hs = h_series(p, kCfg, mu, t);
                } catch (const TruncationOverflow&) {
                    have_series = false;
                    ++n_overflow;
                }
                const double ho = h_laplace_oracle(p, kCfg, mu, t);
                double hab = 0.0;
                bool have_ab = true;
                try {
                    hab = h_alpha_eq_beta(p, mu, t);
                } catch (const BranchPointSingularity&) {
                    have_ab = false;
                    ++n_branch;
                } catch (const TruncationOverflow&) {
                    have_ab = false;
                }
                if (have_series && have_ab)
                    worst_ab = std::max(worst_ab, std::abs(hs - hab));
                if (have_series) worst_or = std::max(worst_or, std::abs(hs - ho));
                // at series-overflow points the dispatcher's fallback must
                // still agree with the closed form at oracle tolerance
                if (!have_series && have_ab && std::abs(ho - hab) > 1e-6) fallback_ok = false;
            }
    }
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "worst |series-closed| = %.2e <= 1e-8, worst |series-oracle| = %.2e <= 1e-6; "
                  "series overflow at %d pts (oracle fallback verified), branch point at %d pts",
                  worst_ab, worst_or, n_overflow, n_branch);
    report(2, "triple-route agreement, alpha = beta", worst_ab <= 1e-8 && worst_or <= 1e-6 && fallback_ok,
           buf);
}

// 3. classical case: series vs cosh/cos closed form <= 1e-8 on both branches.
void criterion_3() {
    const ModelParams p{1.0, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (double mu : kMus)
        for (double t : kTs)
            worst = std::max(worst, std::abs(h_series(p, kCfg, mu, t) - h_classical(p, mu, t)));
    char buf[120];
    std::snprintf(buf, sizeof buf, "worst |series-classical| = %.2e <= 1e-8 (mu <= 1/2 and mu > 1/2)",
                  worst);
    report(3, "classical-case agreement", worst <= 1e-8, buf);
}

// 4. general (alpha, beta): series vs oracle <= 1e-6.
void criterion_4() {
    double worst = 0.0;
    int n_overflow = 0;
    bool fallback_ok = true;
    for (auto [a, b] : general_grid()) {
        if (a == b) continue;
        const ModelParams p{a, b, 1.0, 1.0};
        for (double mu : kMus)
            for (double t : kTs) {
                try {
                    worst = std::max(worst,
                                     std::abs(h_series(p, kCfg, mu, t) - h_laplace_oracle(p, kCfg, mu, t)));
                } catch (const TruncationOverflow&) {
                    ++n_overflow;
                    HRoute route;
                    const double v = h_eval(p, kCfg, mu, t, &route);
                    if (route != HRoute::laplace || !std::isfinite(v)) fallback_ok = false;
                }
            }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "worst |series-oracle| = %.2e <= 1e-6; series overflow at %d pts (oracle "
                  "fallback verified)",
                  worst, n_overflow);
    report(4, "general-(alpha,beta) oracle agreement", worst <= 1e-6 && fallback_ok, buf);
}

// 5. truncation stability: doubling 80 -> 160 changes h_series by <= 1e-10.
void criterion_5() {
    KernelConfig dbl = kCfg;
    dbl.n_terms = 160;
    dbl.m_terms = 160;
    double worst = 0.0;
    int skipped = 0;
    for (auto [a, b] : general_grid()) {
        const ModelParams p{a, b, 1.0, 1.0};
        for (double mu : kMus)
            for (double t : kTs) {
                try {
                    worst = std::max(worst,
                                     std::abs(h_series(p, kCfg, mu, t) - h_series(p, dbl, mu, t)));
                } catch (const TruncationOverflow&) {
                    ++skipped;
                }
            }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "worst |H_80 - H_160| = %.2e <= 1e-10; %d overflow pts skipped",
                  worst, skipped);
    report(5, "truncation stability 80 -> 160", worst <= 1e-10, buf);
}

// 6. addition theorem on the section-4 measure.
void criterion_6() {
    const auto m = oracles::section4_measure();
    double worst_rel = 0.0;
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.8, 1.0}, {1.0, 0.8}, {0.8, 0.8}}) {
        const ModelParams p{a, b, 1.0, 1.0};
        const auto spec = angular_spectrum_discrete(m, p, kCfg, 100, 0.1, 0.1);
        const double scale = std::abs(covariance_direct(m, p, kCfg, {0.0, 0.1, 0.1}));
        for (double g : {0.0, kPi / 8, kPi / 4, kPi / 2, 3 * kPi / 4, kPi}) {
            const double direct = covariance_direct(m, p, kCfg, {g, 0.1, 0.1});
            const double recon = covariance_from_spectrum(spec, g);
            worst_rel = std::max(worst_rel, std::abs(direct - recon) / scale);
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "worst |direct-spectrum| / R(1) = %.2e <= 1e-6", worst_rel);
    report(6, "addition-theorem consistency", worst_rel <= 1e-6, buf);
}

// 7. Example-2 branch-split equivalence for the Matern spectrum: the
// cosh/sinh factor on mu <= c/2D plus the cos/sin factor on mu > c/2D,
// integrated separately, must reassemble the single-integral C_l.
void criterion_7() {
    const MaternSpectrum spec{1.0, 1.0, 2.0};
    const ModelParams p{1.0, 1.0, 1.0, 1.0};
    const double t = 0.1;
    const double c = p.c, D = p.d_coef;
    const double boundary = c / (2.0 * D);
    const double pref = std::exp(-c * c * t / (2.0 * D));
    const auto cl = angular_spectrum_matern(spec, p, kCfg, 5, t, t);
    auto h1_bar = [&](double mu) {
        const double w = std::sqrt(c * c / (4.0 * D * D) - mu * mu);
        return w == 0.0 ? pref * (1.0 + c * c * t / (2.0 * D))
                        : pref * (std::cosh(c * t * w) + c / (2.0 * D * w) * std::sinh(c * t * w));
    };
    auto h2_bar = [&](double mu) {
        const double w = std::sqrt(mu * mu - c * c / (4.0 * D * D));
        return w == 0.0 ? pref * (1.0 + c * c * t / (2.0 * D))
                        : pref * (std::cos(c * t * w) + c / (2.0 * D * w) * std::sin(c * t * w));
    };
    double worst_rel = 0.0;
    for (int l : {0, 2, 5}) {
        auto common = [&](double mu) {
            if (mu == 0.0) return 0.0;
            const double j = spherical_bessel(l, mu);
            return 16.0 * kPi * kPi * mu * mu * j * j * matern_density(spec, mu);
        };
        const double low = oracles::trapezoid(
            [&](double mu) {
                const double h = h1_bar(std::min(mu, boundary));
                return common(mu) * h * h;
            },
            0.0, boundary, 12000);
        const double high = oracles::trapezoid(
            [&](double mu) {
                const double h = h2_bar(std::max(mu, boundary));
                return common(mu) * h * h;
            },
            boundary, 400.0, 2400000);
        const double split = low + high;
        worst_rel = std::max(worst_rel, std::abs(cl.values[l] - split) / std::abs(split));
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "worst relative split difference = %.2e <= 1e-7", worst_rel);
    report(7, "Example-2 branch-split equivalence", worst_rel <= 1e-7, buf);
}

// 8. Monte-Carlo spectrum recovery, 2000 seeds, pooled over m.
void criterion_8() {
    const auto m = oracles::section4_measure();
    const ModelParams p{0.8, 1.0, 1.0, 1.0};
    const double t = 0.05;
    const int l_max = 20;
    const auto spec = angular_spectrum_discrete(m, p, kCfg, l_max, t, t);
    SimulationConfig sim;
    sim.l_max = l_max;
    const int n_seeds = 2000;
    std::vector<double> mean(l_max + 1, 0.0), m2(l_max + 1, 0.0);
    std::vector<long> count(l_max + 1, 0);
    for (int s = 0; s < n_seeds; ++s) {
        sim.seed = 50000 + s;
        const auto coeffs = sample_coefficients(m, p, kCfg, sim, t);
        for (int l : {0, 1, 2, 5, 10, 20})
            for (int mm = -l; mm <= l; ++mm) {
                const double v = std::norm(coeffs.at(l, mm));
                ++count[l];
                const double d = v - mean[l];
                mean[l] += d / count[l];
                m2[l] += d * (v - mean[l]);
            }
    }
    double worst_sig = 0.0;
    for (int l : {0, 1, 2, 5, 10, 20}) {
        const double se = std::sqrt(m2[l] / (count[l] - 1) / count[l]);
        worst_sig = std::max(worst_sig, std::abs(mean[l] - spec.values[l]) / se);
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "worst deviation = %.2f standard errors <= 4", worst_sig);
    report(8, "Monte-Carlo spectrum recovery", worst_sig <= 4.0, buf);
}

// 9. synthesis/analysis round trip at l_max = 20 on a 256 x 512 grid.
void criterion_9() {
    SimulationConfig sim;
    sim.l_max = 20;
    sim.grid_n_theta = 256;
    sim.grid_n_phi = 512;
    HarmonicCoefficients coeffs(20, 0.0);
    for (int l = 0; l <= 20; ++l) {
        coeffs.at(l, 0) = rng::gaussian_pair(12345, l, 0, 0).first;
        for (int mm = 1; mm <= l; ++mm) {
            const auto [g1, g2] = rng::gaussian_pair(12345, l, mm, 0);
            coeffs.at(l, mm) = {g1, g2};
            coeffs.at(l, -mm) = (mm % 2 == 0 ? 1.0 : -1.0) * std::conj(coeffs.at(l, mm));
        }
    }
    const auto grid = synthesize(coeffs, sim);
    const auto back = analyze_grid(grid, 20);
    double worst = 0.0;
    for (int l = 0; l <= 20; ++l)
        for (int mm = -l; mm <= l; ++mm)
            worst = std::max(worst, std::abs(back.at(l, mm) - coeffs.at(l, mm)));
    char buf[120];
    std::snprintf(buf, sizeof buf, "worst coefficient error = %.2e <= 1e-4", worst);
    report(9, "synthesis round-trip", worst <= 1e-4, buf);
}

// 10. computed qualitative trends.
void criterion_10() {
    // (a) H at mu=1, t=0.1, beta=1 decreases when alpha drops 1.0 -> 0.8
    const double h10 = h_eval(ModelParams{1.0, 1.0, 1.0, 1.0}, kCfg, 1.0, 0.1);
    const double h08 = h_eval(ModelParams{0.8, 1.0, 1.0, 1.0}, kCfg, 1.0, 0.1);
    const bool a_ok = h08 < h10;

    // (b) single-realization smoothing for alpha = beta = 1, c = 1, D = 2
    const ModelParams psim{1.0, 1.0, 1.0, 2.0};
    const auto m2b = oracles::two_band_measure();
    SimulationConfig sim;
    sim.l_max = 100;
    sim.seed = 2718;
    sim.grid_n_theta = 64;
    sim.grid_n_phi = 128;
    sim.times = {0.0, 0.05};
    const auto evo = simulate_evolution(m2b, psim, kCfg, sim);
    const bool b_ok = evo[1].second.sample_variance() < evo[0].second.sample_variance();

    // (c) C_l(0.1, 0.1) < C_l(0, 0) for l in {2, 5, 10} on the section-4 measure
    const auto m = oracles::section4_measure();
    const ModelParams p{0.8, 1.0, 1.0, 1.0};
    const auto c0 = angular_spectrum_discrete(m, p, kCfg, 10, 0.0, 0.0);
    const auto ct = angular_spectrum_discrete(m, p, kCfg, 10, 0.1, 0.1);
    bool c_ok = true;
    for (int l : {2, 5, 10}) c_ok = c_ok && ct.values[l] < c0.values[l];

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "(a) H drops with alpha: %s; (b) var(t=0.05) < var(0): %s; (c) C_l decays in t: %s",
                  a_ok ? "yes" : "no", b_ok ? "yes" : "no", c_ok ? "yes" : "no");
    report(10, "qualitative trends", a_ok && b_ok && c_ok, buf);
}

// 11. bitwise-identical CLI simulate runs at 1, 2 and 8 threads.
void criterion_11() {
    const char* bin = std::getenv("SFHD_BIN");
    if (!bin) {
        report(11, "CLI determinism across thread counts", false,
               "SFHD_BIN not set; cannot drive the CLI binary");
        return;
    }
    const fs::path work = fs::temp_directory_path() / "sfhd_acceptance_det";
    fs::remove_all(work);
    fs::create_directories(work);

    nlohmann::json cfg = {
        {"model", {{"alpha", 0.8}, {"beta", 1.0}, {"c", 1.0}, {"d_coef", 1.0}}},
        {"measure",
         {{"type", "discrete"},
          {"atoms", nlohmann::json::array()}}},
        {"simulation",
         {{"l_max", 32},
          {"seed", 97531},
          {"times", {0.0, 0.05}},
          {"grid_n_theta", 36},
          {"grid_n_phi", 72}}},
    };
    for (int i = 1; i <= 10; ++i) {
        const double sigma = 100.0 / i;
        cfg["measure"]["atoms"].push_back(
            {{"mu", 1.0 + 4.0 * (i - 1)}, {"sigma2", sigma * sigma}});
    }

    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    bool ok = true;
    std::string detail = "runs at threads {1,2,8} x2 produced identical bytes";
    std::vector<std::string> baseline;
    for (int threads : {1, 2, 8}) {
        for (int run = 0; run < 2; ++run) {
            const fs::path dir = work / ("t" + std::to_string(threads) + "_r" + std::to_string(run));
            fs::create_directories(dir);
            nlohmann::json c = cfg;
            c["output_dir"] = dir.string();
            const fs::path cfg_path = dir / "config.json";
            std::ofstream(cfg_path) << c.dump(2);
            const std::string cmd = "SFHD_THREADS=" + std::to_string(threads) + " \"" +
                                    std::string(bin) + "\" simulate --config \"" +
                                    cfg_path.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                ok = false;
                detail = "sfhd simulate exited nonzero";
                break;
            }
            std::vector<std::string> contents;
            for (const char* name : {"coefficients.csv", "grid_000.csv", "grid_001.csv"})
                contents.push_back(read_file(dir / name));
            if (baseline.empty()) {
                baseline = contents;
            } else if (contents != baseline) {
                ok = false;
                detail = "outputs differ between runs (threads=" + std::to_string(threads) + ")";
            }
        }
        if (!ok) break;
    }
    fs::remove_all(work);
    report(11, "CLI determinism across thread counts", ok, detail);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ALL PASS" : "FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
