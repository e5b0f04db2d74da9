// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Build target: sfhd_bench.
#include "sfhd/covariance.hpp"
#include "sfhd/fieldsim.hpp"
#include "sfhd/parallel.hpp"
#include "sfhd/spectra.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

using namespace sfhd;
using clock_type = std::chrono::steady_clock;

namespace {

DiscreteMeasure bench_measure() {
    DiscreteMeasure m;
    for (int i = 1; i <= 24; ++i) {
        const double sigma = 100.0 / i;
        m.atoms.push_back({0.5 + 1.8 * (i - 1), sigma * sigma});
    }
    return m;
}

template <typename F>
double time_ms(F&& f, int reps) {
    f(); // warm up
    const auto start = clock_type::now();
    for (int i = 0; i < reps; ++i) f();
    const auto stop = clock_type::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms, double check) {
    std::printf("%-28s %10.2f ms %10.2f ms   x%-6.2f (checksum %.6g)\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, check);
}

} // namespace

int main() {
    const ModelParams params{0.8, 1.0, 1.0, 1.0};
    const KernelConfig cfg{};
    const auto measure = bench_measure();

    std::printf("threads available: %d\n", thread_count());
    std::printf("%-28s %13s %13s   %-8s\n", "kernel", "serial", "openmp", "speedup");

    {
        double sink = 0.0;
        const double s = time_ms(
            [&] { sink = angular_spectrum_discrete_serial(measure, params, cfg, 200, 0.1, 0.1).values[2]; },
            3);
        const double p = time_ms(
            [&] { sink = angular_spectrum_discrete(measure, params, cfg, 200, 0.1, 0.1).values[2]; },
            3);
        row("angular_spectrum_discrete", s, p, sink);
    }
    {
        std::vector<double> gammas, times{0.0, 0.1, 0.5};
        for (int i = 0; i <= 180; ++i) gammas.push_back(i * std::numbers::pi / 180.0);
        double sink = 0.0;
        const double s = time_ms(
            [&] { sink = covariance_grid_serial(measure, params, cfg, gammas, times)[90][1]; }, 3);
        const double p =
            time_ms([&] { sink = covariance_grid(measure, params, cfg, gammas, times)[90][1]; }, 3);
        row("covariance_grid", s, p, sink);
    }
    SimulationConfig sim;
    sim.l_max = 100;
    sim.seed = 7;
    sim.grid_n_theta = 256;
    sim.grid_n_phi = 512;
    HarmonicCoefficients coeffs(0);
    {
        double sink = 0.0;
        const double s = time_ms(
            [&] { sink = sample_coefficients_serial(measure, params, cfg, sim, 0.05).at(2, 1).real(); },
            3);
        const double p = time_ms(
            [&] {
                coeffs = sample_coefficients(measure, params, cfg, sim, 0.05);
                sink = coeffs.at(2, 1).real();
            },
            3);
        row("sample_coefficients", s, p, sink);
    }
    {
        double sink = 0.0;
        const double s = time_ms([&] { sink = synthesize_serial(coeffs, sim).at(17, 3); }, 3);
        const double p = time_ms([&] { sink = synthesize(coeffs, sim).at(17, 3); }, 3);
        row("synthesize (256x512)", s, p, sink);
    }
    return 0;
}
