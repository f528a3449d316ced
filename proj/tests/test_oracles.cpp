#include "fracobs/errors.hpp"
#include "fracobs/frac_operator.hpp"
#include "fracobs/oracles.hpp"
#include "fracobs/stepper.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fracobs;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Wave, traceValues)
{
    Grid1D g(-2.0, 2.0, 64);
    Field half = wave_trace(0.5, g);
    EXPECT_DOUBLE_EQ(half[g.nearest_node(-1.0)], 1.0);
    EXPECT_EQ(wave_trace(0.3, g)[g.nearest_node(1.0)], 0.0);
    EXPECT_NEAR(wave_trace(0.75, g)[g.nearest_node(-1.0)], 0.7071068, 1e-7);
    const Field w = wave_trace(0.75, g);
    for (double v : w.values()) EXPECT_GE(v, 0.0);
    EXPECT_THROW(wave_trace(1.0, g), Error);
}

TEST(Wave, speed)
{
    EXPECT_EQ(wave_speed(0.5), 0.0);
    EXPECT_NEAR(wave_speed(0.75), -1.0, 1e-14);
    EXPECT_NEAR(wave_speed(0.25), 1.0, 1e-14);
    for (double b : {0.55, 0.7, 0.9}) EXPECT_LT(wave_speed(b), 0.0);
    for (double b : {0.1, 0.3, 0.45}) EXPECT_GT(wave_speed(b), 0.0);
}

TEST(Wave, profileIsHarmonicWithTrace)
{
    const double beta = 0.6, e = 1e-3;
    EXPECT_NEAR(wave_profile(beta, -1.3, 0.0), std::sin(beta * pi) * std::pow(1.3, 1 + beta), 1e-12);
    EXPECT_NEAR(wave_profile(beta, 0.7, 0.0), 0.0, 1e-15);
    for (double x : {-1.0, 0.4}) {
        const double y = 0.8;
        const double lap = wave_profile(beta, x + e, y) + wave_profile(beta, x - e, y) +
                           wave_profile(beta, x, y + e) + wave_profile(beta, x, y - e) -
                           4 * wave_profile(beta, x, y);
        EXPECT_NEAR(lap / (e * e), 0.0, 1e-5);
    }
}

TEST(Wave, boxEvolutionMatchesSpeed)
{
    for (double beta : {0.6, 0.75}) {
        WaveConfig cfg;
        cfg.beta = beta;
        auto run = evolve_wave(cfg);
        EXPECT_NEAR(run.fitted_speed / wave_speed(beta), 1.0, 0.05) << "beta=" << beta;
    }
}

TEST(Wave, perStepDisplacementAfterTransient)
{
    WaveConfig cfg;
    cfg.beta = 0.75;
    cfg.T = 0.2;
    cfg.fit_to = 0.2;
    auto run = evolve_wave(cfg);
    // x_f = -a t = t: averaged per-step displacement over the late steps
    const std::size_t k0 = 100, k1 = 200;
    const double per_step = (run.front[k1] - run.front[k0]) / double(k1 - k0);
    EXPECT_NEAR(per_step / cfg.dt, -wave_speed(0.75), 0.1);
}

TEST(Wave, stationaryDrift)
{
    WaveConfig cfg;
    cfg.beta = 0.5;
    cfg.T = 1.0;
    cfg.fit_to = 1.0;
    auto run = evolve_wave(cfg);
    const double h = 2 * cfg.half_width / cfg.cells;
    EXPECT_LE(run.drift, 20 * (cfg.dt + std::pow(h, 1.5)));
}

TEST(HeatKernel, cauchyProfile)
{
    Grid1D g(-1024.0, 1024.0, 65536);
    auto k = heat_kernel(0.5, 1.0, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        err = std::max(err, std::abs(k.values[i] - 1.0 / pi / (1.0 + x * x)));
    }
    EXPECT_LE(err, 1e-6);
}

TEST(HeatKernel, gaussianAtOrderOne)
{
    Grid1D g(-32.0, 32.0, 2048);
    const double t = 0.7;
    auto k = heat_kernel(1.0, t, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        err = std::max(err, std::abs(k.values[i] - std::exp(-x * x / (4 * t)) / std::sqrt(4 * pi * t)));
    }
    EXPECT_LE(err, 1e-12);
}

TEST(HeatKernel, massPositivitySymmetry)
{
    Grid1D g(-64.0, 64.0, 4096);
    for (double s : {0.25, 0.5, 0.75}) {
        for (double t : {0.1, 0.5, 1.0}) {
            if (std::pow(t, 0.5 / s) < 2 * g.spacing()) continue;  // under-resolved, see below
            auto k = heat_kernel(s, t, g);
            double mass = 0.0;
            for (double v : k.values.values()) mass += v * g.spacing();
            EXPECT_NEAR(mass, 1.0, 1e-8);
            EXPECT_GE(k.values.min(), -1e-12 * k.values.max_value());
            const std::size_t c = g.nearest_node(0.0);
            for (std::size_t j = 1; j < 100; ++j) EXPECT_NEAR(k.values[c + j], k.values[c - j], 1e-12);
        }
    }
}

TEST(HeatKernel, semigroup)
{
    Grid1D g(-64.0, 64.0, 4096);
    for (double s : {0.5, 0.75}) {
        auto k1 = heat_kernel(s, 0.3, g);
        auto k2 = heat_kernel(s, 0.5, g);
        auto k12 = heat_kernel(s, 0.8, g);
        EXPECT_LE(linf_diff(convolve(k1.values, k2.values), k12.values), 1e-6);
    }
}

TEST(HeatKernel, resolutionError)
{
    Grid1D g(-1.0, 1.0, 64);
    try {
        heat_kernel(0.5, 1e-3, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolution);
    }
}

TEST(HeatKernel, fundamentalSolutionScaling)
{
    Grid1D g(-256.0, 256.0, 16384);
    for (double s : {0.5, 0.75}) {
        double lo = 1e300, hi = 0.0;
        for (double t : {0.1, 0.2, 0.5, 1.0}) {
            auto k = heat_kernel(s, t, g);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = std::abs(g.x(i));
                if (x > 10.0) continue;
                const double r = k.values[i] * (std::pow(t, (1 + 2 * s) / (2 * s)) + std::pow(x, 1 + 2 * s)) / t;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        }
        EXPECT_GT(lo, 0.0);
        EXPECT_LE(hi / lo, 50.0) << "s=" << s;
    }
}

TEST(Duhamel, diagonalAndConstantForcing)
{
    Grid1D g(-pi, pi, 128);
    const double s = 0.6;
    std::vector<double> times;
    for (int j = 0; j <= 20; ++j) times.push_back(0.05 * j);
    Field v0 = Field::sample(g, [](double x) { return std::sin(3 * x); });
    std::vector<Field> zero(times.size(), Field::zeros(g));
    Field u = duhamel_solve(v0, zero, s, times);
    EXPECT_LE(linf_diff(u, v0 * std::exp(-1.0 * std::pow(3.0, 2 * s))), 1e-13);

    std::vector<Field> ones(times.size(), Field::constant(g, 1.0));
    Field w = duhamel_solve(Field::zeros(g), ones, s, times);
    EXPECT_LE(linf_diff(w, Field::constant(g, 1.0)), 1e-13);
}

TEST(Duhamel, stepperConvergesAtFirstOrder)
{
    Grid1D g(-8.0, 8.0, 256);
    const double s = 0.5, T = 0.5;
    Field u0 = sample_payoff(PayoffSpec::gaussian_bump(0.0, 1.0, 1.0), g);
    ProblemSpec p{.s = s, .grid = g, .psi = Field::constant(g, -1e6), .u0 = u0, .T = T};
    std::vector<double> times{0.0, T};
    std::vector<Field> zero(2, Field::zeros(g));
    Field oracle = duhamel_solve(u0, zero, s, times);
    std::vector<double> gaps;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.record_every = 1000;
        gaps.push_back(linf_diff(solve(p, cfg).slices.back(), oracle));
    }
    for (std::size_t k = 1; k < gaps.size(); ++k) EXPECT_NEAR(gaps[k - 1] / gaps[k], 2.0, 0.4);
    EXPECT_LE(gaps.back() / 1e-3, 1.0);  // fitted constant C stays O(1)
}
