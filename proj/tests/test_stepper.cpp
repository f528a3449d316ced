#include "fracobs/errors.hpp"
#include "fracobs/stepper.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fracobs;

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec put_problem(double s, std::size_t n, double T)
{
    Grid1D g(-8.0, 8.0, n);
    Field psi = sample_payoff(PayoffSpec::smoothed_put(1.0, 0.05), g);
    return ProblemSpec{.s = s, .grid = g, .psi = psi, .u0 = psi, .T = T};
}

}  // namespace

TEST(StepProjection, inactiveConstraintIsResolvent)
{
    Grid1D g(-pi, pi, 128);
    const auto op = build_spectral(g, 0.5);
    const double dt = 0.05;
    Field u = Field::sample(g, [](double x) { return std::sin(3 * x); });
    Field out = step_projection(u, Field::constant(g, -1e6), op, dt);
    EXPECT_LE(linf_diff(out, u * (1.0 / (1.0 + dt * 3.0))), 1e-13);
}

TEST(StepProjection, saturatesAndStaysAbove)
{
    Grid1D g(-4.0, 4.0, 128);
    const auto op = build_spectral(g, 0.6);
    Field c = Field::constant(g, 0.7);
    EXPECT_LE(linf_diff(step_projection(c, c, op, 0.1), c), 1e-14);
    Field psi = sample_payoff(PayoffSpec::gaussian_bump(0.0, 0.5, 1.0), g);
    Field out = step_projection(psi, psi, op, 0.1);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(out[i], psi[i]);
    // the peak is a contact point
    EXPECT_EQ(out[g.nearest_node(0.0)], psi[g.nearest_node(0.0)]);
}

TEST(StepPenalized, farFromObstacleAndOnObstacle)
{
    Grid1D g(-pi, pi, 128);
    const auto op = build_spectral(g, 0.5);
    const double eps = 1e-2, dt = eps / 4;
    Field u = Field::sample(g, [](double x) { return std::sin(x); });
    Field low = u - Field::constant(g, 10 * eps + 1.0);
    Field far = step_penalized(u, low, op, dt, eps);
    EXPECT_LE(linf_diff(far, op.implicit_solve(dt, u)), dt * std::exp(-10.0));

    Field on = step_penalized(u, u, op, dt, eps);
    EXPECT_LE(linf_diff(on, op.implicit_solve(dt, u + Field::constant(g, dt))), 1e-14);
}

TEST(StepPenalized, refusesUnstableStep)
{
    Grid1D g(-pi, pi, 64);
    const auto op = build_spectral(g, 0.5);
    Field u = Field::zeros(g);
    try {
        step_penalized(u, u, op, 0.01, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::configuration);
        EXPECT_NE(std::string(e.what()).find("epsilon/4"), std::string::npos);
    }
}

TEST(Solve, zeroProblem)
{
    Grid1D g(-4.0, 4.0, 64);
    ProblemSpec p{.s = 0.5, .grid = g, .psi = Field::zeros(g), .u0 = Field::zeros(g), .T = 0.1};
    SchemeConfig cfg;
    cfg.dt = 0.01;
    auto sol = solve(p, cfg);
    ASSERT_EQ(sol.slices.size(), 11u);
    for (const auto& f : sol.slices) EXPECT_EQ(linf_norm(f), 0.0);
    EXPECT_LE(linf_norm(residual(sol, 3, build_spectral(g, 0.5))), 0.0);
}

TEST(Solve, rejectsInitialDatumBelowObstacle)
{
    Grid1D g(-4.0, 4.0, 64);
    ProblemSpec p{.s = 0.5, .grid = g, .psi = Field::constant(g, 1.0), .u0 = Field::zeros(g), .T = 0.1};
    EXPECT_THROW(solve(p, SchemeConfig{}), Error);
}

TEST(Solve, unconstrainedLinearFlow)
{
    Grid1D g(-pi, pi, 128);
    const double s = 0.75, T = 0.5;
    Field u0 = Field::sample(g, [](double x) { return std::sin(2 * x); });
    ProblemSpec p{.s = s, .grid = g, .psi = Field::constant(g, -1e6), .u0 = u0, .T = T};
    double prev_gap = 0.0;
    for (double dt : {2e-3, 1e-3}) {
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.record_every = 50;
        auto sol = solve(p, cfg);
        Field exact = u0 * std::exp(-T * std::pow(2.0, 2 * s));
        const double gap = linf_diff(sol.slices.back(), exact);
        EXPECT_LE(gap, 2.0 * dt);
        if (prev_gap > 0.0) EXPECT_NEAR(prev_gap / gap, 2.0, 0.4);
        prev_gap = gap;
    }
}

TEST(Solve, recordingCadenceAndMonitors)
{
    auto p = put_problem(0.5, 512, 0.1);
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.record_every = 30;
    auto sol = solve(p, cfg);
    EXPECT_EQ(sol.monitors.size(), 100u);
    ASSERT_EQ(sol.times.size(), 5u);  // 0, 30, 60, 90, 100
    EXPECT_DOUBLE_EQ(sol.times.back(), 0.1);
    for (std::size_t k = 1; k < sol.times.size(); ++k) EXPECT_GT(sol.times[k], sol.times[k - 1]);
    for (const auto& f : sol.slices)
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_GE(f[i], p.psi[i] - sol.contact_tol);
}

TEST(Solve, aPrioriBoundsOnPut)
{
    auto p = put_problem(0.75, 1024, 1.0);
    SchemeConfig cfg;
    cfg.dt = 2e-3;
    cfg.record_every = 100;
    cfg.generator = Generator::quadrature_symbol;
    const auto op = build_generator(p.grid, p.s, cfg.generator);
    auto sol = solve(p, cfg, op);
    const double apsi = linf_norm(op.apply(p.psi));
    for (const auto& m : sol.monitors) {
        EXPECT_GE(m.fracheat_lower, -1e-6);
        EXPECT_LE(m.fracheat_upper, apsi + 1e-3);
        EXPECT_GE(m.min_time_increment, -1e-10);
    }
}

TEST(Residual, regionsOfPutProblem)
{
    auto p = put_problem(0.5, 1024, 0.2);
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    const auto op = build_spectral(p.grid, p.s);
    auto sol = solve(p, cfg, op);
    const std::size_t k = sol.slices.size() - 1;
    Field r = residual(sol, k, op);
    const Field& u = sol.slices[k];
    const Field au = op.apply(u);
    const Field& prev = sol.slices[k - 1];
    auto mask = contact_mask(u, p.psi, sol.contact_tol);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == p.psi[i]) {
            EXPECT_EQ(r[i], std::min(0.0, (u[i] - prev[i]) / sol.dt + au[i]));
        } else if (!mask.in_contact[i]) {
            EXPECT_LE(std::abs((u[i] - prev[i]) / sol.dt + au[i]), 10 * sol.dt);
        }
    }
    EXPECT_THROW(residual(sol, 0, op), Error);
    EXPECT_THROW(residual(sol, sol.slices.size(), op), Error);
}

TEST(ContactMask, basicCases)
{
    Grid1D g(-1.0, 1.0, 32);
    Field psi = Field::sample(g, [](double x) { return x; });
    auto all = contact_mask(psi, psi, 1e-12);
    EXPECT_EQ(all.count(), 32u);
    EXPECT_TRUE(free_boundary(all).empty());
    auto none = contact_mask(psi + Field::constant(g, 1.0), psi, 1e-12);
    EXPECT_EQ(none.count(), 0u);
}

TEST(ContactMask, waveTraceFreeBoundaryAtOrigin)
{
    const double beta = 0.75;
    Grid1D g(-4.0, 4.0, 512);
    Field u = Field::sample(g, [&](double x) {
        return x < 0 ? std::sin(beta * pi) * std::pow(-x, 1 + beta) : 0.0;
    });
    auto mask = contact_mask(u, Field::zeros(g), 1e-12);
    auto fb = free_boundary(mask);
    const std::size_t origin = g.nearest_node(0.0);
    bool found = false;
    for (std::size_t i : fb) found = found || (i + 1 >= origin && i <= origin + 1);
    EXPECT_TRUE(found);

    // sub-cell location recovers the exact zero for pure power profiles
    Field shifted = Field::sample(g, [&](double x) {
        const double d = 0.3 * g.spacing() - x;
        return d > 0 ? std::sin(beta * pi) * std::pow(d, 1 + beta) : 0.0;
    });
    auto m2 = contact_mask(shifted, Field::zeros(g), 1e-12);
    for (std::size_t i : free_boundary(m2)) {
        if (std::abs(g.x(i)) > 0.1) continue;
        auto xf = subcell_free_boundary(shifted, Field::zeros(g), m2, i, 1 + beta);
        ASSERT_TRUE(xf.has_value());
        EXPECT_NEAR(*xf, 0.3 * g.spacing(), 1e-10);
    }
}

TEST(RandomProblem, deterministicAndValid)
{
    Grid1D g(-8.0, 8.0, 256);
    auto a = random_problem(42, 0.5, g, 0.1);
    auto b = random_problem(42, 0.5, g, 0.1);
    auto c = random_problem(43, 0.5, g, 0.1);
    EXPECT_EQ(linf_diff(a.psi, b.psi), 0.0);
    EXPECT_GT(linf_diff(a.psi, c.psi), 0.0);
    EXPECT_NO_THROW(a.validate());
    EXPECT_GE(random_lift(1, g, 0.3).min(), 0.0);
}
