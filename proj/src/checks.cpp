#include "fracobs/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <cstdio>
#include <numbers>

#include "fracobs/errors.hpp"
#include "fracobs/extension.hpp"
#include "fracobs/frac_operator.hpp"
#include "fracobs/oracles.hpp"
#include "fracobs/regularity.hpp"

namespace fracobs {

CheckResult bound_check(std::string suite, std::string name, double measured, double tolerance,
                        bool hard) {
  CheckResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.measured = measured + 0.0;  // no -0 in reports
  r.tolerance = tolerance;
  r.passed = measured <= tolerance;  // false for NaN
  r.hard = hard;
  return r;
}

ProblemSpec reference_put(double s, std::size_t nodes, double T) {
  Grid1D grid(-8.0, 8.0, nodes);
  Field psi = sample_payoff(PayoffSpec::smoothed_put(1.0, 0.05), grid);
  return ProblemSpec{.s = s, .grid = grid, .psi = psi, .u0 = psi, .T = T};
}

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

double rel_linf(const Field& a, const Field& b) { return linf_diff(a, b) / linf_norm(b); }

Field gaussian(const Grid1D& g, double width) {
  return Field::sample(g, [width](double x) { return std::exp(-(x / width) * (x / width)); });
}

CheckResult exponent_check(const ExponentCheck& c, const std::string& label) {
  CheckResult r = bound_check("exponents", c.name + " " + label,
                              std::abs(c.fit.exponent - c.target), c.tolerance, c.hard);
  r.note = fmt("fit %.4f target %.4f", c.fit.exponent, c.target);
  return r;
}

}  // namespace

namespace {

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  void add(double v) { value = std::max(value, v); }
  // An empty node set has nothing to violate.
  double get() const { return value == -std::numeric_limits<double>::infinity() ? 0.0 : value; }
};

// Nodes at least `cells` away from every transition of the mask.
std::vector<std::uint8_t> interior_of_phases(const ContactMask& mask, std::size_t cells) {
  const std::size_t n = mask.in_contact.size();
  std::vector<std::uint8_t> keep(n, 1);
  for (std::size_t i : free_boundary(mask)) {
    // transition between i-1 and i
    for (std::size_t d = 0; d < cells; ++d) {
      keep[(i + d) % n] = 0;
      keep[(i + n - 1 - d) % n] = 0;
    }
  }
  return keep;
}

}  // namespace

std::vector<CheckResult> solution_checks(const ProblemSpec& problem, const Solution& u,
                                         const SpectralOp& op) {
  const Grid1D& grid = problem.grid;
  const double h = grid.spacing();
  const double s = problem.s;
  const bool projection = u.scheme == Scheme::projection;
  const bool from_obstacle = linf_diff(problem.u0, problem.psi) == 0.0;

  Worst monotone, lipschitz, semiconvex, lower, upper, ut, sign_off, sign_on, shrink;
  const double lip0 = std::max(lipschitz_norm(problem.u0), lipschitz_norm(problem.psi));
  const double semi0 =
      std::max(semiconvexity_constant(problem.u0), semiconvexity_constant(problem.psi));
  const double apsi = linf_norm(op.apply(problem.psi));
  const double au0 = linf_norm(op.apply(problem.u0));
  for (const StepMonitor& m : u.monitors) {
    monotone.add(-m.min_time_increment);
    lipschitz.add(m.lipschitz - lip0);
    semiconvex.add(m.semiconvexity - semi0);
    lower.add(-m.fracheat_lower);
    upper.add(m.fracheat_upper - apsi);
    ut.add(m.ut_linf - au0);
  }

  // The projection scheme puts contact nodes exactly on the obstacle; the
  // tolerance band would also catch detached nodes that have barely lifted.
  const double coincidence = projection ? 0.0 : u.contact_tol;
  ContactMask prev = contact_mask(u.slices[0], problem.psi, coincidence);
  const std::size_t n = grid.size();
  for (std::size_t k = 1; k < u.slices.size(); ++k) {
    const Field& uk = u.slices[k];
    const ContactMask mask = contact_mask(uk, problem.psi, coincidence);
    const auto keep = interior_of_phases(mask, 3);
    const Field au = op.apply(uk);
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i]) continue;
      if (mask.in_contact[i]) {
        sign_on.add(-au[i]);
      } else {
        sign_off.add(au[i]);
      }
    }
    double grown = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask.in_contact[i] && !prev.in_contact[i] && !prev.in_contact[(i + 1) % n] &&
          !prev.in_contact[(i + n - 1) % n]) {
        grown += 1.0;
      }
    }
    shrink.add(grown);
    prev = mask;
  }

  const std::string suite = "monitors";
  const double dt = u.dt;
  const double bound_tol = 10.0 * (dt + h);
  const double sign_tol = 10.0 * (dt + std::pow(h, std::min(2.0 - 2.0 * s, 1.0)));
  std::vector<CheckResult> out{
      bound_check(suite, "monotone in time", monotone.get(), 1e-10),
      bound_check(suite, "lipschitz preserved", lipschitz.get(), 10.0 * h),
      bound_check(suite, "semiconvexity preserved", semiconvex.get(), bound_tol),
      bound_check(suite, "lower bound u_t + Au >= 0", lower.get(), bound_tol),
      bound_check(suite, "upper bound u_t + Au <= |A psi|", upper.get(), bound_tol),
      bound_check(suite, "u_t bound", ut.get(), bound_tol),
      bound_check(suite, "sign off contact", sign_off.get(), sign_tol),
      bound_check(suite, "sign on contact", sign_on.get(), sign_tol),
      bound_check(suite, "contact set shrinks", shrink.get(), 0.0),
  };
  // Time monotonicity and the shrinking contact set need u0 = psi; the
  // monotone-step tolerance is specific to the projection scheme.
  for (CheckResult& r : out) {
    const bool needs_obstacle_start =
        r.name == "monotone in time" || r.name == "contact set shrinks";
    if ((needs_obstacle_start && !from_obstacle) ||
        (r.name == "monotone in time" && !projection)) {
      r.skipped = true;
      r.passed = true;
    }
  }
  return out;
}

std::vector<CheckResult> lemma_batch(const LemmaBatch& batch) {
  const Grid1D grid(-4.0, 4.0, batch.nodes);
  const double s = batch.s;
  const SpectralOp op = build_generator(grid, s, batch.generator);

  SchemeConfig proj;
  proj.scheme = Scheme::projection;
  proj.dt = batch.dt;
  proj.generator = batch.generator;
  SchemeConfig pen = proj;
  pen.scheme = Scheme::penalization;
  pen.epsilon = batch.epsilon;
  pen.dt = std::min(batch.dt, 0.25 * batch.epsilon);

  Worst comparison, comparison_pen;
  std::vector<CheckResult> merged;
  for (std::size_t p = 0; p < batch.problems; ++p) {
    const std::uint64_t seed = batch.seed + p;
    const ProblemSpec base = random_problem(seed, s, grid, batch.T);
    ProblemSpec lifted = base;
    lifted.psi = base.psi + random_lift(seed, grid, 0.2);
    lifted.u0 = lifted.psi + random_lift(seed + 7919, grid, 0.2);

    const Solution u = solve(base, proj, op);
    const Solution v = solve(lifted, proj, op);
    for (std::size_t k = 0; k < u.slices.size(); ++k) {
      comparison.add((u.slices[k] - v.slices[k]).max_value());
    }
    const Solution up = solve(base, pen, op);
    const Solution vp = solve(lifted, pen, op);
    for (std::size_t k = 0; k < up.slices.size(); ++k) {
      comparison_pen.add((up.slices[k] - vp.slices[k]).max_value());
    }

    auto checks = solution_checks(base, u, op);
    if (merged.empty()) {
      merged = std::move(checks);
    } else {
      for (std::size_t c = 0; c < merged.size(); ++c) {
        merged[c].measured = std::max(merged[c].measured, checks[c].measured);
        merged[c].passed = merged[c].passed && checks[c].passed;
      }
    }
  }

  const std::string tag = fmt("s=%.2f ", s) + to_string(batch.generator);
  std::vector<CheckResult> out{
      bound_check("lemmas", "comparison projection " + tag, comparison.value, 1e-8),
      bound_check("lemmas", "comparison penalization " + tag, comparison_pen.value,
                  5.0 * batch.epsilon),
  };
  for (CheckResult& r : merged) {
    r.suite = "lemmas";
    r.name += " " + tag;
    out.push_back(std::move(r));
  }
  return out;
}


std::vector<CheckResult> operator_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  const Grid1D g(-std::numbers::pi, std::numbers::pi, 512);
  for (double s : {0.25, 0.5, 0.75}) {
    const SpectralOp op = build_spectral(g, s);
    double worst = 0.0;
    for (int k : {1, 2, 8}) {
      const Field f = Field::sample(g, [k](double x) { return std::sin(k * x); });
      worst = std::max(worst, rel_linf(op.apply(f), f * std::pow(k, 2.0 * s)));
    }
    out.push_back(bound_check("operator", fmt("eigenrelation s=%.2f", s), worst, 1e-10));
  }

  const Grid1D wide(-20.0, 20.0, 2048);
  for (double s : {0.25, 0.5, 0.75}) {
    const QuadratureOp q =
        build_quadrature(wide, s, normalization_constant(s) * options.quadrature_scale);
    const SpectralOp sp = build_spectral(wide, s);
    const Field f = gaussian(wide, 1.0);
    out.push_back(bound_check("operator", fmt("cross-realization gaussian s=%.2f", s),
                              rel_linf(q.apply(f), sp.apply(f)), 1e-3));
  }
  std::vector<Field> family;
  for (double w : {0.75, 1.0, 1.5, 2.0}) family.push_back(gaussian(wide, w));
  const double c = fit_normalization_constant(wide, 0.5, family);
  CheckResult fitted = bound_check("operator", "fitted normalization s=0.50 vs 1/pi",
                                   std::abs(c * std::numbers::pi - 1.0), 5e-3);
  fitted.note = fmt("C = %.8f", c);
  out.push_back(fitted);
  return out;
}

std::vector<CheckResult> extension_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  const Grid1D g(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi, options.full ? 512 : 256);
  for (double s : {0.5, 0.75}) {
    const StripGrid strip(g, s, 24.0, options.full ? 384 : 256);
    const SpectralOp spec = build_spectral(g, s);
    const double c = extension_constant(s);
    const std::vector<Field> family{
        Field::sample(g, [](double x) { return std::sin(x); }),
        Field::sample(g, [](double x) { return std::sin(2.0 * x); }),
        Field::sample(g, [](double x) { return std::exp(-x * x); })};
    double worst = 0.0, lo = INFINITY, hi = 0.0, worst_c = 0.0;
    for (const Field& f : family) {
      const Field lhs = dtn_trace(solve_extension(f, strip)) * (-1.0 / c);
      worst = std::max(worst, rel_linf(lhs, spec.apply(f)));
      const double fit = fit_extension_constant(f, strip);
      lo = std::min(lo, fit);
      hi = std::max(hi, fit);
      worst_c = std::max(worst_c, std::abs(fit / c - 1.0));
    }
    out.push_back(bound_check("extension", fmt("chain dtn vs spectral s=%.2f", s), worst, 0.02));
    out.push_back(
        bound_check("extension", fmt("chain fitted constant spread s=%.2f", s), (hi - lo) / lo, 0.02));
    out.push_back(
        bound_check("extension", fmt("chain fitted constant vs exact s=%.2f", s), worst_c, 0.02));
  }
  for (double s : {0.5, 0.75}) {
    const double q = eigen_check(s, 64);
    CheckResult r = bound_check("extension", fmt("eigenvalue (1-s)s at s=%.2f", s),
                                std::abs(q / ((1.0 - s) * s) - 1.0), 0.01);
    r.note = fmt("quotient %.8f expected %.8f", q, (1.0 - s) * s);
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> kernel_checks(const CheckOptions&) {
  std::vector<CheckResult> out;
  const Grid1D g(-1024.0, 1024.0, 65536);
  const HeatKernel k = heat_kernel(0.5, 1.0, g);
  double err = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    err = std::max(err, std::abs(k.values[i] - 1.0 / std::numbers::pi / (1.0 + x * x)));
    mass += k.values[i] * g.spacing();
  }
  out.push_back(bound_check("kernel", "cauchy profile s=0.50 t=1", err, 1e-6));
  out.push_back(bound_check("kernel", "unit mass s=0.50 t=1", std::abs(mass - 1.0), 1e-8));

  const Grid1D box(-64.0, 64.0, 4096);
  for (double s : {0.5, 0.75}) {
    const HeatKernel a = heat_kernel(s, 0.3, box);
    const HeatKernel b = heat_kernel(s, 0.5, box);
    const HeatKernel ab = heat_kernel(s, 0.8, box);
    out.push_back(bound_check("kernel", fmt("semigroup s=%.2f", s),
                              linf_diff(convolve(a.values, b.values), ab.values), 1e-6));
    double m = 0.0;
    for (double v : ab.values.values()) m += v * box.spacing();
    out.push_back(bound_check("kernel", fmt("unit mass s=%.2f t=0.8", s), std::abs(m - 1.0), 1e-8));
  }
  return out;
}

std::vector<CheckResult> wave_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  WaveConfig base;
  base.cells = options.full ? 1024 : 512;
  base.layers = options.full ? 128 : 64;
  for (double beta : {0.6, 0.75}) {
    WaveConfig cfg = base;
    cfg.beta = beta;
    const WaveRun run = evolve_wave(cfg);
    CheckResult r = bound_check("waves", fmt("front speed beta=%.2f", beta),
                                std::abs(run.fitted_speed / run.exact_speed - 1.0), 0.05);
    r.note = fmt("fitted %.6f exact %.6f", run.fitted_speed, run.exact_speed);
    out.push_back(r);
  }
  WaveConfig still = base;
  still.beta = 0.5;
  still.T = 1.0;
  still.fit_to = 1.0;
  const WaveRun run = evolve_wave(still);
  const double h = 2.0 * still.half_width / static_cast<double>(still.cells);
  out.push_back(bound_check("waves", "stationary drift beta=0.50 T=1", run.drift,
                            20.0 * (still.dt + std::pow(h, 1.5))));
  return out;
}

std::vector<CheckResult> lemma_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  for (double s : {0.5, 0.75}) {
    for (Generator gen : {Generator::quadrature_symbol, Generator::spectral}) {
      LemmaBatch batch;
      batch.s = s;
      batch.generator = gen;
      batch.problems = options.full ? 20 : 4;
      batch.nodes = options.full ? 512 : 256;
      batch.seed = options.seed;
      for (CheckResult& r : lemma_batch(batch)) out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CheckResult> exponent_checks(const CheckOptions&) {
  std::vector<CheckResult> out;
  for (double s : {0.5, 0.75}) {
    const ProblemSpec p = reference_put(s, 4096, 1.0);
    SchemeConfig c;
    c.dt = 1e-3;
    c.record_every = 10;
    const SpectralOp op = build_spectral(p.grid, s);
    const Solution sol = solve(p, c, op);
    const RegularityReport r = build_report(p, sol, op);
    const std::string label = fmt("s=%.2f", s);
    if (s == 0.5) out.push_back(exponent_check(r.detach, label));
    out.push_back(exponent_check(r.flap, label));
    out.push_back(exponent_check(r.time, label));
  }
  return out;
}

std::vector<CheckResult> scheme_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  const ProblemSpec p = reference_put(0.5, options.full ? 4096 : 1024, 0.5);
  const SpectralOp op = build_spectral(p.grid, 0.5);
  std::vector<double> gaps;
  for (double eps : {1e-2, 1e-3}) {
    SchemeConfig proj;
    proj.dt = eps / 4.0;
    proj.record_every = 1 << 30;
    SchemeConfig pen = proj;
    pen.scheme = Scheme::penalization;
    pen.epsilon = eps;
    const Solution a = solve(p, proj, op);
    const Solution b = solve(p, pen, op);
    gaps.push_back(linf_diff(a.slices.back(), b.slices.back()));
    out.push_back(bound_check("schemes", fmt("projection vs penalization eps=%g", eps),
                              gaps.back(), 5.0 * (eps + a.dt)));
  }
  CheckResult mono = bound_check("schemes", "gap ratio eps=1e-3 / eps=1e-2", gaps[1] / gaps[0], 1.0);
  mono.passed = gaps[1] < gaps[0];
  out.push_back(mono);
  return out;
}

std::vector<CheckResult> algebra_checks(const CheckOptions&) {
  std::vector<CheckResult> out;
  double fixed = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double s = 0.34 + 0.03 * i;
    const double fp = (1.0 - s) / (2.0 * s);
    fixed = std::max(fixed, std::abs(bootstrap_phi(fp, s) - fp));
  }
  out.push_back(bound_check("algebra", "bootstrap fixed point", fixed, 1e-12));

  double nonpositive = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double s = 0.09 * i;
    for (int j = 1; j <= 10; ++j) {
      if (!(delta_alpha((1.0 - s) * j / 10.0, s) > 0.0)) nonpositive += 1.0;
    }
  }
  out.push_back(bound_check("algebra", "delta_alpha non-positive lattice points", nonpositive, 0.0));

  for (double s : {0.4, 0.6, 0.8}) {
    const double fp = (1.0 - s) / (2.0 * s);
    double a = (1.0 - s) / (1.0 + s);
    double decreases = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double next = bootstrap_phi(a, s);
      if (next < a) decreases += 1.0;
      a = next;
    }
    out.push_back(bound_check("algebra", fmt("iteration gap after 50 steps s=%.2f", s),
                              std::abs(fp - a), 1e-10));
    out.push_back(bound_check("algebra", fmt("iteration decreases s=%.2f", s), decreases, 0.0));
  }
  return out;
}

const std::vector<Suite>& check_suites() {
  static const std::vector<Suite> suites{
      {"operator", operator_checks}, {"extension", extension_checks},
      {"kernel", kernel_checks},     {"waves", wave_checks},
      {"lemmas", lemma_checks},      {"exponents", exponent_checks},
      {"schemes", scheme_checks},    {"algebra", algebra_checks},
  };
  return suites;
}

}  // namespace fracobs
