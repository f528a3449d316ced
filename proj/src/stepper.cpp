#include "fracobs/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fracobs/errors.hpp"

namespace fracobs {

void ProblemSpec::validate() const {
  require_fractional_order(s);
  require(std::isfinite(T) && T > 0.0, ErrorKind::parameter, "horizon T must be positive");
  require(psi.grid() == grid && u0.grid() == grid, ErrorKind::shape,
          "psi and u0 must live on the problem grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(u0[i] >= psi[i], ErrorKind::parameter, "initial datum must satisfy u0 >= psi");
  }
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::projection ? "projection" : "penalization";
}

std::string to_string(Generator generator) {
  return generator == Generator::spectral ? "spectral" : "quadrature_symbol";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "projection") return Scheme::projection;
  if (name == "penalization") return Scheme::penalization;
  fail(ErrorKind::parameter, "unknown scheme '" + name + "'");
}

Generator generator_from_string(const std::string& name) {
  if (name == "spectral") return Generator::spectral;
  if (name == "quadrature_symbol") return Generator::quadrature_symbol;
  fail(ErrorKind::parameter, "unknown generator '" + name + "'");
}

double SchemeConfig::resolved_contact_tol(const Grid1D& grid, double s) const {
  if (contact_tol >= 0.0) return contact_tol;
  return 10.0 * std::pow(grid.spacing(), 1.0 + s);
}

std::size_t ContactMask::count() const {
  return static_cast<std::size_t>(std::count(in_contact.begin(), in_contact.end(), 1));
}

namespace {

void require_penalization_stable(double dt, double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::configuration,
          "penalization requires epsilon > 0");
  require(dt <= 0.25 * epsilon, ErrorKind::configuration,
          "penalization requires dt <= epsilon/4: the forcing beta_eps(s) = exp(-s/eps) "
          "is explicit and unstable beyond that step");
}

Field penalty(const Field& u, const Field& psi, double epsilon) {
  std::vector<double> b(u.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::exp(-(u[i] - psi[i]) / epsilon);
  for (double v : b) {
    require(std::isfinite(v), ErrorKind::numerical, "penalty term overflowed");
  }
  return Field(u.grid(), std::move(b));
}

}  // namespace

Field step_projection(const Field& u, const Field& psi, const SpectralOp& op, double dt) {
  require_same_grid(u, psi, "step_projection");
  return op.implicit_solve(dt, u).max(psi);
}

Field step_penalized(const Field& u, const Field& psi, const SpectralOp& op, double dt,
                     double epsilon) {
  require_same_grid(u, psi, "step_penalized");
  require_penalization_stable(dt, epsilon);
  return op.implicit_solve(dt, u + penalty(u, psi, epsilon) * dt);
}

SpectralOp build_generator(const Grid1D& grid, double s, Generator generator) {
  if (generator == Generator::spectral) return build_spectral(grid, s);
  return build_quadrature(grid, s).as_multiplier();
}

Solution solve(const ProblemSpec& problem, const SchemeConfig& config) {
  problem.validate();
  return solve(problem, config, build_generator(problem.grid, problem.s, config.generator));
}

Solution solve(const ProblemSpec& problem, const SchemeConfig& config, const SpectralOp& op) {
  problem.validate();
  require(op.grid() == problem.grid, ErrorKind::shape, "generator lives on another grid");
  require(std::isfinite(config.dt) && config.dt > 0.0, ErrorKind::configuration,
          "time step must be positive");
  require(config.record_every >= 1, ErrorKind::configuration, "record_every must be >= 1");
  if (config.scheme == Scheme::penalization) {
    require_penalization_stable(config.dt, config.epsilon);
  }
  const auto steps = static_cast<std::size_t>(std::ceil(problem.T / config.dt - 1e-9));
  const double dt = problem.T / static_cast<double>(steps);
  const double tol = config.resolved_contact_tol(problem.grid, problem.s);

  Solution sol{.s = problem.s,
               .dt = dt,
               .contact_tol = tol,
               .scheme = config.scheme,
               .psi = problem.psi,
               .slices = {problem.u0},
               .times = {0.0},
               .slice_steps = {0},
               .monitors = {}};
  sol.monitors.reserve(steps);

  Field u = problem.u0;
  const Field& psi = problem.psi;
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < steps; ++k) {
    try {
      std::vector<double> forcing(n);
      Field next = u;
      if (config.scheme == Scheme::projection) {
        const Field v = op.implicit_solve(dt, u);
        next = v.max(psi);
        for (std::size_t i = 0; i < n; ++i) forcing[i] = (next[i] - v[i]) / dt;
      } else {
        const Field beta = penalty(u, psi, config.epsilon);
        next = op.implicit_solve(dt, u + beta * dt);
        for (std::size_t i = 0; i < n; ++i) forcing[i] = beta[i];
      }
      StepMonitor mon;
      mon.step = k + 1;
      mon.t = dt * static_cast<double>(k + 1);
      double inc_min = next[0] - u[0];
      double inc_max = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = next[i] - u[i];
        inc_min = std::min(inc_min, d);
        inc_max = std::max(inc_max, std::abs(d));
      }
      mon.min_time_increment = inc_min;
      mon.ut_linf = inc_max / dt;
      mon.lipschitz = lipschitz_norm(next);
      mon.semiconvexity = semiconvexity_constant(next);
      mon.fracheat_lower = *std::min_element(forcing.begin(), forcing.end());
      mon.fracheat_upper = *std::max_element(forcing.begin(), forcing.end());
      mon.contact_nodes = contact_mask(next, psi, tol).count();
      sol.monitors.push_back(mon);
      u = std::move(next);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(k + 1) + ": " + e.what());
    }
    if ((k + 1) % config.record_every == 0 || k + 1 == steps) {
      sol.slices.push_back(u);
      sol.times.push_back(dt * static_cast<double>(k + 1));
      sol.slice_steps.push_back(k + 1);
    }
  }
  return sol;
}

Field residual(const Solution& solution, std::size_t slice, const SpectralOp& op) {
  require(slice >= 1 && slice < solution.slices.size(), ErrorKind::index,
          "residual slice index out of range");
  const Field& u = solution.slices[slice];
  const Field& prev = solution.slices[slice - 1];
  const double dt = solution.times[slice] - solution.times[slice - 1];
  const Field au = op.apply(u);
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = std::min((u[i] - prev[i]) / dt + au[i], u[i] - solution.psi[i]);
  }
  return Field(u.grid(), std::move(r));
}

ContactMask contact_mask(const Field& u, const Field& psi, double tol) {
  require_same_grid(u, psi, "contact_mask");
  ContactMask mask;
  mask.tol = tol;
  mask.in_contact.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) mask.in_contact[i] = u[i] - psi[i] <= tol ? 1 : 0;
  return mask;
}

std::vector<std::size_t> free_boundary(const ContactMask& mask) {
  const std::size_t n = mask.in_contact.size();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.in_contact[i] != mask.in_contact[(i + n - 1) % n]) out.push_back(i);
  }
  return out;
}

std::optional<double> subcell_free_boundary(const Field& u, const Field& psi,
                                            const ContactMask& mask, std::size_t index,
                                            double p) {
  require_same_grid(u, psi, "subcell_free_boundary");
  const Grid1D& grid = u.grid();
  const std::size_t n = grid.size();
  require(index < n, ErrorKind::index, "free-boundary index out of range");
  // Detached side: the node before `index` if it is out of contact.
  const bool left_detached = mask.in_contact[(index + n - 1) % n] == 0;
  const auto start = static_cast<std::ptrdiff_t>(index) - (left_detached ? 1 : 0);
  const std::ptrdiff_t dir = left_detached ? -1 : 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double x_ref = grid.x(index);
  for (int q = 0; q < 3; ++q) {
    const std::size_t j = grid.wrap(start + dir * q);
    if (mask.in_contact[j]) return std::nullopt;
    const double gap = u[j] - psi[j];
    if (gap <= 0.0) return std::nullopt;
    const double x = static_cast<double>(start + dir * q - static_cast<std::ptrdiff_t>(index)) *
                     grid.spacing();
    const double y = std::pow(gap, 1.0 / p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / 3.0;
  if (slope == 0.0) return std::nullopt;
  const double root = -intercept / slope;
  // The root must sit on the contact side, within the contact run: with a
  // tolerance band of several cells it lies well past the flagged transition.
  const double h = grid.spacing();
  const auto idx = static_cast<std::ptrdiff_t>(index);
  const std::ptrdiff_t first_contact = left_detached ? idx : idx - 1;
  std::ptrdiff_t run = 0;
  while (run < static_cast<std::ptrdiff_t>(n) && mask.in_contact[grid.wrap(first_contact - dir * run)]) {
    ++run;
  }
  const double run_len = static_cast<double>(run) * h;
  const double lo = left_detached ? -h : -run_len - h;
  const double hi = left_detached ? run_len : h;
  if (!(root >= lo && root <= hi)) return std::nullopt;
  return x_ref + root;
}

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

Field random_bumps(Uniform& uni, const Grid1D& grid, int count, double height_lo,
                   double height_hi) {
  std::vector<double> centre(count), width(count), height(count);
  const double span = grid.width();
  for (int b = 0; b < count; ++b) {
    centre[b] = grid.x_min() + span * uni(0.25, 0.75);
    width[b] = span * uni(0.02, 0.06);
    height[b] = uni(height_lo, height_hi);
  }
  return Field::sample(grid, [&](double x) {
    double v = 0.0;
    for (int b = 0; b < count; ++b) {
      const double r = (x - centre[b]) / width[b];
      v += height[b] * std::exp(-0.5 * r * r);
    }
    return v;
  });
}

}  // namespace

ProblemSpec random_problem(std::uint64_t seed, double s, const Grid1D& grid, double T) {
  Uniform uni(seed);
  const int count = 1 + static_cast<int>(uni(0.0, 3.0));
  Field psi = random_bumps(uni, grid, count, 0.2, 1.0);
  return ProblemSpec{.s = s, .grid = grid, .psi = psi, .u0 = psi, .T = T};
}

Field random_lift(std::uint64_t seed, const Grid1D& grid, double amplitude) {
  Uniform uni(seed ^ 0x9e3779b97f4a7c15ULL);
  return random_bumps(uni, grid, 2, 0.0, amplitude);
}

}  // namespace fracobs
