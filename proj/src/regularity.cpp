#include "fracobs/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "fracobs/errors.hpp"
#include "fracobs/extension.hpp"

namespace fracobs {

namespace {

// Least-squares line through (x, y); returns slope and RMS residual.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, ErrorKind::degenerate, "log-log fit needs distinct abscissae");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (intercept + slope * x[k]);
    rss += e * e;
  }
  return {slope, std::sqrt(rss / n)};
}

double interpolate(const Field& g, double x) {
  const Grid1D& grid = g.grid();
  const double t = (x - grid.x_min()) / grid.spacing();
  const double fl = std::floor(t);
  const double frac = t - fl;
  const auto i = static_cast<std::ptrdiff_t>(fl);
  return (1.0 - frac) * g[grid.wrap(i)] + frac * g[grid.wrap(i + 1)];
}

double ball_sup(const Field& g, double center, double r) {
  const Grid1D& grid = g.grid();
  double sup = std::max(std::abs(interpolate(g, center - r)), std::abs(interpolate(g, center + r)));
  const double h = grid.spacing();
  const auto lo = static_cast<std::ptrdiff_t>(std::ceil((center - r - grid.x_min()) / h));
  const auto hi = static_cast<std::ptrdiff_t>(std::floor((center + r - grid.x_min()) / h));
  for (std::ptrdiff_t i = lo; i <= hi; ++i) sup = std::max(sup, std::abs(g[grid.wrap(i)]));
  return sup;
}

}  // namespace

std::vector<double> dyadic_radii(const Grid1D& grid, double r_max) {
  std::vector<double> radii;
  for (double r = 4.0 * grid.spacing(); r <= r_max * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
  return radii;
}

PowerFit decay_fit(const Field& g, double center, std::span<const double> radii) {
  const Grid1D& grid = g.grid();
  const double r_lo = 4.0 * grid.spacing() * (1.0 - 1e-9);
  const double r_hi = grid.width() / 8.0 * (1.0 + 1e-9);
  PowerFit fit;
  std::vector<double> lx, ly;
  for (double r : radii) {
    require(r >= r_lo && r <= r_hi, ErrorKind::parameter,
            "decay radii must lie in [4h, width/8]");
    const double sup = ball_sup(g, center, r);
    if (sup == 0.0) {
      ++fit.dropped;
      continue;
    }
    fit.radii.push_back(r);
    lx.push_back(std::log(r));
    ly.push_back(std::log(sup));
  }
  require(lx.size() >= 3, ErrorKind::degenerate,
          "decay fit: fewer than 3 radii with a nonzero supremum");
  std::tie(fit.exponent, fit.residual) = fit_line(lx, ly);
  return fit;
}

PowerFit decay_fit(const Field& g, std::size_t center_node, std::span<const double> radii) {
  require(center_node < g.size(), ErrorKind::index, "decay fit centre out of range");
  return decay_fit(g, g.grid().x(center_node), radii);
}

PowerFit time_exponent(std::span<const double> times, std::span<const double> values,
                       std::size_t ref) {
  require(times.size() == values.size(), ErrorKind::shape, "time series length mismatch");
  require(times.size() >= 8, ErrorKind::data, "time exponent needs at least 8 samples");
  require(ref < times.size(), ErrorKind::index, "reference sample out of range");
  double lag_min = INFINITY, lag_max = 0.0;
  std::vector<double> lx, ly;
  PowerFit fit;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (j == ref) continue;
    const double lag = std::abs(times[j] - times[ref]);
    require(lag > 0.0, ErrorKind::data, "time series has repeated times");
    lag_min = std::min(lag_min, lag);
    lag_max = std::max(lag_max, lag);
    const double inc = std::abs(values[j] - values[ref]);
    if (inc == 0.0) {
      ++fit.dropped;
      continue;
    }
    fit.radii.push_back(lag);
    lx.push_back(std::log(lag));
    ly.push_back(std::log(inc));
  }
  require(lag_max >= 4.0 * lag_min, ErrorKind::data,
          "time series spans fewer than 2 dyadic scales");
  require(lx.size() >= 3, ErrorKind::degenerate, "time series has (almost) no increments");
  std::tie(fit.exponent, fit.residual) = fit_line(lx, ly);
  return fit;
}

double delta_alpha(double alpha, double s) {
  require_fractional_order(s);
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0 - s, ErrorKind::parameter,
          "delta_alpha needs 0 < alpha <= 1 - s");
  return 0.25 * (alpha / (alpha + 2.0 * s) - 0.5 * alpha);
}

double bootstrap_phi(double alpha, double s) { return (1.0 + alpha) * (1.0 - s) / (1.0 + s); }

double ExponentCheck::margin() const { return tolerance - std::abs(fit.exponent - target); }

std::vector<double> RegularityReport::fit_residuals() const {
  return {detach.fit.residual, flap.fit.residual, time.fit.residual};
}

std::vector<double> RegularityReport::pass_margins() const {
  return {detach.margin(), flap.margin(), time.margin()};
}

bool RegularityReport::hard_checks_pass() const { return detach.passed() && flap.passed(); }

MonotonicityDiagnostic monotonicity_bound(std::span<const double> radii,
                                          std::span<const double> phi, double alpha, double s) {
  require(radii.size() == phi.size() && !radii.empty(), ErrorKind::shape,
          "monotonicity bound needs one phi per radius");
  MonotonicityDiagnostic d;
  d.radii.assign(radii.begin(), radii.end());
  d.phi.assign(phi.begin(), phi.end());
  const double a = 1.0 - 2.0 * s;
  d.exponent = 2.0 * alpha + delta_alpha(alpha, s) - a - 1.0;
  // C is fitted in log space so that a single outlier cannot absorb itself.
  double log_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (phi[k] <= 0.0) continue;
    log_sum += std::log(phi[k] / (1.0 + std::pow(radii[k], d.exponent)));
    ++used;
  }
  if (used == 0) return d;
  d.constant = std::exp(log_sum / static_cast<double>(used));
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double b = 1.0 + std::pow(radii[k], d.exponent);
    d.worst_ratio = std::max(d.worst_ratio, phi[k] / (d.constant * b));
  }
  d.flagged = d.worst_ratio > 10.0;
  return d;
}

RegularityReport build_report(const ProblemSpec& problem, const Solution& solution,
                              const SpectralOp& op, const ReportOptions& options) {
  require(solution.slices.size() >= 8, ErrorKind::data,
          "regularity report needs at least 8 recorded slices");
  const Grid1D& grid = problem.grid;
  const double s = problem.s;
  const Field& u = solution.slices.back();
  const Field& psi = problem.psi;
  const double tol = solution.contact_tol;

  const ContactMask mask = contact_mask(u, psi, tol);
  if (mask.count() == grid.size()) {
    fail(ErrorKind::degenerate, "no free boundary: contact everywhere (fully stuck)");
  }
  if (mask.count() == 0) {
    fail(ErrorKind::degenerate, "no free boundary: fully detached (no contact at final time)");
  }
  const auto transitions = free_boundary(mask);

  RegularityReport report;
  report.s = s;
  report.T = solution.times.back();
  report.h = grid.spacing();
  std::size_t best = transitions.front();
  double best_dist = INFINITY;
  for (std::size_t i : transitions) {
    const double d = std::abs(grid.periodic_offset(i, options.feature_point));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  report.free_boundary_node = best;
  const auto sub = subcell_free_boundary(u, psi, mask, best, 1.0 + s);
  report.free_boundary_x = sub ? *sub : grid.x(best) - 0.5 * grid.spacing();

  const double r_max = options.r_max > 0.0 ? options.r_max : grid.width() / 64.0;
  const auto radii = dyadic_radii(grid, r_max);
  require(radii.size() >= 3, ErrorKind::resolution,
          "fewer than 3 dyadic radii between 4h and r_max");
  report.r_min = radii.front();
  report.r_max = radii.back();

  std::vector<double> gap(grid.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::abs(u[i] - psi[i]);
  report.detach = ExponentCheck{"alpha_space_detach",
                                decay_fit(Field(grid, gap), report.free_boundary_x, radii),
                                1.0 + s, options.detach_tolerance, true};

  // The projection scheme enforces u = psi exactly, so its coincidence set
  // is used for the flap. Nodes inside the tolerance band but off the
  // obstacle carry Au = -u_t < 0 and a grid-scale spike at the first
  // detached node, which would pin the supremum at every radius.
  const ContactMask flap_mask =
      solution.scheme == Scheme::projection ? contact_mask(u, psi, 0.0) : mask;
  const Field au = op.apply(u);
  std::vector<double> flap(grid.size());
  for (std::size_t i = 0; i < flap.size(); ++i) flap[i] = flap_mask.in_contact[i] ? au[i] : 0.0;
  const Field flap_field(grid, flap);
  report.flap = ExponentCheck{"alpha_space_flap",
                              decay_fit(flap_field, report.free_boundary_x, radii), 1.0 - s,
                              options.flap_tolerance, true};

  // Time modulus at the free-boundary node with the longest contact history.
  const std::size_t slices = solution.slices.size();
  std::vector<std::vector<std::uint8_t>> history(slices);
  for (std::size_t k = 0; k < slices; ++k) {
    history[k] = contact_mask(solution.slices[k], psi, tol).in_contact;
  }
  const std::size_t n = grid.size();
  std::size_t tracked = n;
  std::size_t longest = 0;
  for (std::size_t cand : {(best + n - 1) % n, best}) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < slices; ++k) count += history[k][cand];
    if (tracked == n || count > longest || (count == longest && cand < tracked)) {
      tracked = cand;
      longest = count;
    }
  }
  std::size_t ref = slices - 1;
  for (std::size_t k = slices - 1; k >= 1; --k) {
    if (history[k][tracked] != history[k - 1][tracked]) {
      ref = k;
      break;
    }
  }
  report.tracked_node = tracked;
  report.crossing_time = solution.times[ref];
  std::vector<double> series(slices);
  for (std::size_t k = 0; k < slices; ++k) series[k] = op.apply(solution.slices[k])[tracked];
  const double time_target = std::min((1.0 - s) / (2.0 * s), 1.0);
  report.time = ExponentCheck{"alpha_time", PowerFit{}, time_target, options.time_tolerance, false};
  try {
    report.time.fit = time_exponent(solution.times, series, ref);
  } catch (const Error&) {
    report.time.fit = PowerFit{};  // report-only: a missing fit shows up as a failed margin
  }

  if (options.monotonicity) {
    const double height = grid.width() / 4.0;
    const StripGrid strip(grid, s, height, 256);
    const ExtensionField w = solve_extension(flap_field, strip, WeightSign::minus);
    const auto phi = monotonicity_phi(w, report.free_boundary_x, radii);
    const double alpha = std::clamp(report.flap.fit.exponent, 1e-3, 1.0 - s);
    report.monotonicity = monotonicity_bound(radii, phi, alpha, s);
  }
  return report;
}

}  // namespace fracobs
