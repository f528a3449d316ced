#pragma once

// Exponent measurements around the free boundary: spatial decay of the gap
// u - psi and of the contact-side (-Delta)^s u, the time modulus of
// (-Delta)^s u at a tracked node, and the exponent maps delta_alpha / Phi.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracobs/fields.hpp"
#include "fracobs/frac_operator.hpp"
#include "fracobs/stepper.hpp"

namespace fracobs {

struct PowerFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  std::vector<double> radii;
  std::size_t dropped = 0;  // radii discarded because the sup vanished
};

/// Dyadic radii 4h, 8h, ... up to r_max (inclusive).
std::vector<double> dyadic_radii(const Grid1D& grid, double r_max);

/// Slope of log sup_{B_r(center)} |g| against log r. The ball is taken on
/// the piecewise-linear interpolant of g, so a real (sub-cell) centre is
/// allowed. Radii must lie in [4h, width/8].
PowerFit decay_fit(const Field& g, double center, std::span<const double> radii);
PowerFit decay_fit(const Field& g, std::size_t center_node, std::span<const double> radii);

/// Slope of log |v(t) - v(t*)| against log |t - t*| with t* = times[ref].
PowerFit time_exponent(std::span<const double> times, std::span<const double> values,
                       std::size_t ref);

/// (1/4)(alpha/(alpha+2s) - alpha/2) for 0 < alpha <= 1-s.
double delta_alpha(double alpha, double s);

/// (1+alpha)(1-s)/(1+s).
double bootstrap_phi(double alpha, double s);

struct ExponentCheck {
  std::string name;
  PowerFit fit;
  double target = 0.0;
  double tolerance = 0.0;
  bool hard = true;

  double margin() const;  // tolerance - |exponent - target|
  bool passed() const { return margin() >= 0.0; }
};

struct MonotonicityDiagnostic {
  std::vector<double> radii;
  std::vector<double> phi;
  double exponent = 0.0;  // 2 alpha + delta_alpha - a - 1
  double constant = 0.0;  // log-space least-squares C in phi ~ C (1 + r^exponent)
  double worst_ratio = 0.0;
  bool flagged = false;   // some phi(r) above 10 C (1 + r^exponent)
};

struct RegularityReport {
  double s = 0.0;
  double T = 0.0;
  double h = 0.0;
  std::size_t free_boundary_node = 0;
  double free_boundary_x = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  ExponentCheck detach;
  ExponentCheck flap;
  ExponentCheck time;
  std::size_t tracked_node = 0;
  double crossing_time = 0.0;
  MonotonicityDiagnostic monotonicity;

  std::vector<double> fit_residuals() const;
  std::vector<double> pass_margins() const;
  bool hard_checks_pass() const;
};

struct ReportOptions {
  double feature_point = 0.0;  // pick the free boundary nearest this point
  double r_max = -1.0;         // negative: width / 64
  double detach_tolerance = 0.1;
  double flap_tolerance = 0.15;
  double time_tolerance = 0.2;
  bool monotonicity = true;
};

/// Builds the report at the final slice. Throws a degenerate-data error
/// naming the regime when the final contact set is empty or the whole grid.
RegularityReport build_report(const ProblemSpec& problem, const Solution& solution,
                              const SpectralOp& op, const ReportOptions& options = {});

/// Fits C in phi(r) = C (1 + r^p) and flags violations above 10x.
MonotonicityDiagnostic monotonicity_bound(std::span<const double> radii,
                                          std::span<const double> phi, double alpha, double s);

}  // namespace fracobs
