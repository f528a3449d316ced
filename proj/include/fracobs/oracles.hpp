#pragma once

// Reference solutions: s = 1/2 traveling waves, the fractional heat kernel
// and the Duhamel representation of the forced linear flow.

#include <cstddef>
#include <span>
#include <vector>

#include "fracobs/fields.hpp"

namespace fracobs {

/// sin(beta pi) |x|^{1+beta} for x < 0, zero for x >= 0.
Field wave_trace(double beta, const Grid1D& grid);
double wave_trace_at(double beta, double x);

/// -rho^{1+beta} sin((1+beta) theta) in the upper half plane.
double wave_profile(double beta, double x, double y);

/// 1/tan(beta pi), exactly 0 at beta = 1/2.
double wave_speed(double beta);

struct HeatKernel {
  double s;
  double t;
  Field values;
};

/// Inverse transform of exp(-t |xi_k|^{2s}) centred at x = 0, s in (0, 1].
/// Throws a resolution error when t^{1/(2s)} < 2h.
HeatKernel heat_kernel(double s, double t, const Grid1D& grid);

/// h * sum_j k(x_j) f(x - x_j) on the periodic grid. Needs x_min/h integral
/// so that x_i - x_j is again a node.
Field convolve(const Field& kernel, const Field& f);

/// u(t) = exp(-tA) v0 + int_0^t exp(-(t-tau)A) f(tau) dtau, A = |xi|^{2s},
/// trapezoidal in tau with the tau = t endpoint kernel taken at half a step.
/// forcing[j] is f(times[j]); times starts at 0 and is increasing. Returns
/// u(times.back()).
Field duhamel_solve(const Field& v0, std::span<const Field> forcing, double s,
                    std::span<const double> times);

struct WaveConfig {
  double beta = 0.75;
  double half_width = 4.0;
  std::size_t cells = 512;
  double height = 4.0;
  std::size_t layers = 64;
  double dt = 1e-3;
  double T = 0.5;
  double fit_from = 0.1;
  double fit_to = 0.5;
};

struct WaveRun {
  double beta = 0.0;
  double exact_speed = 0.0;
  double fitted_speed = 0.0;  // -d x_f / dt over [fit_from, fit_to]
  double drift = 0.0;         // max |u(T) - u(0)| over the box trace
  std::vector<double> times;
  std::vector<double> front;  // sub-cell free boundary x_f(t)
  std::vector<double> x;
  std::vector<double> final_trace;
};

/// Evolves the s = 1/2 obstacle problem with psi = 0 from the wave trace on
/// a box [-X, X] x [0, Y] whose lateral and top sides carry the exact
/// travelling profile w(x + a t, y); each step is an implicit extension
/// solve followed by projection onto u >= 0.
WaveRun evolve_wave(const WaveConfig& config);

}  // namespace fracobs
