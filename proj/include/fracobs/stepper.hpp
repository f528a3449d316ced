#pragma once

// Time integration of min{u_t + (-Delta)^s u, u - psi} = 0 on the periodic
// grid: implicit resolvent followed by projection, or the exponential
// penalization with the forcing treated explicitly.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracobs/fields.hpp"
#include "fracobs/frac_operator.hpp"

namespace fracobs {

struct ProblemSpec {
  double s;
  Grid1D grid;
  Field psi;
  Field u0;
  double T;

  /// Checks s in (0,1), T > 0, shared grid and u0 >= psi.
  void validate() const;
};

enum class Scheme { projection, penalization };
enum class Generator { spectral, quadrature_symbol };

std::string to_string(Scheme scheme);
std::string to_string(Generator generator);
Scheme scheme_from_string(const std::string& name);
Generator generator_from_string(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::projection;
  double dt = 1e-3;
  double epsilon = 1e-2;       // penalization only
  double contact_tol = -1.0;   // negative: 10 h^{1+s}
  std::size_t record_every = 1;
  Generator generator = Generator::spectral;

  double resolved_contact_tol(const Grid1D& grid, double s) const;
};

/// Discrete a-priori quantities after step k -> k+1.
///
/// fracheat_lower/upper bound F = (u^{k+1} - u^k)/dt + A v over the grid,
/// where v is the pre-projection resolvent value (the implicit half of the
/// step solves exactly (v - u^k)/dt + A v = 0), so F equals the projection
/// reaction divided by dt. Under penalization F is the explicit forcing.
struct StepMonitor {
  std::size_t step = 0;
  double t = 0.0;
  double min_time_increment = 0.0;
  double lipschitz = 0.0;
  double semiconvexity = 0.0;
  double fracheat_lower = 0.0;
  double fracheat_upper = 0.0;
  double ut_linf = 0.0;
  std::size_t contact_nodes = 0;
};

struct Solution {
  double s = 0.0;
  double dt = 0.0;
  double contact_tol = 0.0;
  Scheme scheme = Scheme::projection;
  Field psi;
  std::vector<Field> slices;
  std::vector<double> times;
  std::vector<std::size_t> slice_steps;
  std::vector<StepMonitor> monitors;
};

struct ContactMask {
  std::vector<std::uint8_t> in_contact;
  double tol = 0.0;

  std::size_t count() const;
};

Field step_projection(const Field& u, const Field& psi, const SpectralOp& op, double dt);
Field step_penalized(const Field& u, const Field& psi, const SpectralOp& op, double dt,
                     double epsilon);

/// Generator for the configured kind: the Fourier multiplier or the exact
/// symbol of the kernel quadrature.
SpectralOp build_generator(const Grid1D& grid, double s, Generator generator);

Solution solve(const ProblemSpec& problem, const SchemeConfig& config);
Solution solve(const ProblemSpec& problem, const SchemeConfig& config, const SpectralOp& op);

/// min{(u^k - u^{k-1})/dt_k + A u^k, u^k - psi} for recorded slice k >= 1.
Field residual(const Solution& solution, std::size_t slice, const SpectralOp& op);

ContactMask contact_mask(const Field& u, const Field& psi, double tol);

/// Indices i where the mask differs from node i-1 (periodic).
std::vector<std::size_t> free_boundary(const ContactMask& mask);

/// Sub-cell free-boundary position at the transition `index` (as returned by
/// free_boundary): (u - psi)^{1/p} is fitted by a line on three detached
/// nodes next to the transition and extrapolated to zero. Returns nullopt
/// when the detached side is too short or the zero falls outside the
/// adjacent contact run.
std::optional<double> subcell_free_boundary(const Field& u, const Field& psi,
                                            const ContactMask& mask, std::size_t index,
                                            double p);

/// Reproducible random obstacle: a few Gaussian bumps with random centre,
/// width and height, u0 = psi. Uniforms come from the top 53 bits of
/// mt19937_64 so the sequence is identical on every platform.
ProblemSpec random_problem(std::uint64_t seed, double s, const Grid1D& grid, double T);

/// Smooth nonnegative random perturbation with the same construction.
Field random_lift(std::uint64_t seed, const Grid1D& grid, double amplitude);

}  // namespace fracobs
