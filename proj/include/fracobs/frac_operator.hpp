#pragma once

// Two discrete realizations of the fractional Laplacian on a periodic grid:
// the exact Fourier multiplier |xi|^{2s} and a singular-integral quadrature
// built from the symmetric second-difference form of the kernel.

#include <span>
#include <string>
#include <vector>

#include "fracobs/fields.hpp"

namespace fracobs {

enum class MultiplierKind {
  fourier,            // |xi_k|^{2s}
  quadrature_symbol,  // exact eigenvalues of a QuadratureOp
};

std::string to_string(MultiplierKind kind);

/// Translation-invariant operator diagonal in the grid's discrete Fourier
/// basis. multiplier()[k] is the eigenvalue of DFT index k (FFT ordering,
/// k > n/2 are the negative wavenumbers).
class SpectralOp {
 public:
  SpectralOp(const Grid1D& grid, double s, std::vector<double> multiplier,
             MultiplierKind kind);

  const Grid1D& grid() const { return grid_; }
  double s() const { return s_; }
  MultiplierKind kind() const { return kind_; }
  std::span<const double> multiplier() const { return multiplier_; }

  Field apply(const Field& f) const;

  /// Solves (I + dt A) u = rhs exactly on the discrete torus.
  Field implicit_solve(double dt, const Field& rhs) const;

  /// exp(-t A) f.
  Field semigroup(double t, const Field& f) const;

  /// min/max of the resolvent kernel (I + dt A)^{-1} delta_0. Non-negative
  /// iff the implicit step is a monotone map.
  double resolvent_min_ratio(double dt) const;

 private:
  template <typename Gain>
  Field filter(const Field& f, Gain&& gain) const;

  Grid1D grid_;
  double s_;
  std::vector<double> multiplier_;
  MultiplierKind kind_;
};

SpectralOp build_spectral(const Grid1D& grid, double s);

/// Quadrature of C_{1,s} * int_0^inf (2f(x) - f(x+y) - f(x-y)) / y^{1+2s} dy.
///
/// The second difference is written D(y) = y^2 G(y); G is taken constant on
/// the first cell and piecewise linear beyond, and the y^{1-2s} moments are
/// integrated exactly. Offsets up to tail_radius() (three periods) are
/// integrated explicitly; the rest of the periodic image sum is closed with
/// an Euler-Maclaurin estimate around the analytic |y|^{-2s} tail. All
/// offsets fold onto the torus, giving nonnegative circulant weights.
class QuadratureOp {
 public:
  QuadratureOp(const Grid1D& grid, double s, double normalization);

  const Grid1D& grid() const { return grid_; }
  double s() const { return s_; }
  double normalization() const { return normalization_; }
  double tail_radius() const { return tail_radius_; }

  /// Unnormalized circulant weights K_m, m = 0..n-1 (K_0 = 0, K_m = K_{n-m}).
  std::span<const double> weights() const { return weights_; }

  /// Direct O(n^2) evaluation of C * sum_m K_m (f_i - f_{i+m}).
  Field apply(const Field& f) const;

  /// Exact eigenvalues of the circulant operator (FFT ordering).
  std::vector<double> symbol() const;

  /// Same operator as a Fourier multiplier, usable as a stepper generator.
  SpectralOp as_multiplier() const;

 private:
  Grid1D grid_;
  double s_;
  double normalization_;
  double tail_radius_;
  std::vector<double> weights_;
};

/// Quadrature operator carrying the closed-form normalization constant.
QuadratureOp build_quadrature(const Grid1D& grid, double s);
QuadratureOp build_quadrature(const Grid1D& grid, double s, double normalization);

/// C_{1,s} = s 4^s Gamma(1/2 + s) / (sqrt(pi) Gamma(1 - s)), the constant
/// that makes the kernel form agree with the multiplier |xi|^{2s}.
double normalization_constant(double s);

/// Least-squares ratio between the multiplier and the unnormalized
/// quadrature over a family of test fields.
double fit_normalization_constant(const Grid1D& grid, double s,
                                  std::span<const Field> family);

inline Field apply(const SpectralOp& op, const Field& f) { return op.apply(f); }
inline Field apply(const QuadratureOp& op, const Field& f) { return op.apply(f); }
inline Field implicit_solve(const SpectralOp& op, double dt, const Field& rhs) {
  return op.implicit_solve(dt, rhs);
}

void require_fractional_order(double s);

}  // namespace fracobs
