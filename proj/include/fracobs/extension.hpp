#pragma once

// Weighted extension div(y^b grad F) = 0 on the half-strip over a periodic
// base grid, its Dirichlet-to-Neumann trace, and the angular/monotonicity
// diagnostics that live in the extension plane.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "fracobs/fields.hpp"

namespace fracobs {

/// Graded vertical nodes y_j = Y (j/m)^grade over a periodic base grid.
class StripGrid {
 public:
  StripGrid(const Grid1D& base, double s, double height, std::size_t layers);

  const Grid1D& base() const { return base_; }
  double s() const { return s_; }
  double a() const { return a_; }
  double height() const { return height_; }
  double grade() const { return grade_; }
  std::size_t layers() const { return y_.size() - 1; }
  std::span<const double> y() const { return y_; }

 private:
  Grid1D base_;
  double s_;
  double a_;
  double height_;
  double grade_;
  std::vector<double> y_;
};

enum class WeightSign { plus, minus };

enum class TopCondition {
  mean_split,   // F(., Y) = mean of the trace; constants extend to constants
  homogeneous,  // F(., Y) = 0
};

class ExtensionField {
 public:
  ExtensionField(const StripGrid& strip, double weight_exponent, std::vector<double> values);

  const StripGrid& strip() const { return strip_; }
  /// Exponent b of the weight y^b used in the solve (a or -a).
  double weight_exponent() const { return b_; }
  double at(std::size_t i, std::size_t j) const { return values_[j * strip_.base().size() + i]; }
  Field row(std::size_t j) const;
  std::span<const double> values() const { return values_; }

 private:
  StripGrid strip_;
  double b_;
  std::vector<double> values_;
};

/// Solves div(y^b grad F) = 0 with F(.,0) = f, periodic in x and Dirichlet
/// at the top, b = +a or -a. Finite volumes in y (exact cell weights and
/// face conductances for the y^b weight), second differences in x; each
/// Fourier mode in x is a symmetric tridiagonal system in y. The discrete
/// balance residual is re-evaluated in physical space and must stay below
/// 1e-10 relative, otherwise a numerical error reports it.
ExtensionField solve_extension(const Field& f, const StripGrid& strip,
                               WeightSign weight = WeightSign::plus,
                               TopCondition top = TopCondition::mean_split);

/// Fitted lim y^a F_y from layers 1..3: F - f = A y^{1-b}/(1-b) + B y^2 per
/// column, least squares, returns A.
Field dtn_trace(const ExtensionField& F);

/// c_{1,s} = 2^{1-2s} Gamma(1-s) / Gamma(s): lim y^a F_y = -c_{1,s} (-Delta)^s f.
double extension_constant(double s);

/// Per-field fit of c in -dtn = c * (-Delta)^s f against the multiplier.
double fit_extension_constant(const Field& f, const StripGrid& strip);

/// Weighted Rayleigh quotient int h'^2 sin^{-a} / int h^2 sin^{-a} over the
/// upper half circle for h(theta) = (1 - cos theta)^{1-s}, integrated with a
/// tanh-sinh rule on m_angular nodes.
double eigen_check(double s, int m_angular);

/// phi(r) = r^{-2(1-s)} int_{B_r^+(x0,0)} |grad w|^2 y^{-a} |z|^{a} dz with
/// bilinear gradients and 4x4 Gauss points per cell.
std::vector<double> monotonicity_phi(const ExtensionField& w, double x0,
                                     std::span<const double> radii);

/// Implicit extension stepper on a bounded box [-X, X] x [0, Y] with exact
/// Dirichlet data on the lateral and top sides. The trace evolves by
/// (u^{k+1} - u^k)/dt = -(1/c_{1,s}) * (flux of y^a F_y at y = 0), with the
/// bottom flux taken from the half cell so the system stays symmetric. The
/// matrix is factored once.
class BoxExtensionStepper {
 public:
  using Boundary = std::function<double(double x, double y)>;

  BoxExtensionStepper(double half_width, std::size_t cells_x, double height,
                      std::size_t layers, double s, double dt);

  std::size_t cells_x() const { return nx_; }
  double spacing() const { return hx_; }
  double x(std::size_t i) const { return -half_width_ + static_cast<double>(i) * hx_; }
  std::span<const double> y() const { return y_; }

  /// Trace at nodes 0..cells_x after one implicit step from `trace`; the end
  /// nodes and all other boundary values come from `boundary`, evaluated at
  /// the new time level by the caller.
  std::vector<double> step(std::span<const double> trace, const Boundary& boundary) const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return j * (nx_ - 1) + (i - 1); }

  double half_width_;
  std::size_t nx_;
  double hx_;
  double s_;
  double dt_;
  double c_;
  std::vector<double> y_;
  std::vector<double> volume_;
  std::vector<double> conductance_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

}  // namespace fracobs
