#pragma once

// Uniform periodic grids, sampled fields, payoff constructors and the
// discrete norms used by the a-priori checks.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fracobs {

/// Uniform periodic grid on [x_min, x_max) with n_points nodes
/// x_i = x_min + i*h, h = (x_max - x_min)/n_points.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double width() const { return x_max_ - x_min_; }
  bool periodic() const { return true; }

  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * h_; }
  std::vector<double> nodes() const;

  /// Index of the node closest to x (after periodic reduction).
  std::size_t nearest_node(double x) const;

  /// Signed periodic distance x_i - x reduced to [-width/2, width/2).
  double periodic_offset(std::size_t i, double x) const;

  /// Wrap an integer offset into [0, n).
  std::size_t wrap(std::ptrdiff_t i) const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

/// Real samples on a Grid1D. Immutable after construction; every entry
/// is finite.
class Field {
 public:
  Field(const Grid1D& grid, std::vector<double> values);

  static Field zeros(const Grid1D& grid);
  static Field constant(const Grid1D& grid, double c);
  static Field sample(const Grid1D& grid, const std::function<double(double)>& f);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  Field operator+(const Field& other) const;
  Field operator-(const Field& other) const;
  Field operator*(double c) const;
  Field max(const Field& other) const;

  /// Circular shift: result[i] = this[i + offset].
  Field shifted(std::ptrdiff_t offset) const;

  double mean() const;
  double min() const;
  double max_value() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

inline Field operator*(double c, const Field& f) { return f * c; }

void require_same_grid(const Field& a, const Field& b, const char* context);

enum class PayoffKind { smoothed_put, gaussian_bump, compact_bump, zero };

struct PayoffSpec {
  PayoffKind kind = PayoffKind::zero;
  double strike = 1.0;   // smoothed_put
  double sigma = 0.05;   // smoothed_put smoothing scale
  double center = 0.0;   // bumps
  double width = 1.0;    // bumps
  double height = 1.0;   // bumps

  static PayoffSpec smoothed_put(double strike, double sigma);
  static PayoffSpec gaussian_bump(double center, double width, double height);
  static PayoffSpec compact_bump(double center, double width, double height);
  static PayoffSpec zero();

  /// Location of the payoff's main feature (log-strike or bump center).
  double feature_point() const;
};

std::string to_string(PayoffKind kind);
PayoffKind payoff_kind_from_string(const std::string& name);

/// Samples the payoff on the grid.
///
/// smoothed_put is a put in log-price, sigma*softplus((K - e^x)/sigma),
/// multiplied by a C^2 smoothstep that is 0 on the leftmost 5% of the box
/// and 1 beyond 30% so the sampled obstacle is periodic.
Field sample_payoff(const PayoffSpec& spec, const Grid1D& grid);

/// max_i |f_{i+1} - f_i| / h, periodic wrap included.
double lipschitz_norm(const Field& f);

/// max(0, -min_i (f_{i+1} + f_{i-1} - 2 f_i) / h^2) over interior nodes.
/// The seam is skipped: a periodic sample of x^2 would otherwise report a
/// concave corner at the wrap.
double semiconvexity_constant(const Field& f);

double linf_norm(const Field& f);
double linf_diff(const Field& f, const Field& g);

/// Discrete inner product h * sum f_i g_i.
double inner(const Field& f, const Field& g);

}  // namespace fracobs
