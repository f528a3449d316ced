#include "fracobs/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "fracobs/errors.hpp"

namespace fracobs {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::data: return "data error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::degenerate: return "degenerate-data error";
    case ErrorKind::index: return "index error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), h_(0.0) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max,
          ErrorKind::parameter, "grid requires finite x_min < x_max");
  require(n_points >= 4 && std::has_single_bit(n_points), ErrorKind::parameter,
          "grid size must be a power of two >= 4");
  h_ = (x_max_ - x_min_) / static_cast<double>(n_);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t Grid1D::nearest_node(double xq) const {
  double t = (xq - x_min_) / h_;
  auto k = static_cast<std::ptrdiff_t>(std::llround(t));
  return wrap(k);
}

double Grid1D::periodic_offset(std::size_t i, double xq) const {
  const double w = width();
  double d = x(i) - xq;
  d -= w * std::floor(d / w + 0.5);
  return d;
}

std::size_t Grid1D::wrap(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  std::ptrdiff_t r = i % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

Field::Field(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorKind::shape,
          "field length does not match grid size");
  for (double v : values_) {
    require(std::isfinite(v), ErrorKind::data, "field contains non-finite values");
  }
}

Field Field::zeros(const Grid1D& grid) {
  return Field(grid, std::vector<double>(grid.size(), 0.0));
}

Field Field::constant(const Grid1D& grid, double c) {
  return Field(grid, std::vector<double>(grid.size(), c));
}

Field Field::sample(const Grid1D& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
  return Field(grid, std::move(v));
}

void require_same_grid(const Field& a, const Field& b, const char* context) {
  require(a.grid() == b.grid(), ErrorKind::shape,
          std::string(context) + ": fields live on different grids");
}

Field Field::operator+(const Field& other) const {
  require_same_grid(*this, other, "field sum");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return Field(grid_, std::move(v));
}

Field Field::operator-(const Field& other) const {
  require_same_grid(*this, other, "field difference");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
  return Field(grid_, std::move(v));
}

Field Field::operator*(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return Field(grid_, std::move(v));
}

Field Field::max(const Field& other) const {
  require_same_grid(*this, other, "field max");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], other.values_[i]);
  return Field(grid_, std::move(v));
}

Field Field::shifted(std::ptrdiff_t offset) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = values_[grid_.wrap(static_cast<std::ptrdiff_t>(i) + offset)];
  }
  return Field(grid_, std::move(v));
}

double Field::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

PayoffSpec PayoffSpec::smoothed_put(double strike, double sigma) {
  PayoffSpec p;
  p.kind = PayoffKind::smoothed_put;
  p.strike = strike;
  p.sigma = sigma;
  return p;
}

PayoffSpec PayoffSpec::gaussian_bump(double center, double width, double height) {
  PayoffSpec p;
  p.kind = PayoffKind::gaussian_bump;
  p.center = center;
  p.width = width;
  p.height = height;
  return p;
}

PayoffSpec PayoffSpec::compact_bump(double center, double width, double height) {
  PayoffSpec p = gaussian_bump(center, width, height);
  p.kind = PayoffKind::compact_bump;
  return p;
}

PayoffSpec PayoffSpec::zero() { return PayoffSpec{}; }

double PayoffSpec::feature_point() const {
  switch (kind) {
    case PayoffKind::smoothed_put: return std::log(strike);
    case PayoffKind::gaussian_bump:
    case PayoffKind::compact_bump: return center;
    case PayoffKind::zero: return 0.0;
  }
  return 0.0;
}

std::string to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::smoothed_put: return "smoothed_put";
    case PayoffKind::gaussian_bump: return "gaussian_bump";
    case PayoffKind::compact_bump: return "compact_bump";
    case PayoffKind::zero: return "zero";
  }
  return "zero";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
  if (name == "smoothed_put") return PayoffKind::smoothed_put;
  if (name == "gaussian_bump") return PayoffKind::gaussian_bump;
  if (name == "compact_bump") return PayoffKind::compact_bump;
  if (name == "zero") return PayoffKind::zero;
  fail(ErrorKind::parameter, "unknown payoff kind '" + name + "'");
}

namespace {

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// C^2 quintic step, 0 for t <= 0 and 1 for t >= 1.
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace

Field sample_payoff(const PayoffSpec& spec, const Grid1D& grid) {
  switch (spec.kind) {
    case PayoffKind::zero:
      return Field::zeros(grid);
    case PayoffKind::smoothed_put: {
      require(spec.sigma > 0.0, ErrorKind::parameter,
              "smoothed_put requires sigma > 0");
      require(spec.strike > 0.0, ErrorKind::parameter,
              "smoothed_put requires strike > 0");
      const double ramp_begin = grid.x_min() + 0.05 * grid.width();
      const double ramp_end = grid.x_min() + 0.30 * grid.width();
      return Field::sample(grid, [&](double x) {
        const double put = spec.sigma * softplus((spec.strike - std::exp(x)) / spec.sigma);
        return put * smoothstep((x - ramp_begin) / (ramp_end - ramp_begin));
      });
    }
    case PayoffKind::gaussian_bump: {
      require(spec.width > 0.0, ErrorKind::parameter, "bump width must be positive");
      return Field::sample(grid, [&](double x) {
        const double r = (x - spec.center) / spec.width;
        return spec.height * std::exp(-0.5 * r * r);
      });
    }
    case PayoffKind::compact_bump: {
      require(spec.width > 0.0, ErrorKind::parameter, "bump width must be positive");
      return Field::sample(grid, [&](double x) {
        const double r = (x - spec.center) / spec.width;
        if (std::abs(r) >= 1.0) return 0.0;
        return spec.height * std::exp(1.0 - 1.0 / (1.0 - r * r));
      });
    }
  }
  fail(ErrorKind::parameter, "unknown payoff kind");
}

double lipschitz_norm(const Field& f) {
  const auto v = f.values();
  const std::size_t n = v.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    best = std::max(best, std::abs(v[(i + 1) % n] - v[i]));
  }
  return best / f.grid().spacing();
}

double semiconvexity_constant(const Field& f) {
  const auto v = f.values();
  const std::size_t n = v.size();
  double lowest = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = v[i + 1] + v[i - 1] - 2.0 * v[i];
    lowest = std::min(lowest, d2);
  }
  if (lowest >= 0.0) return 0.0;
  const double h = f.grid().spacing();
  return -lowest / (h * h);
}

double linf_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double linf_diff(const Field& f, const Field& g) {
  require_same_grid(f, g, "linf_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc * f.grid().spacing();
}

}  // namespace fracobs
