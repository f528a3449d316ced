#include "fracobs/frac_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracobs/errors.hpp"
#include "fracobs/fft.hpp"

namespace fracobs {

void require_fractional_order(double s) {
  require(std::isfinite(s) && s > 0.0 && s < 1.0, ErrorKind::parameter,
          "fractional order s must lie in (0, 1)");
}

std::string to_string(MultiplierKind kind) {
  return kind == MultiplierKind::fourier ? "fourier" : "quadrature_symbol";
}

SpectralOp::SpectralOp(const Grid1D& grid, double s, std::vector<double> multiplier,
                       MultiplierKind kind)
    : grid_(grid), s_(s), multiplier_(std::move(multiplier)), kind_(kind) {
  require(multiplier_.size() == grid_.size(), ErrorKind::shape,
          "multiplier length does not match grid size");
}

template <typename Gain>
Field SpectralOp::filter(const Field& f, Gain&& gain) const {
  require(f.grid() == grid_, ErrorKind::shape, "operator applied to a field on another grid");
  auto spectrum = fft::forward(f.values());
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= gain(multiplier_[k]);
  auto values = fft::inverse(spectrum, grid_.size());
  for (double v : values) {
    require(std::isfinite(v), ErrorKind::numerical, "non-finite value after spectral filter");
  }
  return Field(grid_, std::move(values));
}

Field SpectralOp::apply(const Field& f) const {
  return filter(f, [](double m) { return m; });
}

Field SpectralOp::implicit_solve(double dt, const Field& rhs) const {
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::parameter, "implicit_solve requires dt > 0");
  return filter(rhs, [dt](double m) { return 1.0 / (1.0 + dt * m); });
}

Field SpectralOp::semigroup(double t, const Field& f) const {
  require(std::isfinite(t) && t >= 0.0, ErrorKind::parameter, "semigroup requires t >= 0");
  return filter(f, [t](double m) { return std::exp(-t * m); });
}

double SpectralOp::resolvent_min_ratio(double dt) const {
  std::vector<double> delta(grid_.size(), 0.0);
  delta[0] = 1.0;
  const Field kernel = implicit_solve(dt, Field(grid_, std::move(delta)));
  return kernel.min() / kernel.max_value();
}

SpectralOp build_spectral(const Grid1D& grid, double s) {
  require_fractional_order(s);
  const std::size_t n = grid.size();
  const double dxi = 2.0 * std::numbers::pi / grid.width();
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = dxi * static_cast<double>(std::abs(fft::wavenumber(k, n)));
    m[k] = k == 0 ? 0.0 : std::pow(xi, 2.0 * s);
  }
  return SpectralOp(grid, s, std::move(m), MultiplierKind::fourier);
}

double normalization_constant(double s) {
  require_fractional_order(s);
  return s * std::pow(4.0, s) * std::tgamma(0.5 + s) /
         (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - s));
}

namespace {

// Weights a_j on G_j = D_j / y_j^2 for y in (0, y_J], see QuadratureOp.
std::vector<double> near_field_weights(double h, double s, std::size_t last) {
  const double p = 1.0 - 2.0 * s;
  auto moment = [](double a, double b, double q) {
    return (std::pow(b, q + 1.0) - std::pow(a, q + 1.0)) / (q + 1.0);
  };
  std::vector<double> a(last + 1, 0.0);
  a[1] += std::pow(h, p + 1.0) / (p + 1.0);
  for (std::size_t j = 1; j < last; ++j) {
    const double lo = h * static_cast<double>(j);
    const double hi = h * static_cast<double>(j + 1);
    const double m0 = moment(lo, hi, p);
    const double m1 = moment(lo, hi, p + 1.0);
    a[j] += (hi * m0 - m1) / h;
    a[j + 1] += (m1 - lo * m0) / h;
  }
  return a;
}

}  // namespace

QuadratureOp::QuadratureOp(const Grid1D& grid, double s, double normalization)
    : grid_(grid), s_(s), normalization_(normalization), tail_radius_(0.0) {
  require_fractional_order(s);
  require(std::isfinite(normalization) && normalization > 0.0, ErrorKind::parameter,
          "quadrature normalization must be positive");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double period = grid.width();
  const std::size_t last = 3 * n;
  tail_radius_ = h * static_cast<double>(last);

  // Folded weights W_m: sum of per-offset weights over offsets j = m mod n.
  std::vector<double> folded(n, 0.0);
  const auto a = near_field_weights(h, s, last);
  for (std::size_t j = 1; j <= last; ++j) {
    const double y = h * static_cast<double>(j);
    folded[j % n] += a[j] / (y * y);
  }
  const double q = 1.0 + 2.0 * s;
  folded[last % n] += 0.5 * h * std::pow(tail_radius_, -q);

  // Remaining images j > last, grouped by residue: sum_{p>=0} g(p) with
  // g(p) = h (y0 + p L)^{-q}, closed by Euler-Maclaurin.
  for (std::size_t m = 1; m < n; ++m) {
    const std::size_t first = last + 1 + (m + n - (last + 1) % n) % n;
    const double y0 = h * static_cast<double>(first);
    const double integral = h * std::pow(y0, -2.0 * s) / (2.0 * s * period);
    const double g0 = h * std::pow(y0, -q);
    const double g1 = -q * period * h * std::pow(y0, -q - 1.0);
    const double g3 = -q * (q + 1.0) * (q + 2.0) * std::pow(period, 3) * h *
                      std::pow(y0, -q - 3.0);
    folded[m] += integral + 0.5 * g0 - g1 / 12.0 + g3 / 720.0;
  }

  weights_.assign(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) weights_[m] = folded[m] + folded[n - m];
}

Field QuadratureOp::apply(const Field& f) const {
  require(f.grid() == grid_, ErrorKind::shape, "operator applied to a field on another grid");
  const auto v = f.values();
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
      const std::size_t j = i + m < n ? i + m : i + m - n;
      acc += weights_[m] * (v[i] - v[j]);
    }
    out[i] = normalization_ * acc;
  }
  return Field(grid_, std::move(out));
}

std::vector<double> QuadratureOp::symbol() const {
  const std::size_t n = grid_.size();
  const auto spectrum = fft::forward(weights_);
  double total = 0.0;
  for (double w : weights_) total += w;
  std::vector<double> lambda(n, 0.0);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    lambda[k] = normalization_ * (total - spectrum[k].real());
    if (k > 0 && k < n / 2) lambda[n - k] = lambda[k];
  }
  lambda[0] = 0.0;
  return lambda;
}

SpectralOp QuadratureOp::as_multiplier() const {
  return SpectralOp(grid_, s_, symbol(), MultiplierKind::quadrature_symbol);
}

QuadratureOp build_quadrature(const Grid1D& grid, double s) {
  return QuadratureOp(grid, s, normalization_constant(s));
}

QuadratureOp build_quadrature(const Grid1D& grid, double s, double normalization) {
  return QuadratureOp(grid, s, normalization);
}

double fit_normalization_constant(const Grid1D& grid, double s,
                                  std::span<const Field> family) {
  require(!family.empty(), ErrorKind::parameter, "normalization fit needs test fields");
  const SpectralOp spectral = build_spectral(grid, s);
  const QuadratureOp raw(grid, s, 1.0);
  double cross = 0.0;
  double norm = 0.0;
  for (const Field& f : family) {
    const Field q = raw.apply(f);
    const Field m = spectral.apply(f);
    cross += inner(q, m);
    norm += inner(q, q);
  }
  require(norm > 0.0, ErrorKind::degenerate, "normalization fit: test family is constant");
  return cross / norm;
}

}  // namespace fracobs
