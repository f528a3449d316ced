#include "fracobs/extension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fracobs/errors.hpp"
#include "fracobs/fft.hpp"
#include "fracobs/frac_operator.hpp"

namespace fracobs {

namespace {

std::vector<double> graded_nodes(double height, std::size_t layers, double grade) {
  std::vector<double> y(layers + 1);
  for (std::size_t j = 0; j <= layers; ++j) {
    y[j] = height * std::pow(static_cast<double>(j) / static_cast<double>(layers), grade);
  }
  y[layers] = height;
  return y;
}

double weight_moment(double lo, double hi, double b) {
  return (std::pow(hi, 1.0 + b) - std::pow(lo, 1.0 + b)) / (1.0 + b);
}

// Cell weights V_j = int y^b over the dual cell of node j (half cell at
// j = 0) and face conductances G_j = 1 / int_{y_j}^{y_{j+1}} y^{-b}.
struct FiniteVolume {
  std::vector<double> volume;
  std::vector<double> conductance;
};

FiniteVolume finite_volume(std::span<const double> y, double b) {
  const std::size_t m = y.size() - 1;
  FiniteVolume fv;
  fv.volume.assign(m + 1, 0.0);
  fv.conductance.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    fv.conductance[j] = (1.0 - b) / (std::pow(y[j + 1], 1.0 - b) - std::pow(y[j], 1.0 - b));
  }
  fv.volume[0] = weight_moment(0.0, 0.5 * y[1], b);
  for (std::size_t j = 1; j < m; ++j) {
    fv.volume[j] = weight_moment(0.5 * (y[j - 1] + y[j]), 0.5 * (y[j] + y[j + 1]), b);
  }
  fv.volume[m] = weight_moment(0.5 * (y[m - 1] + y[m]), y[m], b);
  return fv;
}

}  // namespace

StripGrid::StripGrid(const Grid1D& base, double s, double height, std::size_t layers)
    : base_(base), s_(s), a_(1.0 - 2.0 * s), height_(height), grade_(0.0) {
  require_fractional_order(s);
  require(std::isfinite(height) && height > 0.0, ErrorKind::parameter,
          "strip height must be positive");
  require(layers >= 4, ErrorKind::parameter, "strip needs at least 4 layers");
  grade_ = 2.0 / (1.0 - a_);
  y_ = graded_nodes(height, layers, grade_);
}

ExtensionField::ExtensionField(const StripGrid& strip, double weight_exponent,
                               std::vector<double> values)
    : strip_(strip), b_(weight_exponent), values_(std::move(values)) {
  require(values_.size() == strip_.base().size() * (strip_.layers() + 1), ErrorKind::shape,
          "extension values do not match the strip");
  for (double v : values_) {
    require(std::isfinite(v), ErrorKind::data, "extension field contains non-finite values");
  }
}

Field ExtensionField::row(std::size_t j) const {
  require(j <= strip_.layers(), ErrorKind::index, "extension row out of range");
  const std::size_t n = strip_.base().size();
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(j * n),
                        values_.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
  return Field(strip_.base(), std::move(v));
}

ExtensionField solve_extension(const Field& f, const StripGrid& strip, WeightSign weight,
                               TopCondition top) {
  require(f.grid() == strip.base(), ErrorKind::shape, "trace is not on the strip base grid");
  const double b = weight == WeightSign::plus ? strip.a() : -strip.a();
  const std::size_t n = f.size();
  const std::size_t m = strip.layers();
  const double h = strip.base().spacing();
  const auto y = strip.y();
  const FiniteVolume fv = finite_volume(y, b);

  const auto trace_hat = fft::forward(f.values());
  const double mean = f.mean();
  const double top_value = top == TopCondition::mean_split ? mean : 0.0;

  // modes[j][k], j = 0..m
  std::vector<fft::Spectrum> modes(m + 1, fft::Spectrum(trace_hat.size()));
  modes[0] = trace_hat;
  modes[m][0] = top_value * static_cast<double>(n);

  std::vector<double> c_prime(m + 1);
  std::vector<std::complex<double>> d_prime(m + 1);
  for (std::size_t k = 0; k < trace_hat.size(); ++k) {
    const double sn = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    const double lambda = 4.0 * sn * sn / (h * h);
    // Thomas sweep on rows j = 1..m-1 of
    // (V_j lambda + G_j + G_{j-1}) F_j - G_j F_{j+1} - G_{j-1} F_{j-1} = 0.
    for (std::size_t j = 1; j < m; ++j) {
      const double lower = -fv.conductance[j - 1];
      const double upper = -fv.conductance[j];
      const double diag = fv.volume[j] * lambda + fv.conductance[j] + fv.conductance[j - 1];
      std::complex<double> rhs = 0.0;
      if (j == 1) rhs -= lower * modes[0][k];
      if (j == m - 1) rhs -= upper * modes[m][k];
      const double denom = j == 1 ? diag : diag - lower * c_prime[j - 1];
      c_prime[j] = j == m - 1 ? 0.0 : upper / denom;
      d_prime[j] = j == 1 ? rhs / denom : (rhs - lower * d_prime[j - 1]) / denom;
    }
    modes[m - 1][k] = d_prime[m - 1];
    for (std::size_t j = m - 2; j >= 1; --j) {
      modes[j][k] = d_prime[j] - c_prime[j] * modes[j + 1][k];
    }
  }

  std::vector<double> values(n * (m + 1));
  std::copy(f.values().begin(), f.values().end(), values.begin());
  for (std::size_t j = 1; j < m; ++j) {
    const auto row = fft::inverse(modes[j], n);
    std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  std::fill(values.begin() + static_cast<std::ptrdiff_t>(m * n), values.end(), top_value);

  // Physical-space residual of the balance equations.
  double worst = 0.0;
  double scale = 0.0;
  double fmax = 0.0;
  for (double v : values) fmax = std::max(fmax, std::abs(v));
  for (std::size_t j = 1; j < m; ++j) {
    const double vx = fv.volume[j] / (h * h);
    scale = std::max(scale, (4.0 * vx + 2.0 * (fv.conductance[j] + fv.conductance[j - 1])) * fmax);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = values[j * n + i];
      const double r = vx * (values[j * n + (i + 1) % n] + values[j * n + (i + n - 1) % n] - 2.0 * c) +
                       fv.conductance[j] * (values[(j + 1) * n + i] - c) -
                       fv.conductance[j - 1] * (c - values[(j - 1) * n + i]);
      worst = std::max(worst, std::abs(r));
    }
  }
  if (scale > 0.0 && !(worst <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "extension solve residual " << worst / scale << " exceeds 1e-10";
    fail(ErrorKind::numerical, msg.str());
  }
  return ExtensionField(strip, b, std::move(values));
}

Field dtn_trace(const ExtensionField& F) {
  const StripGrid& strip = F.strip();
  const auto y = strip.y();
  require(strip.layers() >= 4 && y[3] < 0.01 * strip.height(), ErrorKind::configuration,
          "fewer than 3 layers below 0.01*Y; refine the strip before taking the trace");
  const double b = F.weight_exponent();
  std::array<double, 3> x{}, z{};
  for (int j = 0; j < 3; ++j) {
    x[j] = std::pow(y[j + 1], 1.0 - b) / (1.0 - b);
    z[j] = y[j + 1] * y[j + 1];
  }
  double sxx = 0, sxz = 0, szz = 0;
  for (int j = 0; j < 3; ++j) {
    sxx += x[j] * x[j];
    sxz += x[j] * z[j];
    szz += z[j] * z[j];
  }
  const double det = sxx * szz - sxz * sxz;
  require(det > 0.0, ErrorKind::numerical, "trace regression is singular");
  // A = sum_j r_j (F_j - F_0)
  std::array<double, 3> r{};
  for (int j = 0; j < 3; ++j) r[j] = (szz * x[j] - sxz * z[j]) / det;

  const std::size_t n = strip.base().size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f0 = F.at(i, 0);
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += r[j] * (F.at(i, j + 1) - f0);
    out[i] = acc;
  }
  return Field(strip.base(), std::move(out));
}

double extension_constant(double s) {
  require_fractional_order(s);
  return std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s);
}

double fit_extension_constant(const Field& f, const StripGrid& strip) {
  const Field trace = dtn_trace(solve_extension(f, strip));
  const Field reference = build_spectral(strip.base(), strip.s()).apply(f);
  const double norm = inner(reference, reference);
  require(norm > 0.0, ErrorKind::degenerate, "extension constant fit: constant trace");
  return -inner(trace, reference) / norm;
}

double eigen_check(double s, int m_angular) {
  require_fractional_order(s);
  require(m_angular >= 64, ErrorKind::parameter, "eigen_check needs m_angular >= 64");
  const double a = 1.0 - 2.0 * s;
  const double pi = std::numbers::pi;
  // tanh-sinh: theta = pi / (1 + exp(-pi sinh t)), t in [-4, 4]
  const double t_max = 4.0;
  const double step = 2.0 * t_max / m_angular;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k <= m_angular; ++k) {
    const double t = -t_max + k * step;
    const double e = std::exp(-pi * std::sinh(t));
    const double theta = pi / (1.0 + e);
    const double complement = pi * e / (1.0 + e);
    const double jac = pi * pi * std::cosh(t) * e / ((1.0 + e) * (1.0 + e));
    const double sin_theta = std::sin(std::min(theta, complement));
    if (jac == 0.0 || sin_theta == 0.0) continue;
    const double half = std::sin(0.5 * theta);
    const double one_minus_cos = 2.0 * half * half;
    const double hval = std::pow(one_minus_cos, 1.0 - s);
    const double dh = (1.0 - s) * std::pow(one_minus_cos, -s) * sin_theta;
    const double w = (k == 0 || k == m_angular ? 0.5 : 1.0) * jac * std::pow(sin_theta, -a);
    num += w * dh * dh;
    den += w * hval * hval;
  }
  require(std::isfinite(num) && std::isfinite(den) && den > 0.0, ErrorKind::numerical,
          "angular quadrature underflow");
  return num / den;
}

std::vector<double> monotonicity_phi(const ExtensionField& w, double x0,
                                     std::span<const double> radii) {
  const StripGrid& strip = w.strip();
  const Grid1D& base = strip.base();
  const double reach = std::min(strip.height(), 0.5 * base.width());
  double r_max = 0.0;
  for (double r : radii) {
    require(std::isfinite(r) && r > 0.0 && r <= reach, ErrorKind::parameter,
            "monotonicity radius outside the strip");
    r_max = std::max(r_max, r);
  }
  const double a = strip.a();
  const double s = strip.s();
  const double h = base.spacing();
  const auto y = strip.y();
  const std::size_t n = base.size();
  static constexpr std::array<double, 4> gx{0.0694318442029737, 0.3300094782075719,
                                            0.6699905217924281, 0.9305681557970263};
  static constexpr std::array<double, 4> gw{0.1739274225687269, 0.3260725774312731,
                                            0.3260725774312731, 0.1739274225687269};

  std::vector<double> acc(radii.size(), 0.0);
  for (std::size_t j = 0; j < strip.layers() && y[j] <= r_max; ++j) {
    const double dy = y[j + 1] - y[j];
    for (std::size_t i = 0; i < n; ++i) {
      const double left = base.periodic_offset(i, x0);
      if (left > r_max || left + h < -r_max) continue;
      const std::size_t ip = (i + 1) % n;
      const double w00 = w.at(i, j), w10 = w.at(ip, j);
      const double w01 = w.at(i, j + 1), w11 = w.at(ip, j + 1);
      for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
          const double xi = gx[p], eta = gx[q];
          const double wx = ((w10 - w00) * (1.0 - eta) + (w11 - w01) * eta) / h;
          const double wy = ((w01 - w00) * (1.0 - xi) + (w11 - w10) * xi) / dy;
          const double zx = left + xi * h;
          const double zy = y[j] + eta * dy;
          const double rho = std::hypot(zx, zy);
          const double val = gw[p] * gw[q] * h * dy * (wx * wx + wy * wy) *
                             std::pow(zy, -a) * std::pow(rho, a);
          for (std::size_t k = 0; k < radii.size(); ++k) {
            if (rho < radii[k]) acc[k] += val;
          }
        }
      }
    }
  }
  std::vector<double> phi(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    phi[k] = acc[k] * std::pow(radii[k], -2.0 * (1.0 - s));
    require(std::isfinite(phi[k]), ErrorKind::numerical, "monotonicity functional not finite");
  }
  return phi;
}

BoxExtensionStepper::BoxExtensionStepper(double half_width, std::size_t cells_x, double height,
                                         std::size_t layers, double s, double dt)
    : half_width_(half_width), nx_(cells_x), hx_(0.0), s_(s), dt_(dt), c_(0.0) {
  require_fractional_order(s);
  require(half_width > 0.0 && height > 0.0, ErrorKind::parameter, "box dimensions must be positive");
  require(cells_x >= 4 && layers >= 4, ErrorKind::parameter, "box needs at least 4 cells per side");
  require(dt > 0.0, ErrorKind::parameter, "box stepper requires dt > 0");
  hx_ = 2.0 * half_width / static_cast<double>(cells_x);
  c_ = extension_constant(s);
  const double b = 1.0 - 2.0 * s;
  y_ = graded_nodes(height, layers, 2.0 / (1.0 - b));
  FiniteVolume fv = finite_volume(y_, b);
  volume_ = std::move(fv.volume);
  conductance_ = std::move(fv.conductance);

  const std::size_t ny = layers;  // unknown rows j = 0..ny-1
  const std::size_t size = (nx_ - 1) * ny;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(size * 5);
  const double inv_h2 = 1.0 / (hx_ * hx_);
  for (std::size_t j = 0; j < ny; ++j) {
    const double vx = volume_[j] * inv_h2;
    double diag = 2.0 * vx + conductance_[j];
    if (j == 0) {
      diag += c_ / dt_;
    } else {
      diag += conductance_[j - 1];
    }
    for (std::size_t i = 1; i < nx_; ++i) {
      const auto row = static_cast<Eigen::Index>(index(i, j));
      entries.emplace_back(row, row, diag);
      if (i > 1) entries.emplace_back(row, static_cast<Eigen::Index>(index(i - 1, j)), -vx);
      if (i + 1 < nx_) entries.emplace_back(row, static_cast<Eigen::Index>(index(i + 1, j)), -vx);
      if (j + 1 < ny) {
        entries.emplace_back(row, static_cast<Eigen::Index>(index(i, j + 1)), -conductance_[j]);
      }
      if (j > 0) {
        entries.emplace_back(row, static_cast<Eigen::Index>(index(i, j - 1)), -conductance_[j - 1]);
      }
    }
  }
  Eigen::SparseMatrix<double> matrix(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  matrix.setFromTriplets(entries.begin(), entries.end());
  solver_.compute(matrix);
  require(solver_.info() == Eigen::Success, ErrorKind::numerical,
          "box extension matrix factorization failed");
}

std::vector<double> BoxExtensionStepper::step(std::span<const double> trace,
                                              const Boundary& boundary) const {
  require(trace.size() == nx_ + 1, ErrorKind::shape, "box trace has the wrong length");
  const std::size_t ny = y_.size() - 1;
  const double inv_h2 = 1.0 / (hx_ * hx_);
  const double x_left = x(0);
  const double x_right = x(nx_);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>((nx_ - 1) * ny));
  for (std::size_t j = 0; j < ny; ++j) {
    const double vx = volume_[j] * inv_h2;
    const auto l = static_cast<Eigen::Index>(index(1, j));
    const auto r = static_cast<Eigen::Index>(index(nx_ - 1, j));
    rhs[l] += vx * boundary(x_left, y_[j]);
    rhs[r] += vx * boundary(x_right, y_[j]);
    if (j + 1 == ny) {
      for (std::size_t i = 1; i < nx_; ++i) {
        rhs[static_cast<Eigen::Index>(index(i, j))] += conductance_[j] * boundary(x(i), y_[ny]);
      }
    }
  }
  for (std::size_t i = 1; i < nx_; ++i) {
    rhs[static_cast<Eigen::Index>(index(i, 0))] += c_ / dt_ * trace[i];
  }
  const Eigen::VectorXd sol = solver_.solve(rhs);
  require(solver_.info() == Eigen::Success && sol.allFinite(), ErrorKind::numerical,
          "box extension solve failed");
  std::vector<double> out(nx_ + 1);
  out[0] = boundary(x_left, 0.0);
  out[nx_] = boundary(x_right, 0.0);
  for (std::size_t i = 1; i < nx_; ++i) out[i] = sol[static_cast<Eigen::Index>(index(i, 0))];
  return out;
}

}  // namespace fracobs
