#include "fracobs/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fracobs/errors.hpp"
#include "fracobs/extension.hpp"
#include "fracobs/fft.hpp"

namespace fracobs {

namespace {

void require_beta(double beta) {
  require(std::isfinite(beta) && beta > 0.0 && beta < 1.0, ErrorKind::parameter,
          "wave parameter beta must lie in (0, 1)");
}

}  // namespace

double wave_trace_at(double beta, double x) {
  return x < 0.0 ? std::sin(beta * std::numbers::pi) * std::pow(-x, 1.0 + beta) : 0.0;
}

Field wave_trace(double beta, const Grid1D& grid) {
  require_beta(beta);
  return Field::sample(grid, [beta](double x) { return wave_trace_at(beta, x); });
}

double wave_profile(double beta, double x, double y) {
  const double rho = std::hypot(x, y);
  if (rho == 0.0) return 0.0;
  const double theta = std::atan2(y, x);
  return -std::pow(rho, 1.0 + beta) * std::sin((1.0 + beta) * theta);
}

double wave_speed(double beta) {
  require_beta(beta);
  if (beta == 0.5) return 0.0;
  return 1.0 / std::tan(beta * std::numbers::pi);
}

HeatKernel heat_kernel(double s, double t, const Grid1D& grid) {
  require(std::isfinite(s) && s > 0.0 && s <= 1.0, ErrorKind::parameter,
          "heat kernel order must lie in (0, 1]");
  require(std::isfinite(t) && t > 0.0, ErrorKind::parameter, "heat kernel needs t > 0");
  require(std::pow(t, 0.5 / s) >= 2.0 * grid.spacing(), ErrorKind::resolution,
          "heat kernel width t^{1/(2s)} is below two grid spacings");
  const std::size_t n = grid.size();
  const double dxi = 2.0 * std::numbers::pi / grid.width();
  fft::Spectrum spectrum(n / 2 + 1);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double xi = dxi * static_cast<double>(k);
    const double decay = std::exp(-t * std::pow(xi, 2.0 * s));
    spectrum[k] = decay * std::polar(1.0, xi * grid.x_min());
  }
  auto values = fft::inverse(spectrum, n);
  for (double& v : values) v /= grid.spacing();
  return HeatKernel{s, t, Field(grid, std::move(values))};
}

Field convolve(const Field& kernel, const Field& f) {
  require_same_grid(kernel, f, "convolve");
  const Grid1D& grid = f.grid();
  const double offset = -grid.x_min() / grid.spacing();
  require(std::abs(offset - std::round(offset)) < 1e-9, ErrorKind::parameter,
          "convolution needs x_min to be a multiple of the spacing");
  const std::size_t n = grid.size();
  auto kh = fft::forward(kernel.values());
  const auto fh = fft::forward(f.values());
  for (std::size_t k = 0; k < kh.size(); ++k) kh[k] *= fh[k];
  const auto c = fft::inverse(kh, n);
  const auto shift = static_cast<std::ptrdiff_t>(std::llround(offset));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = grid.spacing() * c[grid.wrap(static_cast<std::ptrdiff_t>(i) + shift)];
  }
  return Field(grid, std::move(out));
}

Field duhamel_solve(const Field& v0, std::span<const Field> forcing, double s,
                    std::span<const double> times) {
  require(std::isfinite(s) && s > 0.0 && s <= 1.0, ErrorKind::parameter,
          "Duhamel order must lie in (0, 1]");
  require(!times.empty() && times.front() == 0.0, ErrorKind::parameter,
          "Duhamel times must start at 0");
  require(forcing.size() == times.size(), ErrorKind::shape,
          "forcing must be sampled at every quadrature time");
  for (std::size_t j = 1; j < times.size(); ++j) {
    require(times[j] > times[j - 1], ErrorKind::parameter, "Duhamel times must increase");
  }
  const Grid1D& grid = v0.grid();
  for (const Field& f : forcing) require_same_grid(v0, f, "duhamel_solve");

  const std::size_t n = grid.size();
  const double dxi = 2.0 * std::numbers::pi / grid.width();
  std::vector<double> lambda(n / 2 + 1);
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    lambda[k] = std::pow(dxi * static_cast<double>(k), 2.0 * s);
  }
  const double t = times.back();
  auto total = fft::forward(v0.values());
  for (std::size_t k = 0; k < total.size(); ++k) total[k] *= std::exp(-t * lambda[k]);

  const std::size_t last = times.size() - 1;
  for (std::size_t j = 0; j <= last && last > 0; ++j) {
    const double left = j > 0 ? times[j] - times[j - 1] : 0.0;
    const double right = j < last ? times[j + 1] - times[j] : 0.0;
    const double weight = 0.5 * (left + right);
    const double lag = j == last ? 0.5 * left : t - times[j];
    const auto fh = fft::forward(forcing[j].values());
    for (std::size_t k = 0; k < total.size(); ++k) {
      total[k] += weight * std::exp(-lag * lambda[k]) * fh[k];
    }
  }
  return Field(grid, fft::inverse(total, n));
}

WaveRun evolve_wave(const WaveConfig& config) {
  require_beta(config.beta);
  require(config.T > 0.0 && config.dt > 0.0 && config.fit_to > config.fit_from,
          ErrorKind::parameter, "wave run needs T, dt > 0 and a non-empty fit window");
  const double s = 0.5;
  const double beta = config.beta;
  const double a = wave_speed(beta);
  const BoxExtensionStepper box(config.half_width, config.cells, config.height, config.layers, s,
                                config.dt);
  const std::size_t nodes = config.cells + 1;
  WaveRun run;
  run.beta = beta;
  run.exact_speed = a;
  run.x.resize(nodes);
  std::vector<double> u(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    run.x[i] = box.x(i);
    u[i] = wave_trace_at(beta, run.x[i]);
  }
  const std::vector<double> u_initial = u;
  const double p = 1.0 + beta;

  // Free boundary: extrapolate u^{1/(1+beta)}, linear in the distance to
  // the front, from detached nodes 2..7 cells to its left.
  auto locate = [&](const std::vector<double>& v) -> double {
    std::size_t fb = 0;
    for (std::size_t i = 1; i < nodes; ++i) {
      if (v[i] <= 0.0 && v[i - 1] > 0.0) {
        fb = i;
        break;
      }
    }
    require(fb >= 8, ErrorKind::numerical, "wave front left the box");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t q = 2; q < 8; ++q) {
      const double x = run.x[fb - q];
      const double y = std::pow(std::max(v[fb - q], 0.0), 1.0 / p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / cnt;
    require(slope < 0.0, ErrorKind::numerical, "wave front fit has the wrong orientation");
    return -intercept / slope;
  };

  const auto steps = static_cast<std::size_t>(std::ceil(config.T / config.dt - 1e-9));
  run.times.push_back(0.0);
  run.front.push_back(locate(u));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = config.dt * static_cast<double>(k + 1);
    auto boundary = [&](double x, double y) { return wave_profile(beta, x + a * t_next, y); };
    u = box.step(u, boundary);
    for (double& v : u) v = std::max(v, 0.0);
    run.times.push_back(t_next);
    run.front.push_back(locate(u));
  }

  double st = 0, sf = 0, stt = 0, stf = 0;
  int cnt = 0;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double t = run.times[k];
    if (t < config.fit_from - 1e-12 || t > config.fit_to + 1e-12) continue;
    st += t;
    sf += run.front[k];
    stt += t * t;
    stf += t * run.front[k];
    ++cnt;
  }
  require(cnt >= 3, ErrorKind::data, "wave fit window holds fewer than 3 steps");
  run.fitted_speed = -(cnt * stf - st * sf) / (cnt * stt - st * st);
  for (std::size_t i = 0; i < nodes; ++i) {
    run.drift = std::max(run.drift, std::abs(u[i] - u_initial[i]));
  }
  run.final_trace = u;
  return run;
}

}  // namespace fracobs
