#include "fracobs/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "fracobs/errors.hpp"

namespace fracobs::fft {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using AlignedBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
AlignedBuffer<T> allocate(std::size_t count) {
  auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (raw == nullptr) fail(ErrorKind::numerical, "fftw_malloc failed");
  return AlignedBuffer<T>(raw);
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

  PlanPair get(std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    // Plans are created on scratch buffers and executed with the new-array
    // interface; all buffers come from fftw_malloc so alignment matches.
    auto real = allocate<double>(n);
    auto cplx = allocate<fftw_complex>(n / 2 + 1);
    const int len = static_cast<int>(n);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(len, real.get(), cplx.get(), FFTW_ESTIMATE);
    p.inverse = fftw_plan_dft_c2r_1d(len, cplx.get(), real.get(), FFTW_ESTIMATE);
    if (p.forward == nullptr || p.inverse == nullptr) {
      fail(ErrorKind::numerical, "FFTW plan creation failed");
    }
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

Spectrum forward(std::span<const double> values) {
  const std::size_t n = values.size();
  const PlanPair plan = cache().get(n);
  auto real = allocate<double>(n);
  auto cplx = allocate<fftw_complex>(n / 2 + 1);
  std::copy(values.begin(), values.end(), real.get());
  fftw_execute_dft_r2c(plan.forward, real.get(), cplx.get());
  Spectrum out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {cplx[k][0], cplx[k][1]};
  return out;
}

std::vector<double> inverse(const Spectrum& coefficients, std::size_t n) {
  require(coefficients.size() == n / 2 + 1, ErrorKind::shape,
          "inverse FFT: coefficient count does not match length");
  const PlanPair plan = cache().get(n);
  auto real = allocate<double>(n);
  auto cplx = allocate<fftw_complex>(n / 2 + 1);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    cplx[k][0] = coefficients[k].real();
    cplx[k][1] = coefficients[k].imag();
  }
  fftw_execute_dft_c2r(plan.inverse, cplx.get(), real.get());
  std::vector<double> out(real.get(), real.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace fracobs::fft
