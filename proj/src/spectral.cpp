#include "mfm/spectral.hpp"

#include "mfm/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace mfm {

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

struct SpectralWorkspace::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  Plans(std::size_t n) {
    const int ni = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n * n);
    spec = fftw_alloc_complex(n * (n / 2 + 1));
    fwd = fftw_plan_dft_r2c_2d(ni, ni, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(ni, ni, spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

SpectralWorkspace::SpectralWorkspace(std::size_t n, double omega, bool dealias)
    : n_(n), omega_(omega), dealias_(dealias) {
  if (n < 2 || omega <= 0) throw ShapeError("spectral workspace needs n >= 2 and omega > 0");
  const std::size_t nh = n / 2 + 1;
  const double base = 2.0 * std::numbers::pi / omega;
  k1_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long m = j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    k1_[j] = base * static_cast<double>(m);
  }
  k2_.resize(nh);
  for (std::size_t k = 0; k < nh; ++k) k2_[k] = base * static_cast<double>(k);
  lap_mult_.resize(n * nh);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < nh; ++k) lap_mult_[j * nh + k] = -(k1_[j] * k1_[j] + k2_[k] * k2_[k]);
  plans_ = std::make_unique<Plans>(n);
}

SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

double SpectralWorkspace::k_max() const {
  const double half = std::numbers::pi * static_cast<double>(n_) / omega_;
  return std::sqrt(2.0) * half;
}

void SpectralWorkspace::check_size(std::size_t count) const {
  if (count != n_ * n_)
    throw ShapeError("field has " + std::to_string(count) + " values, workspace expects " +
                     std::to_string(n_ * n_));
}

void SpectralWorkspace::forward(const double* in) {
  std::memcpy(plans_->real, in, n_ * n_ * sizeof(double));
  fftw_execute(plans_->fwd);
  if (!dealias_) return;
  // 2/3 rule: zero modes with |m| > n/3 in either direction.
  const std::size_t nh = n_ / 2 + 1;
  const double cut = (2.0 * std::numbers::pi / omega_) * static_cast<double>(n_) / 3.0;
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t k = 0; k < nh; ++k)
      if (std::abs(k1_[j]) > cut || k2_[k] > cut) {
        plans_->spec[j * nh + k][0] = 0.0;
        plans_->spec[j * nh + k][1] = 0.0;
      }
}

void SpectralWorkspace::backward(double* out) {
  fftw_execute(plans_->bwd);
  const double scale = 1.0 / static_cast<double>(n_ * n_);
  for (std::size_t q = 0; q < n_ * n_; ++q) out[q] = plans_->real[q] * scale;
}

void SpectralWorkspace::laplacian(const double* in, double* out) {
  forward(in);
  const std::size_t m = n_ * (n_ / 2 + 1);
  for (std::size_t q = 0; q < m; ++q) {
    plans_->spec[q][0] *= lap_mult_[q];
    plans_->spec[q][1] *= lap_mult_[q];
  }
  backward(out);
}

void SpectralWorkspace::apply_multiplier(const double* in, double* out,
                                         const std::function<double(double, double)>& mult) {
  forward(in);
  const std::size_t nh = n_ / 2 + 1;
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t k = 0; k < nh; ++k) {
      const double s = mult(k1_[j], k2_[k]);
      plans_->spec[j * nh + k][0] *= s;
      plans_->spec[j * nh + k][1] *= s;
    }
  backward(out);
}

void SpectralWorkspace::gradient(const double* in, double* d1, double* d2) {
  const std::size_t nh = n_ / 2 + 1;
  std::vector<std::complex<double>> hat(n_ * nh);
  forward(in);
  std::memcpy(static_cast<void*>(hat.data()), plans_->spec, hat.size() * sizeof(fftw_complex));

  // Odd derivatives drop the Nyquist modes, which have no real-valued derivative.
  auto differentiate = [&](bool along_x1, double* out) {
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < nh; ++k) {
        const bool nyquist = along_x1 ? (j == n_ / 2) : (k == n_ / 2);
        const double kk = along_x1 ? k1_[j] : k2_[k];
        const std::complex<double> v = nyquist ? 0.0 : std::complex<double>(0.0, kk) * hat[j * nh + k];
        plans_->spec[j * nh + k][0] = v.real();
        plans_->spec[j * nh + k][1] = v.imag();
      }
    backward(out);
  };
  differentiate(true, d1);
  differentiate(false, d2);
}

} // namespace mfm
