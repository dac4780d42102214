#pragma once

// Fourier pseudospectral differentiation on the periodic square (0, omega)^2.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace mfm {

class SpectralWorkspace {
public:
  SpectralWorkspace(std::size_t n, double omega, bool dealias = false);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
  SpectralWorkspace(SpectralWorkspace&&) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;

  std::size_t n() const { return n_; }
  double omega() const { return omega_; }
  /// Largest |k| on the grid (1/cm).
  double k_max() const;

  /// Angular wavenumbers along x1 (row index j) and x2 (column index k) of the half spectrum.
  const std::vector<double>& k1() const { return k1_; }
  const std::vector<double>& k2() const { return k2_; }

  /// out = Laplacian of `in` (n*n values, row-major j*n + k). `in` and `out` may alias.
  void laplacian(const double* in, double* out);
  /// Spectral gradient (d/dx1, d/dx2).
  void gradient(const double* in, double* d1, double* d2);
  /// Applies a real Fourier multiplier m(k1, k2) where k1, k2 are angular wavenumbers.
  void apply_multiplier(const double* in, double* out, const std::function<double(double, double)>& m);

  /// Throws ShapeError unless `count` equals n*n.
  void check_size(std::size_t count) const;

private:
  void forward(const double* in);
  void backward(double* out);

  std::size_t n_;
  double omega_;
  bool dealias_;
  std::vector<double> k1_, k2_;
  std::vector<double> lap_mult_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

} // namespace mfm
