#pragma once

// Grid kernels used by the integrator. `serial` is the reference; `omp` must
// produce bit-identical results for any thread count. Reductions sum in fixed
// chunks of kChunk points, then combine the chunk partials in index order.

#include "mfm/model.hpp"

#include <cstddef>

namespace mfm::kernels {

inline constexpr std::size_t kChunk = 1024;
inline constexpr std::size_t kAllFinite = static_cast<std::size_t>(-1);

enum class Backend { Serial, OpenMP };

#define MFM_KERNEL_DECLS                                                                           \
  /* out[f*np + q] = d/dt of field f at point q. lap_w holds the two w Laplacians. */              \
  void field_rhs(const double* state, const double* lap_w, const double* g, const RhsCoefficients& c, \
                 double* out, std::size_t np);                                                     \
  /* out = x + a*y */                                                                              \
  void axpy(double* out, const double* x, double a, const double* y, std::size_t len);             \
  /* y += dt/6 (k1 + 2 k2 + 2 k3 + k4) */                                                          \
  void rk4_combine(double* y, const double* k1, const double* k2, const double* k3, const double* k4, \
                   double dt, std::size_t len);                                                    \
  double min_value(const double* x, std::size_t len);                                              \
  double max_value(const double* x, std::size_t len);                                              \
  double chunked_sum(const double* x, std::size_t len);                                            \
  /* Index of the first non-finite entry, or kAllFinite. */                                        \
  std::size_t first_nonfinite(const double* x, std::size_t len);

namespace serial {
MFM_KERNEL_DECLS
}
namespace omp {
MFM_KERNEL_DECLS
/// Threads used by the omp kernels; 0 keeps the OpenMP default.
void set_threads(int n);
int threads();
} // namespace omp

#undef MFM_KERNEL_DECLS

} // namespace mfm::kernels
