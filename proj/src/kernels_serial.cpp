#include "mfm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfm::kernels::serial {

void field_rhs(const double* state, const double* lap_w, const double* g, const RhsCoefficients& c,
               double* out, std::size_t np) {
  double s[PointState::kSize];
  double ds[PointState::kSize];
  for (std::size_t q = 0; q < np; ++q) {
    for (std::size_t f = 0; f < PointState::kSize; ++f) s[f] = state[f * np + q];
    const double lap[2] = {lap_w[q], lap_w[np + q]};
    rhs_point(s, lap, g, c, ds);
    for (std::size_t f = 0; f < PointState::kSize; ++f) out[f * np + q] = ds[f];
  }
}

void axpy(double* out, const double* x, double a, const double* y, std::size_t len) {
  for (std::size_t q = 0; q < len; ++q) out[q] = x[q] + a * y[q];
}

void rk4_combine(double* y, const double* k1, const double* k2, const double* k3, const double* k4,
                 double dt, std::size_t len) {
  const double h = dt / 6.0;
  for (std::size_t q = 0; q < len; ++q) y[q] += h * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
}

double min_value(const double* x, std::size_t len) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < len; ++q) m = std::min(m, x[q]);
  return m;
}

double max_value(const double* x, std::size_t len) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < len; ++q) m = std::max(m, x[q]);
  return m;
}

double chunked_sum(const double* x, std::size_t len) {
  const std::size_t chunks = (len + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t end = std::min(len, (c + 1) * kChunk);
    double s = 0.0;
    for (std::size_t q = c * kChunk; q < end; ++q) s += x[q];
    partial[c] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::size_t first_nonfinite(const double* x, std::size_t len) {
  for (std::size_t q = 0; q < len; ++q)
    if (!std::isfinite(x[q])) return q;
  return kAllFinite;
}

} // namespace mfm::kernels::serial
