#include "mfm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfm::kernels::omp {

namespace {
int g_threads = 0;
int team() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }
} // namespace

void set_threads(int n) { g_threads = std::max(0, n); }
int threads() { return team(); }

void field_rhs(const double* state, const double* lap_w, const double* g, const RhsCoefficients& c,
               double* out, std::size_t np) {
  const auto n = static_cast<std::ptrdiff_t>(np);
#pragma omp parallel for schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    double s[PointState::kSize];
    double ds[PointState::kSize];
    for (std::size_t f = 0; f < PointState::kSize; ++f) s[f] = state[f * np + q];
    const double lap[2] = {lap_w[q], lap_w[np + q]};
    rhs_point(s, lap, g, c, ds);
    for (std::size_t f = 0; f < PointState::kSize; ++f) out[f * np + q] = ds[f];
  }
}

void axpy(double* out, const double* x, double a, const double* y, std::size_t len) {
  const auto n = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for simd schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q) out[q] = x[q] + a * y[q];
}

void rk4_combine(double* y, const double* k1, const double* k2, const double* k3, const double* k4,
                 double dt, std::size_t len) {
  const double h = dt / 6.0;
  const auto n = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for simd schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q) y[q] += h * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
}

double min_value(const double* x, std::size_t len) {
  double m = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for reduction(min : m) schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q) m = std::min(m, x[q]);
  return m;
}

double max_value(const double* x, std::size_t len) {
  double m = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for reduction(max : m) schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q) m = std::max(m, x[q]);
  return m;
}

double chunked_sum(const double* x, std::size_t len) {
  const auto chunks = static_cast<std::ptrdiff_t>((len + kChunk - 1) / kChunk);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static) num_threads(team())
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(len, begin + kChunk);
    double s = 0.0;
    for (std::size_t q = begin; q < end; ++q) s += x[q];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::size_t first_nonfinite(const double* x, std::size_t len) {
  std::size_t first = kAllFinite;
  const auto n = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for reduction(min : first) schedule(static) num_threads(team())
  for (std::ptrdiff_t q = 0; q < n; ++q)
    if (!std::isfinite(x[q])) first = std::min(first, static_cast<std::size_t>(q));
  return first;
}

} // namespace mfm::kernels::omp
