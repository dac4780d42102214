#pragma once

#include "mfm/model.hpp"

#include <cstddef>
#include <vector>

namespace mfm {

struct DomainSpec {
  double omega = 10.0;  // cm
  std::size_t n = 64;
  double dt = 1e-5;     // s
  double T = 0.1;       // s

  /// Throws ValidationError on non-positive sizes or n not a power of two >= 4.
  void validate() const;
};

/// Field order inside FieldState.
enum Field : std::size_t {
  kVE = 0, kVI,
  kIEE, kIEI, kIIE, kIII,
  kDIEE, kDIEI, kDIIE, kDIII,
  kWEE, kWEI,
  kDWEE, kDWEI,
  kNumFields
};

const char* field_name(std::size_t f);

/// The 14 fields sampled on an n x n periodic grid, stored field-major.
/// Point (j, k) sits at x = (j*omega/n, k*omega/n) and has flat index j*n + k.
struct FieldState {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> data;

  FieldState() = default;
  explicit FieldState(std::size_t n_) : n(n_), data(kNumFields * n_ * n_, 0.0) {}

  std::size_t points() const { return n * n; }
  double* field(std::size_t f) { return data.data() + f * points(); }
  const double* field(std::size_t f) const { return data.data() + f * points(); }

  PointState point(std::size_t idx) const;
  void set_point(std::size_t idx, const PointState& s);

  /// Every grid point set to `s`.
  static FieldState constant(std::size_t n, const PointState& s);
};

} // namespace mfm
