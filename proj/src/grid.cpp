#include "mfm/grid.hpp"

#include "mfm/errors.hpp"

#include <array>

namespace mfm {

void DomainSpec::validate() const {
  if (!(omega > 0) || !std::isfinite(omega)) throw ValidationError("omega", "must be > 0");
  if (n < 4 || (n & (n - 1)) != 0) throw ValidationError("n", "must be a power of two >= 4");
  if (!(dt > 0) || !std::isfinite(dt)) throw ValidationError("dt", "must be > 0");
  if (!(T >= 0) || !std::isfinite(T)) throw ValidationError("T", "must be >= 0");
}

const char* field_name(std::size_t f) {
  static constexpr std::array<const char*, kNumFields> names = {
      "v_e",   "v_i",   "i_ee",  "i_ei",  "i_ie", "i_ii", "di_ee",
      "di_ei", "di_ie", "di_ii", "w_ee",  "w_ei", "dw_ee", "dw_ei"};
  return names.at(f);
}

PointState FieldState::point(std::size_t idx) const {
  std::array<double, PointState::kSize> a{};
  for (std::size_t f = 0; f < kNumFields; ++f) a[f] = field(f)[idx];
  return PointState::unpack(a);
}

void FieldState::set_point(std::size_t idx, const PointState& s) {
  const auto a = s.pack();
  for (std::size_t f = 0; f < kNumFields; ++f) field(f)[idx] = a[f];
}

FieldState FieldState::constant(std::size_t n, const PointState& s) {
  FieldState st(n);
  const auto a = s.pack();
  for (std::size_t f = 0; f < kNumFields; ++f) std::fill_n(st.field(f), st.points(), a[f]);
  return st;
}

} // namespace mfm
