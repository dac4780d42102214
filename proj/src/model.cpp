#include "mfm/model.hpp"

#include "mfm/errors.hpp"

#include <cstdio>

namespace mfm {

namespace {

constexpr std::array<const char*, 29> kKeys = {
    "tau_e",  "tau_i",    "V_ee",     "V_ei",     "V_ie",     "V_ii",     "gamma_ee", "gamma_ei",
    "gamma_ie", "gamma_ii", "ups_ee", "ups_ei",   "ups_ie",   "ups_ii",   "N_ee",     "N_ei",
    "N_ie",   "N_ii",     "nu",       "Lam_ee",   "Lam_ei",   "M_ee",     "M_ei",     "F_e",
    "F_i",    "mu_e",     "mu_i",     "sigma_e",  "sigma_i"};

template <typename P>
auto& member(P& p, std::size_t k) {
  switch (k) {
  case 0: return p.tau_e;
  case 1: return p.tau_i;
  case 2: return p.V_ee;
  case 3: return p.V_ei;
  case 4: return p.V_ie;
  case 5: return p.V_ii;
  case 6: return p.gamma_ee;
  case 7: return p.gamma_ei;
  case 8: return p.gamma_ie;
  case 9: return p.gamma_ii;
  case 10: return p.ups_ee;
  case 11: return p.ups_ei;
  case 12: return p.ups_ie;
  case 13: return p.ups_ii;
  case 14: return p.N_ee;
  case 15: return p.N_ei;
  case 16: return p.N_ie;
  case 17: return p.N_ii;
  case 18: return p.nu;
  case 19: return p.Lam_ee;
  case 20: return p.Lam_ei;
  case 21: return p.M_ee;
  case 22: return p.M_ei;
  case 23: return p.F_e;
  case 24: return p.F_i;
  case 25: return p.mu_e;
  case 26: return p.mu_i;
  case 27: return p.sigma_e;
  case 28: return p.sigma_i;
  default: throw std::out_of_range("parameter index");
  }
}

struct Range {
  double lo, hi;
};

// Published physiological ranges, indexed like kKeys.
constexpr std::array<Range, 29> kRanges = {{
    {0.005, 0.15}, {0.005, 0.15},                             // tau
    {50, 80},      {50, 80},      {-20, -5},   {-20, -5},     // V
    {100, 1000},   {100, 1000},   {10, 500},   {10, 500},     // gamma
    {0.1, 2.0},    {0.1, 2.0},    {0.1, 2.0},  {0.1, 2.0},    // Upsilon
    {2000, 5000},  {2000, 5000},  {100, 1000}, {100, 1000},   // N
    {100, 1000},                                              // nu
    {0.1, 1.0},    {0.1, 1.0},                                // Lambda
    {2000, 5000},  {2000, 5000},                              // M
    {50, 500},     {50, 500},                                 // F
    {15, 30},      {15, 30},                                  // mu
    {2, 7},        {2, 7},                                    // sigma
}};

enum class Sign { Positive, Negative, NonNegative, Any };

constexpr Sign sign_rule(std::size_t k) {
  if (k == 4 || k == 5) return Sign::Negative;
  if (k == 23 || k == 24) return Sign::NonNegative;
  if (k == 25 || k == 26) return Sign::Any;
  return Sign::Positive;
}

} // namespace

const std::array<const char*, 29>& parameter_keys() { return kKeys; }

double& parameter_ref(ModelParameters& p, std::size_t key_index) { return member(p, key_index); }

double parameter_value(const ModelParameters& p, std::size_t key_index) { return member(p, key_index); }

std::vector<std::string> ModelParameters::validate() const {
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < kKeys.size(); ++k) {
    const double x = parameter_value(*this, k);
    if (!std::isfinite(x)) throw ValidationError(kKeys[k], "must be finite");
    switch (sign_rule(k)) {
    case Sign::Positive:
      if (!(x > 0)) throw ValidationError(kKeys[k], "must be > 0");
      break;
    case Sign::Negative:
      if (!(x < 0)) throw ValidationError(kKeys[k], "must be < 0");
      break;
    case Sign::NonNegative:
      if (!(x >= 0)) throw ValidationError(kKeys[k], "must be >= 0");
      break;
    case Sign::Any:
      break;
    }
    if (x < kRanges[k].lo || x > kRanges[k].hi) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s = %g outside physiological range [%g, %g]", kKeys[k], x,
                    kRanges[k].lo, kRanges[k].hi);
      warnings.emplace_back(buf);
    }
  }
  return warnings;
}

ModelParameters ModelParameters::table2() {
  ModelParameters p;
  p.tau_e = 11.787e-3;
  p.tau_i = 138.25e-3;
  p.V_ee = 61.264;
  p.V_ei = 51.703;
  p.V_ie = -7.127;
  p.V_ii = -12.679;
  p.gamma_ee = 816.04;
  p.gamma_ei = 261.29;
  p.gamma_ie = 219.09;
  p.gamma_ii = 40.575;
  p.ups_ee = 0.92695;
  p.ups_ei = 1.3012;
  p.ups_ie = 0.19053;
  p.ups_ii = 0.94921;
  p.N_ee = 3893.0;
  p.N_ei = 3326.8;
  p.N_ie = 839.39;
  p.N_ii = 682.41;
  p.nu = 101.78;
  p.Lam_ee = 0.96545;
  p.Lam_ei = 0.96545;
  p.M_ee = 4013.5;
  p.M_ei = 1544.3;
  p.F_e = 266.44;
  p.F_i = 300.65;
  p.mu_e = 30.628;
  p.mu_i = 19.383;
  p.sigma_e = 5.6536;
  p.sigma_i = 3.3140;
  return p;
}

Vec4 ModelParameters::table2_input() { return {83.190, 6407.5, 0.0, 0.0}; }

DerivedMatrices::DerivedMatrices(const ModelParameters& p) {
  Phi = Vec2(p.tau_e, p.tau_i).asDiagonal();
  Psi = Vec4(1.0 / std::abs(p.V_ee), 1.0 / std::abs(p.V_ei), 1.0 / std::abs(p.V_ie), 1.0 / std::abs(p.V_ii))
            .asDiagonal();
  Gamma = Vec4(p.gamma_ee, p.gamma_ei, p.gamma_ie, p.gamma_ii).asDiagonal();
  Ups = Vec4(p.ups_ee, p.ups_ei, p.ups_ie, p.ups_ii).asDiagonal();
  Ncnt = Vec4(p.N_ee, p.N_ei, p.N_ie, p.N_ii).asDiagonal();
  Mcnt = Vec2(p.M_ee, p.M_ei).asDiagonal();
  Lam = Vec2(p.Lam_ee, p.Lam_ei).asDiagonal();
  gamma_min = Gamma.diagonal().minCoeff();
  gamma_max = Gamma.diagonal().maxCoeff();
  Lam_min = std::min(p.Lam_ee, p.Lam_ei);
  Lam_max = std::max(p.Lam_ee, p.Lam_ei);
  tau_max = std::max(p.tau_e, p.tau_i);
}

Eigen::Matrix<double, 2, 4> J1() {
  Eigen::Matrix<double, 2, 4> m;
  m << 1, 0, -1, 0,
       0, 1, 0, -1;
  return m;
}

Mat2 J2() { return Vec2(1, 0).asDiagonal(); }
Mat2 J3() { return Vec2(0, 1).asDiagonal(); }
Vec4 J4() { return {1, 0, 1, 0}; }
Vec4 J5() { return {0, 1, 0, 1}; }

Eigen::Matrix<double, 4, 2> J6() {
  Eigen::Matrix<double, 4, 2> m;
  m << 1, 0,
       0, 1,
       0, 0,
       0, 0;
  return m;
}

Eigen::Matrix<double, 4, 2> J7() {
  Eigen::Matrix<double, 4, 2> m;
  m << 1, 0,
       1, 0,
       0, 1,
       0, 1;
  return m;
}

Mat2 J8() {
  Mat2 m;
  m << 1, 0,
       1, 0;
  return m;
}

std::array<double, PointState::kSize> PointState::pack() const {
  std::array<double, kSize> a{};
  a[0] = v(0);
  a[1] = v(1);
  for (int k = 0; k < 4; ++k) {
    a[2 + k] = i(k);
    a[6 + k] = di(k);
  }
  for (int k = 0; k < 2; ++k) {
    a[10 + k] = w(k);
    a[12 + k] = dw(k);
  }
  return a;
}

PointState PointState::unpack(const std::array<double, kSize>& a) {
  PointState s;
  s.v = Vec2(a[0], a[1]);
  s.i = Vec4(a[2], a[3], a[4], a[5]);
  s.di = Vec4(a[6], a[7], a[8], a[9]);
  s.w = Vec2(a[10], a[11]);
  s.dw = Vec2(a[12], a[13]);
  return s;
}

RhsCoefficients::RhsCoefficients(const ModelParameters& params) : p(params) {
  inv_tau[0] = 1.0 / p.tau_e;
  inv_tau[1] = 1.0 / p.tau_i;
  const double V[4] = {p.V_ee, p.V_ei, p.V_ie, p.V_ii};
  const double g[4] = {p.gamma_ee, p.gamma_ei, p.gamma_ie, p.gamma_ii};
  const double u[4] = {p.ups_ee, p.ups_ei, p.ups_ie, p.ups_ii};
  const double n[4] = {p.N_ee, p.N_ei, p.N_ie, p.N_ii};
  for (int k = 0; k < 4; ++k) {
    inv_absV[k] = 1.0 / std::abs(V[k]);
    gamma[k] = g[k];
    gamma2[k] = g[k] * g[k];
    drive[k] = kNapier * u[k] * g[k];
    N[k] = n[k];
  }
  const double lam[2] = {p.Lam_ee, p.Lam_ei};
  const double m[2] = {p.M_ee, p.M_ei};
  for (int k = 0; k < 2; ++k) {
    two_nu_lam[k] = 2.0 * p.nu * lam[k];
    nu2_lam2[k] = p.nu * p.nu * lam[k] * lam[k];
    M[k] = m[k];
  }
  wave_c2 = 1.5 * p.nu * p.nu;
}

PointState rhs(const PointState& state, const Vec2& lap_w, const ModelParameters& p, const Vec4& g_now) {
  const RhsCoefficients c(p);
  const auto s = state.pack();
  std::array<double, PointState::kSize> ds{};
  const double lap[2] = {lap_w(0), lap_w(1)};
  const double g[4] = {g_now(0), g_now(1), g_now(2), g_now(3)};
  rhs_point(s.data(), lap, g, c, ds.data());
  return PointState::unpack(ds);
}

Vec2 eval_Pv(const Vec2& v, const Vec4& i, const ModelParameters& p) {
  const DerivedMatrices d(p);
  const double a = i.dot(d.Psi * J4());
  const double b = i.dot(d.Psi * J5());
  return v - J1() * i + J2() * v * a + J3() * v * b;
}

Vec4 eval_Pi(const Vec2& v, const Vec4& i, const ModelParameters& p, const Vec4& g) {
  const DerivedMatrices d(p);
  const Vec4 scaled = (d.Gamma.diagonal().array() / (kNapier * d.Ups.diagonal().array())).matrix();
  return scaled.cwiseProduct(i) - d.Ncnt * J7() * firing_rates(v, p) - g;
}

} // namespace mfm
