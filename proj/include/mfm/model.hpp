#pragma once

// Mean field neocortex model: parameters, derived matrices, firing-rate
// nonlinearity and pointwise right-hand sides.
//
// Index conventions used throughout the library:
//   v = (v_E, v_I)                      mV
//   i = (i_EE, i_EI, i_IE, i_II)        mV
//   w = (w_EE, w_EI)                    1/s
//   g = (g_EE, g_EI, g_IE, g_II)        1/s
// Potentials are measured relative to the resting potential.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace mfm {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Napier's constant at full double precision.
inline constexpr double kNapier = std::numbers::e;

enum class Population { E, I };

struct ModelParameters {
  double tau_e{}, tau_i{};
  double V_ee{}, V_ei{}, V_ie{}, V_ii{};
  double gamma_ee{}, gamma_ei{}, gamma_ie{}, gamma_ii{};
  double ups_ee{}, ups_ei{}, ups_ie{}, ups_ii{};
  double N_ee{}, N_ei{}, N_ie{}, N_ii{};
  double nu{};
  double Lam_ee{}, Lam_ei{};
  double M_ee{}, M_ei{};
  double F_e{}, F_i{};
  double mu_e{}, mu_i{};
  double sigma_e{}, sigma_i{};

  bool operator==(const ModelParameters&) const = default;

  /// Hard checks on signs; throws ValidationError naming the offending key.
  /// Returns warnings for values outside the published physiological ranges.
  std::vector<std::string> validate() const;

  /// The biophysically plausible set with a noncompact equilibrium set.
  static ModelParameters table2();
  /// Mean subcortical input rates belonging to table2().
  static Vec4 table2_input();
};

/// Names of the parameter keys in file order.
const std::array<const char*, 29>& parameter_keys();
double& parameter_ref(ModelParameters& p, std::size_t key_index);
double parameter_value(const ModelParameters& p, std::size_t key_index);

struct DerivedMatrices {
  Mat2 Phi;                     // diag(tau_E, tau_I)
  Mat4 Psi;                     // diag(1/|V_xy|)
  Mat4 Gamma;                   // diag(gamma_xy)
  Mat4 Ups;                     // diag(Upsilon_xy)
  Mat4 Ncnt;                    // diag(N_xy)
  Mat2 Mcnt;                    // diag(M_EE, M_EI)
  Mat2 Lam;                     // diag(Lambda_EE, Lambda_EI)
  double gamma_min{}, gamma_max{};
  double Lam_min{}, Lam_max{};
  double tau_max{};

  explicit DerivedMatrices(const ModelParameters& p);
};

// Fixed coupling matrices.
Eigen::Matrix<double, 2, 4> J1();
Mat2 J2();
Mat2 J3();
Vec4 J4();
Vec4 J5();
Eigen::Matrix<double, 4, 2> J6();
Eigen::Matrix<double, 4, 2> J7();
Mat2 J8();

inline double firing_rate(double v, Population pop, const ModelParameters& p) {
  const double F = pop == Population::E ? p.F_e : p.F_i;
  const double mu = pop == Population::E ? p.mu_e : p.mu_i;
  const double sigma = pop == Population::E ? p.sigma_e : p.sigma_i;
  const double arg = std::clamp(-std::numbers::sqrt2 * (v - mu) / sigma, -500.0, 500.0);
  return F / (1.0 + std::exp(arg));
}

inline double firing_rate_deriv(double v, Population pop, const ModelParameters& p) {
  const double F = pop == Population::E ? p.F_e : p.F_i;
  const double mu = pop == Population::E ? p.mu_e : p.mu_i;
  const double sigma = pop == Population::E ? p.sigma_e : p.sigma_i;
  const double arg = std::clamp(-std::numbers::sqrt2 * (v - mu) / sigma, -500.0, 500.0);
  const double ex = std::exp(arg);
  const double den = 1.0 + ex;
  return std::numbers::sqrt2 / sigma * F * ex / (den * den);
}

/// f(v) = (f_E(v_E), f_I(v_I)).
inline Vec2 firing_rates(const Vec2& v, const ModelParameters& p) {
  return {firing_rate(v(0), Population::E, p), firing_rate(v(1), Population::I, p)};
}

struct PointState {
  Vec2 v = Vec2::Zero();
  Vec4 i = Vec4::Zero();
  Vec4 di = Vec4::Zero();
  Vec2 w = Vec2::Zero();
  Vec2 dw = Vec2::Zero();

  static constexpr std::size_t kSize = 14;
  std::array<double, kSize> pack() const;
  static PointState unpack(const std::array<double, kSize>& a);
};

/// Scalar constants consumed by the pointwise right-hand side.
struct RhsCoefficients {
  double inv_tau[2];
  double inv_absV[4];
  double gamma[4];
  double gamma2[4];
  double drive[4];   // e * Upsilon_xy * gamma_xy
  double N[4];
  double two_nu_lam[2];
  double nu2_lam2[2];
  double M[2];
  double wave_c2;    // (3/2) nu^2
  ModelParameters p;

  explicit RhsCoefficients(const ModelParameters& params);
};

/// Pointwise time derivative of the 14 state components.
///
/// `s` and `ds` are laid out as (v_E, v_I, i_EE..i_II, di_EE..di_II, w_EE, w_EI,
/// dw_EE, dw_EI). `lap_w` is the Laplacian of (w_EE, w_EI) at the point.
inline void rhs_point(const double* s, const double* lap_w, const double* g, const RhsCoefficients& c,
                      double* ds) {
  const double vE = s[0], vI = s[1];
  const double* i = s + 2;
  const double* di = s + 6;
  const double* w = s + 10;
  const double* dw = s + 12;

  ds[0] = c.inv_tau[0] * (-vE + i[0] - i[2] - vE * (i[0] * c.inv_absV[0] + i[2] * c.inv_absV[2]));
  ds[1] = c.inv_tau[1] * (-vI + i[1] - i[3] - vI * (i[1] * c.inv_absV[1] + i[3] * c.inv_absV[3]));

  const double fE = firing_rate(vE, Population::E, c.p);
  const double fI = firing_rate(vI, Population::I, c.p);
  const double input[4] = {c.N[0] * fE + w[0] + g[0], c.N[1] * fE + w[1] + g[1], c.N[2] * fI + g[2],
                           c.N[3] * fI + g[3]};
  for (int k = 0; k < 4; ++k) {
    ds[2 + k] = di[k];
    ds[6 + k] = -2.0 * c.gamma[k] * di[k] - c.gamma2[k] * i[k] + c.drive[k] * input[k];
  }
  for (int k = 0; k < 2; ++k) {
    ds[10 + k] = dw[k];
    ds[12 + k] = -c.two_nu_lam[k] * dw[k] - c.nu2_lam2[k] * w[k] + c.wave_c2 * lap_w[k] +
                 c.nu2_lam2[k] * c.M[k] * fE;
  }
}

/// Time derivative of a point state; `lap_w` is the Laplacian of w at the point.
PointState rhs(const PointState& state, const Vec2& lap_w, const ModelParameters& p, const Vec4& g_now);

/// P_v(v, i) = v - J1 i + J2 v i^T Psi J4 + J3 v i^T Psi J5.
Vec2 eval_Pv(const Vec2& v, const Vec4& i, const ModelParameters& p);
/// P_i(v, i) = (e Ups)^{-1} Gamma i - N J7 f(v) - g.
Vec4 eval_Pi(const Vec2& v, const Vec4& i, const ModelParameters& p, const Vec4& g);

/// Deterministic subcortical input, constant or a user waveform per channel.
class SubcorticalInput {
public:
  using Waveform = std::function<Vec4(double)>;

  SubcorticalInput() = default;
  explicit SubcorticalInput(const Vec4& constant) : mean_(constant) {}
  SubcorticalInput(Waveform waveform, const Vec4& mean) : mean_(mean), waveform_(std::move(waveform)) {}

  bool is_constant() const { return !waveform_; }
  Vec4 at(double t) const { return waveform_ ? waveform_(t) : mean_; }
  const Vec4& mean() const { return mean_; }

private:
  Vec4 mean_ = Vec4::Zero();
  Waveform waveform_;
};

} // namespace mfm
