#pragma once

// Absorbing-set constants, energy functionals and nonnegative-cone membership.

#include "mfm/grid.hpp"
#include "mfm/model.hpp"
#include "mfm/solver.hpp"
#include "mfm/telegraph.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mfm {

class SpectralWorkspace;

struct ThetaWindow {
  double coeff_ee = 0, coeff_ei = 0;  // condition coefficients per unit theta
  double lhs_coeff = 0;               // max of the two
  double theta_min = 0, theta_max = 0;
  bool feasible = false;
  double midpoint() const { return 0.5 * (theta_min + theta_max); }
};

ThetaWindow theta_window(const ModelParameters& p);

struct Interval {
  double lo = 0, hi = 0;
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains_open(double x) const { return x > lo && x < hi; }
};

/// Admissible epsilon for a given theta. Throws EmptyInterval for theta outside the window.
Interval epsilon_range(double theta, const ModelParameters& p);

/// Largest singular value of a small dense matrix, from the Gram matrix eigenvalues.
double spectral_norm(const Eigen::MatrixXd& m);

struct AbsorbingSetReport {
  double theta = 0, epsilon = 0;
  Interval epsilon_range;
  double omega = 0;      // domain side, |Omega| = omega^2
  double g_sup = 0;
  std::array<double, 5> alpha_terms{};
  double alpha_w = 0;
  double beta_w = 0;
  double beta_i = 0;     // the first (current) part of beta_w
  double rho_w2 = 0;
  double norm_UNJ7 = 0, norm_U = 0, trace_L3M2 = 0;
  bool feasible = false;
};

/// Throws InfeasibleTheta when any term of the decay rate is <= 0, unless
/// `allow_infeasible` is set, in which case `feasible` is false.
AbsorbingSetReport absorbing_constants(const ModelParameters& p, double theta, double epsilon, double g_sup,
                                       double omega, bool allow_infeasible = false);

/// Time after which every state with Q_plus <= R^2 lies in {Q_minus <= rho^2}.
double absorb_time(double R, double rho, const AbsorbingSetReport& rep);

struct StrongAbsorbingReport {
  std::array<double, 5> alpha_terms{};
  double alpha_s = 0;
  double eps1 = 0, eps2 = 0;
  double eta = 1;
  double beta_s = 0;
  double rho_s2 = 0;
  bool feasible = false;
};

StrongAbsorbingReport strong_constants(const ModelParameters& p, double theta, double epsilon, double eta,
                                       double g_sup, double rho_w, double omega,
                                       bool allow_infeasible = false);

/// ||g||_{L^2(Omega)} of a spatially constant input.
double g_l2_norm(const Vec4& g, double omega);
/// sup over sampled times of ||g(t)||_{L^2(Omega)}.
double g_sup_norm(const SubcorticalInput& g, double omega, double T, std::size_t samples = 1000);

struct EnergyPair {
  double minus = 0, plus = 0;
};

/// Q_minus and Q_plus on the grid (cell area (omega/n)^2, spectral H^1 term).
EnergyPair energy(const FieldState& s, const ModelParameters& p, double theta, SpectralWorkspace& ws);
double Q_minus(const FieldState& s, const ModelParameters& p, double theta, double omega);
double Q_plus(const FieldState& s, const ModelParameters& p, double theta, double omega);

struct EnergyRow {
  double t = 0, Q_minus = 0, Q_plus = 0, bound = 0;
  bool in_cone = true;
};

struct LyapunovVerdict {
  std::vector<EnergyRow> trace;
  bool holds = true;
  std::optional<std::size_t> first_violation;
  double tolerance = 1e-3;
};

/// Cone test used for the monitor precondition.
bool state_in_cone(const FieldState& s, double tol);

/// Checks Q_minus(t) <= Q_plus(0) e^{-alpha t} + rho_w^2 (1 - e^{-alpha t}) + tol (1 + Q_plus(0))
/// at each snapshot. Throws ConeViolation when a snapshot leaves the nonnegative cone.
LyapunovVerdict lyapunov_monitor(const Trajectory& traj, const AbsorbingSetReport& rep, const ModelParameters& p,
                                 double tol = 1e-3);

struct CellVerdict {
  bool member = true;
  std::size_t field = 0;
  std::size_t index = 0;
  double value = 0;
  std::string reason;
};

/// i >= 0 and di + Gamma i >= 0 at every grid point.
CellVerdict in_D_i(const FieldState& s, const ModelParameters& p, double tol = 0.0);
/// Every channel >= 0; waveforms are sampled on [0, T].
CellVerdict in_D_g(const SubcorticalInput& g, double T = 1.0, std::size_t samples = 1000);
/// D_i plus D_w for both w channels, using a bilinear interpolant of w and its spectral gradient.
CellVerdict in_D_Bio(const FieldState& s, const ModelParameters& p, double omega, double T,
                     const DwCheckOptions& opts = {});

} // namespace mfm
