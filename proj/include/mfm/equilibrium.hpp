#pragma once

// Space-homogeneous equilibria, the secondary root (v0, i0), Jacobians of the
// equilibrium maps and the four hypotheses of the noncompactness test.

#include "mfm/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mfm {

class SpectralWorkspace;

struct HomogeneousEquilibrium {
  Vec2 v_e = Vec2::Zero();
  Vec4 i_e = Vec4::Zero();
  Vec2 w_e = Vec2::Zero();
  double residual_norm = 0;
  bool converged = false;
  int iterations = 0;
};

/// i as a function of v at a homogeneous steady state (w eliminated).
Vec4 steady_current(const Vec2& v, const ModelParameters& p, const Vec4& g);
/// w = M J8 f(v).
Vec2 steady_wave(const Vec2& v, const ModelParameters& p);

/// Damped Newton on the reduced 2-d system in v. Does not throw on failure:
/// the best iterate is returned with converged = false.
HomogeneousEquilibrium solve_homogeneous(const ModelParameters& p, const Vec4& g_mean,
                                         const Vec2& v_init = Vec2::Zero());

/// Full steady-state residual (P_v, P_i - J6 w, w - M J8 f) in the max norm.
double equilibrium_residual(const Vec2& v, const Vec4& i, const Vec2& w, const ModelParameters& p,
                            const Vec4& g);

/// 6x6 Jacobian of (P_v, P_i) with respect to (v, i).
Mat6 jacobian_P(const Vec2& v, const Vec4& i, const ModelParameters& p);

struct SearchBox {
  double lo = -50.0, hi = 100.0;  // mV, both components
  std::size_t cells = 200;        // per side
};

struct SecondaryRoot {
  Vec2 v0 = Vec2::Zero();
  Vec4 i0 = Vec4::Zero();
  double separation = 0;  // max-norm distance of (v0, i0) to (v_e, i_e)
  double residual = 0;
};

/// i0(v) from P_i(v, i0) = P_i(v_e, i_e).
Vec4 secondary_current(const Vec2& v, const HomogeneousEquilibrium& eq, const ModelParameters& p);

/// All roots of P_v(v, i0(v)) in the box other than v_e, ordered by distance to
/// v_e. Throws EmptyResult when there are none.
std::vector<SecondaryRoot> find_secondary(const ModelParameters& p, const Vec4& g_mean,
                                          const HomogeneousEquilibrium& eq, const SearchBox& box = {});

struct NoncompactnessReport {
  HomogeneousEquilibrium equilibrium;
  std::vector<SecondaryRoot> roots;
  std::optional<SecondaryRoot> root;  // the root used for J_0
  Mat6 J_e = Mat6::Zero();
  Mat6 J_0 = Mat6::Zero();
  double det_e = 0, det_0 = 0;
  double det_scale_e = 0, det_scale_0 = 0;
  /// (phi_vE, phi_vI, phi_iEI, phi_iIE, phi_iII) per unit phi_iEE.
  std::array<double, 5> reduction_coeffs{};
  double pivot = 0;
  bool degenerate_pivot = false;
  double D_coeff = 0;
  double spectral_lower_bound = 0;
  double alpha_bound = 0;
  bool assumption_1 = false, assumption_2 = false, assumption_3 = false, assumption_4 = false;
  std::vector<std::string> notes;

  bool all_hold() const { return assumption_1 && assumption_2 && assumption_3 && assumption_4; }
};

NoncompactnessReport check_noncompactness(const ModelParameters& p, const Vec4& g_mean, const SearchBox& box = {});

/// Eigenvalue of D = c (-(3/2) Lap + Lam^2)^{-1} on the mode with angular wavenumber (k1, k2).
double D_symbol(double c, double lam2, double k1, double k2);
/// Applies D to a grid field through the workspace's Fourier transform.
void apply_D(SpectralWorkspace& ws, double c, double lam2, const double* in, double* out);

} // namespace mfm
