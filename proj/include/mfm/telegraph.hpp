#pragma once

// Reference solver for one scalar telegraph equation
//
//   w_tt + 2 a w_t + a^2 w = c^2 Lap w + S(x, t)
//
// on the periodic square, through q = e^{a t} w, which turns it into the
// undamped wave equation with speed c. In coordinates scaled by 1/c the wave
// speed is 1 and the Poisson ball around x has radius t; the integrals below
// use the substitution r = t sin(psi), which removes the inverse square-root
// weight of the two-dimensional Poisson kernel.

#include <array>
#include <cstddef>
#include <functional>
#include <string>

namespace mfm {

using ScalarFn = std::function<double(double, double)>;
using GradientFn = std::function<std::array<double, 2>(double, double)>;
using SourceFn = std::function<double(double, double, double)>;

struct TelegraphProblem {
  double a = 0;        // nu * Lambda (1/s)
  double c = 0;        // wave speed sqrt(3/2) nu (cm/s)
  double omega = 10;   // physical side of the periodic square (cm)
  ScalarFn w0;
  GradientFn grad_w0;
  ScalarFn w0p;
  SourceFn forcing;    // S(x1, x2, t); may be empty for zero forcing

  /// Side of the square in the scaled coordinates x / c.
  double scaled_side() const { return omega / c; }
};

struct QuadratureOptions {
  double rel_tol = 1e-6;
  unsigned max_depth = 12;
};

/// w(x, t) for t > 0. Throws QuadratureFailure when the requested tolerance is not met.
double poisson_eval(const TelegraphProblem& prob, double x1, double x2, double t,
                    const QuadratureOptions& opts = {});

struct DwVerdict {
  bool member = true;
  enum class Clause { None, A, B } clause = Clause::None;
  double x1 = 0, x2 = 0;   // base point of the witness
  double y1 = 0, y2 = 0;   // ball point (clause B)
  double value = 0;        // the negative quantity found
  double radius = 0;       // physical ball radius used
  bool capped = false;     // radius was limited by radius_cap
};

struct DwCheckOptions {
  std::size_t base_points = 32;  // per side
  std::size_t directions = 64;
  std::size_t radii = 16;
  std::size_t grid_a = 32;       // clause (a) grid per side
  double radius_cap = 100.0;     // cm
  double tol = 0.0;              // values >= -tol count as nonnegative
};

/// Checks w0p + a w0 >= 0 on a grid and w0(y) + grad w0(y).(y - x) >= 0 for
/// sampled y in the ball of physical radius c * T around sampled x. The functions
/// are taken as omega-periodic.
DwVerdict check_Dw_condition(const ScalarFn& w0, const GradientFn& grad_w0, const ScalarFn& w0p, double a,
                             double c, double T, double omega, const DwCheckOptions& opts = {});

} // namespace mfm
