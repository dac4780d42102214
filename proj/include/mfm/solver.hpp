#pragma once

// Method-of-lines RK4 integrator for the full field system.

#include "mfm/grid.hpp"
#include "mfm/kernels.hpp"
#include "mfm/model.hpp"
#include "mfm/spectral.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mfm {

/// Largest dt for which RK4 is expected to be stable on an n x n grid of side omega.
double stability_bound(const ModelParameters& p, std::size_t n, double omega);

class Integrator {
public:
  Integrator(const ModelParameters& p, SubcorticalInput g, std::size_t n, double omega,
             kernels::Backend backend = kernels::Backend::OpenMP, bool dealias = false);

  /// One classical RK4 step; throws NonFiniteError if the new state is not finite.
  void step(FieldState& s, double dt);
  double stability_bound() const;
  SpectralWorkspace& workspace() { return ws_; }
  const ModelParameters& parameters() const { return coeff_.p; }

private:
  void eval(const double* y, double t, double* out);

  RhsCoefficients coeff_;
  SubcorticalInput g_;
  std::size_t n_;
  kernels::Backend backend_;
  SpectralWorkspace ws_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, lap_;
};

struct MonitorRecord {
  double t = 0;
  std::array<double, 4> min_i{};
  std::array<double, 2> min_w{};
  double Q_minus = std::numeric_limits<double>::quiet_NaN();
  double Q_plus = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<FieldState> snapshots;
  std::vector<MonitorRecord> monitors;
  bool failed = false;
  std::string error;
  std::size_t steps = 0;
};

struct SimulateOptions {
  /// Snapshot stride in steps; 0 keeps only the initial and final states.
  std::size_t snapshot_every = 0;
  std::size_t monitor_every = 1;
  kernels::Backend backend = kernels::Backend::OpenMP;
  bool dealias = false;
  /// Optional (Q_minus, Q_plus) evaluator attached to monitor records.
  std::function<std::pair<double, double>(const FieldState&)> energy;
  /// Called with a warning message (e.g. dt above the stability bound).
  std::function<void(const std::string&)> warn;
};

MonitorRecord monitor_state(const FieldState& s);

/// Integrates from `init` to spec.T. NonFinite failures end the run early with
/// `failed` set and the partial trajectory kept.
Trajectory simulate(const FieldState& init, const DomainSpec& spec, const ModelParameters& p,
                    const SubcorticalInput& g, const SimulateOptions& opts = {});

struct HomogeneousSeries {
  std::vector<double> t;
  std::vector<PointState> states;
};

/// The n = 1 path: the 14-dimensional pointwise ODE with the same RK4 tableau.
HomogeneousSeries reduce_homogeneous(const ModelParameters& p, const SubcorticalInput& g,
                                     const PointState& init, double T, double dt);

/// Scalar telegraph equation w'' + 2a w' + a^2 w = c^2 Lap w + S(x) with a frozen
/// source, integrated with RK4 and the spectral Laplacian. Returns w at time T.
struct WaveProblem {
  double a = 0;
  double c2 = 0;
  std::vector<double> w0, w0p, source;
};
std::vector<double> simulate_wave_frozen(const WaveProblem& prob, std::size_t n, double omega, double T,
                                         double dt);

} // namespace mfm
