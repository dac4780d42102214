#pragma once

// Subcommand orchestration shared by the CLI and the tests.

#include "mfm/config.hpp"
#include "mfm/grid.hpp"
#include "mfm/telegraph.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfm {

enum class Subcommand { Simulate, Equilibrium, Noncompactness, Absorbing, OracleCheck };

std::optional<Subcommand> parse_subcommand(const std::string& name);

struct RunOptions {
  std::optional<std::string> out;           // directory, or a path ending in .json for the report
  std::optional<std::string> theta;         // "auto" or a number; overrides the config
  std::optional<std::size_t> snapshot_every;
  int threads = 0;                          // 0 = MFM_THREADS or OpenMP default
};

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitVerdict = 2 };

/// Builds the initial FieldState described by cfg.initial.
FieldState initial_state(const RunConfig& cfg);

/// Frozen-forcing telegraph problem for the w_EE channel around the homogeneous
/// equilibrium: smooth w0, w0p and a source nu^2 Lam^2 M f_E(v_E(x)) from a
/// fixed v_E profile. The same closed-form data feed both solvers.
TelegraphProblem oracle_problem(const ModelParameters& p, const Vec4& g, double omega);

struct OracleRow {
  double x1, x2, t, w_spectral, w_poisson, abs_err;
};

struct OracleComparison {
  std::vector<OracleRow> rows;
  double rel_l2 = 0;
};

/// Runs the spectral RK4 wave solver on an n x n grid and compares it with
/// poisson_eval at every `stride`-th grid point in each direction.
OracleComparison oracle_compare(const TelegraphProblem& prob, std::size_t n, double t, double dt,
                                std::size_t stride);

/// Runs one subcommand, writing artifacts and logging to `log`. Returns an ExitCode.
int run_subcommand(Subcommand cmd, const RunConfig& cfg, const RunOptions& opts, std::ostream& log);

} // namespace mfm
