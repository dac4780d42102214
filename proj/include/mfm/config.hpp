#pragma once

// Run configuration files: INI-style sections of `key = value` lines; `#` and
// `;` start comments. [parameters] and [input] are required.

#include "mfm/grid.hpp"
#include "mfm/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfm {

enum class InitialPreset { Zero, Equilibrium, PerturbedEquilibrium, File };

struct InitialSpec {
  InitialPreset preset = InitialPreset::Equilibrium;
  double amplitude = 1.0;  // mV, perturbation of v
  int m1 = 1, m2 = 0;      // perturbation wavenumbers
  std::string path;        // snapshot CSV for InitialPreset::File

  bool operator==(const InitialSpec&) const = default;
};

struct AnalysisSpec {
  std::optional<double> theta;    // empty = window midpoint
  std::optional<double> epsilon;  // empty = range midpoint
  double eta = 1.0;
  std::size_t snapshot_every = 0;
  std::string output = "out";
  std::uint64_t seed = 0;
  double radius_cap = 100.0;      // cm, cap on the ball radius of the D_w check

  bool operator==(const AnalysisSpec&) const = default;
};

struct RunConfig {
  ModelParameters parameters;
  Vec4 input = Vec4::Zero();
  DomainSpec domain;
  InitialSpec initial;
  AnalysisSpec analysis;
  std::vector<std::string> warnings;  // range warnings; not part of equality

  bool operator==(const RunConfig& o) const;
};

const char* preset_name(InitialPreset p);

/// Throws ParseError (with line number and key) or ValidationError.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
/// Text that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

} // namespace mfm
