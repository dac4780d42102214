#pragma once

// CSV artifacts and JSON report serialization.

#include "mfm/analysis.hpp"
#include "mfm/config.hpp"
#include "mfm/equilibrium.hpp"
#include "mfm/grid.hpp"
#include "mfm/solver.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mfm {

/// snap_%08d.csv for a snapshot index.
std::string snapshot_filename(std::size_t index);
void write_snapshot_csv(const std::string& path, const FieldState& s, double omega);
/// Reads a snapshot written by write_snapshot_csv; n is inferred from the row count.
FieldState read_snapshot_csv(const std::string& path);
/// Sidecar index "index,t,file": the snapshot CSV layout has no time column.
void write_snapshot_index(const std::string& path, const std::vector<FieldState>& snapshots);
std::vector<double> read_snapshot_index(const std::string& path);

/// Columns t,min_i,min_w,Q_minus,bound.
void write_monitor_csv(const std::string& path, const std::vector<MonitorRecord>& rows,
                       const std::vector<double>& bound);
/// Columns t,Q_minus,Q_plus,bound,in_cone.
void write_energy_csv(const std::string& path, const std::vector<EnergyRow>& rows);

nlohmann::json to_json(const ModelParameters& p);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const HomogeneousEquilibrium& eq);
nlohmann::json to_json(const SecondaryRoot& r);
nlohmann::json to_json(const NoncompactnessReport& r);
nlohmann::json to_json(const ThetaWindow& w);
nlohmann::json to_json(const AbsorbingSetReport& r);
nlohmann::json to_json(const StrongAbsorbingReport& r);
nlohmann::json to_json(const LyapunovVerdict& v);

/// JSON number, or null for non-finite values.
nlohmann::json number(double x);

void write_json(const std::string& path, const nlohmann::json& j);

} // namespace mfm
