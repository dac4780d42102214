#include "mfm/io.hpp"

#include "mfm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfm {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

template <typename V>
json vec(const V& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(number(v(k)));
  return a;
}

json mat(const Mat6& m) {
  json a = json::array();
  for (int r = 0; r < 6; ++r) a.push_back(vec(Eigen::Matrix<double, 6, 1>(m.row(r).transpose())));
  return a;
}

template <std::size_t N>
json arr(const std::array<double, N>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

} // namespace

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string snapshot_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08zu.csv", index);
  return buf;
}

void write_snapshot_csv(const std::string& path, const FieldState& s, double omega) {
  auto f = open_out(path);
  f << "x1,x2";
  for (std::size_t k = 0; k < kNumFields; ++k) f << ',' << field_name(k);
  f << '\n';
  const double h = omega / static_cast<double>(s.n);
  char buf[32];
  for (std::size_t j = 0; j < s.n; ++j)
    for (std::size_t k = 0; k < s.n; ++k) {
      const std::size_t q = j * s.n + k;
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(j) * h);
      f << buf;
      std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(k) * h);
      f << buf;
      for (std::size_t fld = 0; fld < kNumFields; ++fld) {
        std::snprintf(buf, sizeof buf, ",%.9g", s.field(fld)[q]);
        f << buf;
      }
      f << '\n';
    }
}

FieldState read_snapshot_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(0, "", "cannot read snapshot '" + path + "'");
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<double>> rows;
  int ln = 1;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(ln, "", "bad number in snapshot: " + cell);
      }
    }
    if (row.size() != 2 + kNumFields) throw ParseError(ln, "", "snapshot row has wrong column count");
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows.size()))));
  if (n * n != rows.size() || n == 0) throw ShapeError("snapshot row count is not a square");
  FieldState s(n);
  for (std::size_t q = 0; q < rows.size(); ++q)
    for (std::size_t fld = 0; fld < kNumFields; ++fld) s.field(fld)[q] = rows[q][2 + fld];
  return s;
}

void write_snapshot_index(const std::string& path, const std::vector<FieldState>& snapshots) {
  auto f = open_out(path);
  f << "index,t,file\n";
  char buf[64];
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,", k, snapshots[k].t);
    f << buf << snapshot_filename(k) << '\n';
  }
}

std::vector<double> read_snapshot_index(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(0, "", "cannot read snapshot index '" + path + "'");
  std::string line;
  std::getline(f, line);
  std::vector<double> t;
  int ln = 1;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw ParseError(ln, "", "malformed snapshot index row");
    try {
      t.push_back(std::stod(line.substr(a + 1, b - a - 1)));
    } catch (const std::exception&) {
      throw ParseError(ln, "", "bad time in snapshot index");
    }
  }
  return t;
}

void write_monitor_csv(const std::string& path, const std::vector<MonitorRecord>& rows,
                       const std::vector<double>& bound) {
  auto f = open_out(path);
  f << "t,min_i,min_w,Q_minus,bound\n";
  char buf[128];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const double mi = *std::min_element(r.min_i.begin(), r.min_i.end());
    const double mw = std::min(r.min_w[0], r.min_w[1]);
    const double b = k < bound.size() ? bound[k] : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g\n", r.t, mi, mw, r.Q_minus, b);
    f << buf;
  }
}

void write_energy_csv(const std::string& path, const std::vector<EnergyRow>& rows) {
  auto f = open_out(path);
  f << "t,Q_minus,Q_plus,bound,in_cone\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d\n", r.t, r.Q_minus, r.Q_plus, r.bound, r.in_cone ? 1 : 0);
    f << buf;
  }
}

json to_json(const ModelParameters& p) {
  json j = json::object();
  const auto& keys = parameter_keys();
  for (std::size_t k = 0; k < keys.size(); ++k) j[keys[k]] = parameter_value(p, k);
  return j;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["parameters"] = to_json(cfg.parameters);
  j["input"] = {{"g_ee", cfg.input(0)}, {"g_ei", cfg.input(1)}, {"g_ie", cfg.input(2)}, {"g_ii", cfg.input(3)}};
  j["domain"] = {{"omega", cfg.domain.omega}, {"n", cfg.domain.n}, {"dt", cfg.domain.dt}, {"T", cfg.domain.T}};
  j["initial"] = {{"preset", preset_name(cfg.initial.preset)},
                  {"amplitude", cfg.initial.amplitude},
                  {"m1", cfg.initial.m1},
                  {"m2", cfg.initial.m2},
                  {"path", cfg.initial.path}};
  j["analysis"] = {{"theta", cfg.analysis.theta ? json(*cfg.analysis.theta) : json("auto")},
                   {"epsilon", cfg.analysis.epsilon ? json(*cfg.analysis.epsilon) : json("auto")},
                   {"eta", cfg.analysis.eta},
                   {"snapshot_every", cfg.analysis.snapshot_every},
                   {"output", cfg.analysis.output},
                   {"seed", cfg.analysis.seed},
                   {"radius_cap", cfg.analysis.radius_cap}};
  j["warnings"] = cfg.warnings;
  return j;
}

json to_json(const HomogeneousEquilibrium& eq) {
  return {{"v_e", vec(eq.v_e)},
          {"i_e", vec(eq.i_e)},
          {"w_e", vec(eq.w_e)},
          {"residual_norm", number(eq.residual_norm)},
          {"converged", eq.converged},
          {"iterations", eq.iterations}};
}

json to_json(const SecondaryRoot& r) {
  return {{"v0", vec(r.v0)}, {"i0", vec(r.i0)}, {"separation", number(r.separation)}, {"residual", number(r.residual)}};
}

json to_json(const NoncompactnessReport& r) {
  json roots = json::array();
  for (const auto& x : r.roots) roots.push_back(to_json(x));
  return {{"equilibrium", to_json(r.equilibrium)},
          {"secondary_roots", roots},
          {"secondary_root", r.root ? to_json(*r.root) : json(nullptr)},
          {"J_e", mat(r.J_e)},
          {"J_0", mat(r.J_0)},
          {"det_e", number(r.det_e)},
          {"det_0", number(r.det_0)},
          {"det_scale_e", number(r.det_scale_e)},
          {"det_scale_0", number(r.det_scale_0)},
          {"reduction_coeffs", arr(r.reduction_coeffs)},
          {"pivot", number(r.pivot)},
          {"degenerate_pivot", r.degenerate_pivot},
          {"D_coeff", number(r.D_coeff)},
          {"spectral_lower_bound", number(r.spectral_lower_bound)},
          {"alpha_bound", number(r.alpha_bound)},
          {"assumption_1", r.assumption_1},
          {"assumption_2", r.assumption_2},
          {"assumption_3", r.assumption_3},
          {"assumption_4", r.assumption_4},
          {"all_assumptions_hold", r.all_hold()},
          {"notes", r.notes}};
}

json to_json(const ThetaWindow& w) {
  return {{"coeff_ee", w.coeff_ee},   {"coeff_ei", w.coeff_ei},   {"lhs_coeff", w.lhs_coeff},
          {"theta_min", w.theta_min}, {"theta_max", w.theta_max}, {"feasible", w.feasible}};
}

json to_json(const AbsorbingSetReport& r) {
  return {{"theta", number(r.theta)},
          {"epsilon", number(r.epsilon)},
          {"epsilon_range", {number(r.epsilon_range.lo), number(r.epsilon_range.hi)}},
          {"omega", r.omega},
          {"g_sup", r.g_sup},
          {"alpha_terms", arr(r.alpha_terms)},
          {"alpha_w", number(r.alpha_w)},
          {"beta_w", number(r.beta_w)},
          {"rho_w2", number(r.rho_w2)},
          {"norm_UNJ7", r.norm_UNJ7},
          {"norm_U", r.norm_U},
          {"trace_L3M2", r.trace_L3M2},
          {"feasible", r.feasible}};
}

json to_json(const StrongAbsorbingReport& r) {
  return {{"alpha_terms", arr(r.alpha_terms)},
          {"alpha_s", number(r.alpha_s)},
          {"eps1", number(r.eps1)},
          {"eps2", number(r.eps2)},
          {"eta", r.eta},
          {"eta_caveat", "eta is a user-supplied positive constant; it is not determined by the model data"},
          {"beta_s", number(r.beta_s)},
          {"rho_s2", number(r.rho_s2)},
          {"feasible", r.feasible}};
}

json to_json(const LyapunovVerdict& v) {
  return {{"holds", v.holds},
          {"tolerance", v.tolerance},
          {"first_violation", v.first_violation ? json(*v.first_violation) : json(nullptr)},
          {"snapshots", v.trace.size()}};
}

void write_json(const std::string& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

} // namespace mfm
