#include "mfm/config.hpp"

#include "mfm/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mfm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

double to_double(const std::string& key, const Entry& e) {
  double v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(e.line, key, "'" + key + "': not a number: " + e.value);
  return v;
}

long long to_integer(const std::string& key, const Entry& e) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(e.line, key, "'" + key + "': not an integer: " + e.value);
  return v;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = [] {
    std::map<std::string, std::set<std::string>> m;
    for (const char* k : parameter_keys()) m["parameters"].insert(k);
    m["input"] = {"g_ee", "g_ei", "g_ie", "g_ii"};
    m["domain"] = {"omega", "n", "dt", "T"};
    m["initial"] = {"preset", "amplitude", "m1", "m2", "path"};
    m["analysis"] = {"theta", "epsilon", "eta", "snapshot_every", "output", "seed", "radius_cap"};
    return m;
  }();
  return s;
}

} // namespace

const char* preset_name(InitialPreset p) {
  switch (p) {
  case InitialPreset::Zero: return "zero";
  case InitialPreset::Equilibrium: return "equilibrium";
  case InitialPreset::PerturbedEquilibrium: return "perturbed-equilibrium";
  case InitialPreset::File: return "file";
  }
  return "?";
}

bool RunConfig::operator==(const RunConfig& o) const {
  return parameters == o.parameters && input == o.input && domain.omega == o.domain.omega &&
         domain.n == o.domain.n && domain.dt == o.domain.dt && domain.T == o.domain.T && initial == o.initial &&
         analysis == o.analysis;
}

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string raw, current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (line == 1 && s.rfind("\xEF\xBB\xBF", 0) == 0) s.erase(0, 3);
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "", "malformed section header: " + s);
      current = trim(s.substr(1, s.size() - 2));
      if (!schema().count(current)) throw ParseError(line, current, "unknown section [" + current + "]");
      if (sections.count(current)) throw ParseError(line, current, "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "", "expected 'key = value': " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (current.empty()) throw ParseError(line, key, "key '" + key + "' appears before any section");
    if (!schema().at(current).count(key))
      throw ParseError(line, key, "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key)) throw ParseError(line, key, "duplicate key '" + key + "'");
    if (value.empty()) throw ParseError(line, key, "empty value for '" + key + "'");
    sections[current][key] = {value, line};
  }

  std::string missing;
  for (const char* req : {"parameters", "input"})
    if (!sections.count(req)) missing += std::string(missing.empty() ? "" : ", ") + "[" + req + "]";
  if (!missing.empty()) throw ParseError(0, "", "missing required section(s): " + missing);

  RunConfig cfg;
  const Section& ps = sections["parameters"];
  const auto& keys = parameter_keys();
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto it = ps.find(keys[k]);
    if (it == ps.end()) throw ParseError(0, keys[k], std::string("missing key '") + keys[k] + "' in [parameters]");
    parameter_ref(cfg.parameters, k) = to_double(keys[k], it->second);
  }
  const Section& is = sections["input"];
  const char* gkeys[4] = {"g_ee", "g_ei", "g_ie", "g_ii"};
  for (int c = 0; c < 4; ++c) {
    const auto it = is.find(gkeys[c]);
    if (it == is.end()) throw ParseError(0, gkeys[c], std::string("missing key '") + gkeys[c] + "' in [input]");
    cfg.input(c) = to_double(gkeys[c], it->second);
    if (!std::isfinite(cfg.input(c))) throw ValidationError(gkeys[c], "must be finite");
  }

  if (sections.count("domain")) {
    const Section& d = sections["domain"];
    if (auto it = d.find("omega"); it != d.end()) cfg.domain.omega = to_double("omega", it->second);
    if (auto it = d.find("n"); it != d.end()) {
      const long long n = to_integer("n", it->second);
      if (n < 0) throw ValidationError("n", "must be a power of two >= 4");
      cfg.domain.n = static_cast<std::size_t>(n);
    }
    if (auto it = d.find("dt"); it != d.end()) cfg.domain.dt = to_double("dt", it->second);
    if (auto it = d.find("T"); it != d.end()) cfg.domain.T = to_double("T", it->second);
  }
  if (sections.count("initial")) {
    const Section& s = sections["initial"];
    if (auto it = s.find("preset"); it != s.end()) {
      const std::string& v = it->second.value;
      if (v == "zero") cfg.initial.preset = InitialPreset::Zero;
      else if (v == "equilibrium") cfg.initial.preset = InitialPreset::Equilibrium;
      else if (v == "perturbed-equilibrium") cfg.initial.preset = InitialPreset::PerturbedEquilibrium;
      else if (v == "file") cfg.initial.preset = InitialPreset::File;
      else throw ParseError(it->second.line, "preset", "unknown preset '" + v + "'");
    }
    if (auto it = s.find("amplitude"); it != s.end()) cfg.initial.amplitude = to_double("amplitude", it->second);
    if (auto it = s.find("m1"); it != s.end()) cfg.initial.m1 = static_cast<int>(to_integer("m1", it->second));
    if (auto it = s.find("m2"); it != s.end()) cfg.initial.m2 = static_cast<int>(to_integer("m2", it->second));
    if (auto it = s.find("path"); it != s.end()) cfg.initial.path = it->second.value;
    if (cfg.initial.preset == InitialPreset::File && cfg.initial.path.empty())
      throw ValidationError("path", "required when preset = file");
  }
  if (sections.count("analysis")) {
    const Section& s = sections["analysis"];
    auto optional_num = [&](const char* key, std::optional<double>& out) {
      if (auto it = s.find(key); it != s.end() && it->second.value != "auto") out = to_double(key, it->second);
    };
    optional_num("theta", cfg.analysis.theta);
    optional_num("epsilon", cfg.analysis.epsilon);
    if (auto it = s.find("eta"); it != s.end()) cfg.analysis.eta = to_double("eta", it->second);
    if (auto it = s.find("snapshot_every"); it != s.end()) {
      const long long k = to_integer("snapshot_every", it->second);
      if (k < 0) throw ValidationError("snapshot_every", "must be >= 0");
      cfg.analysis.snapshot_every = static_cast<std::size_t>(k);
    }
    if (auto it = s.find("output"); it != s.end()) cfg.analysis.output = it->second.value;
    if (auto it = s.find("seed"); it != s.end()) {
      const long long k = to_integer("seed", it->second);
      if (k < 0) throw ValidationError("seed", "must be >= 0");
      cfg.analysis.seed = static_cast<std::uint64_t>(k);
    }
    if (auto it = s.find("radius_cap"); it != s.end()) cfg.analysis.radius_cap = to_double("radius_cap", it->second);
    if (!(cfg.analysis.eta > 0)) throw ValidationError("eta", "must be > 0");
    if (!(cfg.analysis.radius_cap > 0)) throw ValidationError("radius_cap", "must be > 0");
  }

  cfg.warnings = cfg.parameters.validate();
  if ((cfg.input.array() < 0).any())
    cfg.warnings.emplace_back("negative subcortical input: trajectories may leave the nonnegative cone");
  if (cfg.parameters.F_e == 0 || cfg.parameters.F_i == 0)
    cfg.warnings.emplace_back("zero maximum firing rate: the sigmoid vanishes identically");
  cfg.domain.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(0, "", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream o;
  o << "[parameters]\n";
  const auto& keys = parameter_keys();
  for (std::size_t k = 0; k < keys.size(); ++k) o << keys[k] << " = " << num(parameter_value(cfg.parameters, k)) << "\n";
  o << "\n[input]\n";
  const char* gkeys[4] = {"g_ee", "g_ei", "g_ie", "g_ii"};
  for (int c = 0; c < 4; ++c) o << gkeys[c] << " = " << num(cfg.input(c)) << "\n";
  o << "\n[domain]\n"
    << "omega = " << num(cfg.domain.omega) << "\n"
    << "n = " << cfg.domain.n << "\n"
    << "dt = " << num(cfg.domain.dt) << "\n"
    << "T = " << num(cfg.domain.T) << "\n";
  o << "\n[initial]\n"
    << "preset = " << preset_name(cfg.initial.preset) << "\n"
    << "amplitude = " << num(cfg.initial.amplitude) << "\n"
    << "m1 = " << cfg.initial.m1 << "\n"
    << "m2 = " << cfg.initial.m2 << "\n";
  if (!cfg.initial.path.empty()) o << "path = " << cfg.initial.path << "\n";
  o << "\n[analysis]\n"
    << "theta = " << (cfg.analysis.theta ? num(*cfg.analysis.theta) : "auto") << "\n"
    << "epsilon = " << (cfg.analysis.epsilon ? num(*cfg.analysis.epsilon) : "auto") << "\n"
    << "eta = " << num(cfg.analysis.eta) << "\n"
    << "snapshot_every = " << cfg.analysis.snapshot_every << "\n"
    << "output = " << cfg.analysis.output << "\n"
    << "seed = " << cfg.analysis.seed << "\n"
    << "radius_cap = " << num(cfg.analysis.radius_cap) << "\n";
  return o.str();
}

} // namespace mfm
