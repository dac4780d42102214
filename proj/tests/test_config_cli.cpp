#include "mfm/analysis.hpp"
#include "mfm/config.hpp"
#include "mfm/errors.hpp"
#include "mfm/io.hpp"
#include "mfm/run.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <random>
#include <sstream>

using namespace mfm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfm_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

const char* kBundled[] = {"table2.cfg", "corner-worst.cfg", "zero-forcing.cfg", "smoke-small.cfg"};

} // namespace

TEST_CASE("bundled reference config") {
  const RunConfig cfg = parse_config(oracle::config_path("table2.cfg"));
  CHECK(cfg.parameters == ModelParameters::table2());
  CHECK(cfg.input == ModelParameters::table2_input());
  CHECK(cfg.input(0) == 83.190);
  CHECK(cfg.input(1) == 6407.5);
  CHECK(!cfg.warnings.empty());
  for (const char* name : kBundled) CHECK_NOTHROW(parse_config(oracle::config_path(name)));
}

TEST_CASE("empty file lists the required sections") {
  try {
    parse_config_text("");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[parameters]") != std::string::npos);
    CHECK(msg.find("[input]") != std::string::npos);
  }
}

TEST_CASE("unknown and malformed keys are hard errors") {
  std::string text = serialize_config(parse_config(oracle::config_path("table2.cfg")));
  const auto pos = text.find("tau_e");
  REQUIRE(pos != std::string::npos);
  std::string typo = text;
  typo.replace(pos, 5, "tau_E");
  const int line = 1 + static_cast<int>(std::count(typo.begin(), typo.begin() + static_cast<long>(pos), '\n'));
  try {
    parse_config_text(typo);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.key == "tau_E");
    CHECK(e.line == line);
    CHECK(std::string(e.what()).find("tau_E") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text(text + "\n[bogus]\nx = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text(text + "\n[parameters]\nnu = 5\n"), ParseError);

  std::string neg = text;
  neg.replace(neg.find("tau_i = "), 8, "tau_i = -");
  CHECK_THROWS_AS(parse_config_text(neg), ValidationError);

  std::string nan = text;
  nan.replace(nan.find("nu = "), 5, "nu = abc");
  CHECK_THROWS_AS(parse_config_text(nan), ParseError);

  CHECK_THROWS(parse_config("/nonexistent/file.cfg"));
}

TEST_CASE("parse and serialize round-trip") {
  for (const char* name : kBundled) {
    const RunConfig cfg = parse_config(oracle::config_path(name));
    CHECK(parse_config_text(serialize_config(cfg)) == cfg);
  }
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (int draw = 0; draw < 20; ++draw) {
    RunConfig cfg = parse_config(oracle::config_path("table2.cfg"));
    for (std::size_t k = 0; k < parameter_keys().size(); ++k) parameter_ref(cfg.parameters, k) *= U(rng);
    cfg.input *= U(rng);
    cfg.domain.dt = 1e-5 * U(rng);
    cfg.domain.T = 0.1 * U(rng);
    cfg.initial.preset = InitialPreset::PerturbedEquilibrium;
    cfg.initial.amplitude = U(rng);
    cfg.initial.m1 = draw % 3;
    cfg.initial.m2 = 1 + draw % 2;
    cfg.analysis.theta = draw % 2 ? std::optional<double>(1e-3 * U(rng)) : std::nullopt;
    cfg.analysis.epsilon = draw % 3 ? std::optional<double>(1e-4 * U(rng)) : std::nullopt;
    cfg.analysis.eta = U(rng);
    cfg.analysis.seed = static_cast<std::uint64_t>(draw) * 977;
    cfg.analysis.output = "out/run " + std::to_string(draw);
    CHECK(parse_config_text(serialize_config(cfg)) == cfg);
  }
}

TEST_CASE("noncompactness subcommand writes the report") {
  const fs::path out = scratch("noncompact");
  RunOptions o;
  o.out = (out / "report.json").string();
  std::ostringstream log;
  const int code = run_subcommand(Subcommand::Noncompactness, parse_config(oracle::config_path("table2.cfg")), o, log);
  CHECK(code == kExitOk);
  const auto j = read_json(out / "report.json");
  CHECK(std::abs(j["noncompactness"]["spectral_lower_bound"].get<double>() - 0.3498) < 1e-3);
  CHECK(j["exit_code"] == 0);
  fs::remove_all(out);
}

TEST_CASE("verdict-negative runs exit with code 2") {
  RunConfig cfg = parse_config(oracle::config_path("zero-forcing.cfg"));
  const fs::path out = scratch("verdict");
  RunOptions o;
  o.out = out.string();
  std::ostringstream log;
  CHECK(run_subcommand(Subcommand::Noncompactness, cfg, o, log) == kExitVerdict);
  CHECK(fs::exists(out / "report.json"));
  fs::remove_all(out);
}

TEST_CASE("zero forcing simulation writes all-zero snapshots") {
  const RunConfig cfg = parse_config(oracle::config_path("zero-forcing.cfg"));
  const fs::path out = scratch("zero");
  RunOptions o;
  o.out = out.string();
  std::ostringstream log;
  REQUIRE(run_subcommand(Subcommand::Simulate, cfg, o, log) == kExitOk);
  std::size_t count = 0;
  for (std::size_t k = 0; fs::exists(out / snapshot_filename(k)); ++k) {
    const FieldState s = read_snapshot_csv((out / snapshot_filename(k)).string());
    CHECK(s.n == cfg.domain.n);
    for (double x : s.data) CHECK(x == 0.0);
    ++count;
  }
  const std::vector<double> t = read_snapshot_index((out / "snapshots.csv").string());
  REQUIRE(t.size() == count);
  for (std::size_t k = 1; k < t.size(); ++k)
    CHECK(t[k] - t[k - 1] == doctest::Approx(200 * cfg.domain.dt).epsilon(1e-9));
  // T / dt = 1000 steps with a stride of 200: the initial state plus five snapshots.
  CHECK(count == 6);
  CHECK(fs::exists(out / "monitor.csv"));
  CHECK(fs::exists(out / "report.json"));
  fs::remove_all(out);
}

TEST_CASE("absorbing with theta = auto picks the window midpoint") {
  const RunConfig cfg = parse_config(oracle::config_path("table2.cfg"));
  const fs::path out = scratch("absorbing");
  RunOptions o;
  o.out = out.string();
  o.theta = "auto";
  std::ostringstream log;
  REQUIRE(run_subcommand(Subcommand::Absorbing, cfg, o, log) == kExitOk);
  const auto j = read_json(out / "report.json");
  const ThetaWindow w = theta_window(cfg.parameters);
  CHECK(j["absorbing"]["theta"].get<double>() == doctest::Approx(w.midpoint()).epsilon(1e-15));
  CHECK(j["theta_window"]["theta_min"].get<double>() == doctest::Approx(w.theta_min).epsilon(1e-15));
  CHECK(j["theta_window"]["theta_max"].get<double>() == doctest::Approx(w.theta_max).epsilon(1e-15));
  CHECK(j["feasible"] == true);

  o.theta = std::to_string(w.theta_max * 3);
  CHECK(run_subcommand(Subcommand::Absorbing, cfg, o, log) == kExitVerdict);
  o.theta = "not-a-number";
  CHECK_THROWS(run_subcommand(Subcommand::Absorbing, cfg, o, log));
  fs::remove_all(out);
}

TEST_CASE("seeded perturbed initial data are reproducible") {
  const RunConfig cfg = parse_config(oracle::config_path("smoke-small.cfg"));
  const FieldState a = initial_state(cfg), b = initial_state(cfg);
  CHECK(a.data == b.data);
  RunConfig other = cfg;
  other.analysis.seed += 1;
  CHECK(initial_state(other).data != a.data);
}

TEST_CASE("snapshot CSV round trip") {
  const RunConfig cfg = parse_config(oracle::config_path("smoke-small.cfg"));
  FieldState s = initial_state(cfg);
  const fs::path out = scratch("csv");
  fs::create_directories(out);
  const std::string path = (out / snapshot_filename(3)).string();
  write_snapshot_csv(path, s, cfg.domain.omega);
  const FieldState r = read_snapshot_csv(path);
  CHECK(r.n == s.n);
  for (std::size_t q = 0; q < s.data.size(); ++q) CHECK(r.data[q] == doctest::Approx(s.data[q]).epsilon(1e-8));
  CHECK(snapshot_filename(3) == "snap_00000003.csv");
  fs::remove_all(out);
}

TEST_CASE("subcommand names") {
  CHECK(parse_subcommand("simulate") == Subcommand::Simulate);
  CHECK(parse_subcommand("oracle-check") == Subcommand::OracleCheck);
  CHECK(!parse_subcommand("attractor"));
  CHECK(number(std::numeric_limits<double>::infinity()).is_null());
}
