#include "mfm/run.hpp"

#include "mfm/analysis.hpp"
#include "mfm/equilibrium.hpp"
#include "mfm/errors.hpp"
#include "mfm/io.hpp"
#include "mfm/kernels.hpp"
#include "mfm/solver.hpp"
#include "mfm/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

namespace mfm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct OutputPaths {
  fs::path dir;
  fs::path report;
};

OutputPaths resolve_output(const RunConfig& cfg, const RunOptions& opts) {
  const fs::path out = opts.out ? fs::path(*opts.out) : fs::path(cfg.analysis.output);
  OutputPaths p;
  if (out.extension() == ".json") {
    p.report = out;
    p.dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  } else {
    p.dir = out;
    p.report = out / "report.json";
  }
  fs::create_directories(p.dir);
  return p;
}

/// Resolved theta: explicit value, or the window midpoint.
std::optional<double> choose_theta(const RunConfig& cfg, const RunOptions& opts, const ThetaWindow& w) {
  std::optional<double> theta = cfg.analysis.theta;
  if (opts.theta) {
    if (*opts.theta == "auto") {
      theta.reset();
    } else {
      try {
        std::size_t used = 0;
        theta = std::stod(*opts.theta, &used);
        if (used != opts.theta->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError("theta", "expected a number or 'auto'");
      }
    }
  }
  if (!theta) {
    if (!w.feasible) return std::nullopt;
    theta = w.midpoint();
  }
  return theta;
}

/// Absorbing report for the configured theta/epsilon, or nullopt when infeasible.
std::optional<AbsorbingSetReport> try_absorbing(const RunConfig& cfg, double theta, std::string& why) {
  try {
    const Interval er = epsilon_range(theta, cfg.parameters);
    const double eps = cfg.analysis.epsilon.value_or(er.midpoint());
    const double gs = g_sup_norm(SubcorticalInput(cfg.input), cfg.domain.omega, cfg.domain.T);
    auto r = absorbing_constants(cfg.parameters, theta, eps, gs, cfg.domain.omega, true);
    if (!r.feasible) {
      why = "decay rate is not positive for this theta/epsilon";
      return std::nullopt;
    }
    return r;
  } catch (const Error& e) {
    why = e.what();
    return std::nullopt;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void apply_threads(const RunOptions& opts) {
  int n = opts.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("MFM_THREADS")) n = std::atoi(env);
  }
  if (n > 0) kernels::omp::set_threads(n);
}

int run_simulate(const RunConfig& cfg, const RunOptions& opts, const OutputPaths& out, json& report,
                 std::ostream& log) {
  const auto& p = cfg.parameters;
  const FieldState init = initial_state(cfg);
  DomainSpec spec = cfg.domain;
  spec.n = init.n;

  const ThetaWindow w = theta_window(p);
  std::optional<AbsorbingSetReport> abs;
  std::string why;
  if (const auto theta = choose_theta(cfg, opts, w)) abs = try_absorbing(cfg, *theta, why);
  else why = "theta window is empty";

  SpectralWorkspace ews(spec.n, spec.omega);
  SimulateOptions so;
  so.snapshot_every = opts.snapshot_every.value_or(cfg.analysis.snapshot_every);
  so.monitor_every = so.snapshot_every > 0 ? so.snapshot_every : 1;
  so.warn = [&](const std::string& m) { log << "warning: " << m << "\n"; };
  if (abs) {
    const double theta = abs->theta;
    so.energy = [&, theta](const FieldState& s) {
      const EnergyPair e = energy(s, p, theta, ews);
      return std::make_pair(e.minus, e.plus);
    };
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = simulate(init, spec, p, SubcorticalInput(cfg.input), so);
  const double t_sim = seconds_since(t0);

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    write_snapshot_csv((out.dir / snapshot_filename(k)).string(), traj.snapshots[k], spec.omega);
  write_snapshot_index((out.dir / "snapshots.csv").string(), traj.snapshots);

  std::vector<double> bound;
  if (abs && !traj.monitors.empty()) {
    const double q0 = traj.monitors.front().Q_plus;
    for (const auto& m : traj.monitors) {
      const double decay = std::exp(-abs->alpha_w * (m.t - init.t));
      bound.push_back(q0 * decay + abs->rho_w2 * (1.0 - decay));
    }
  }
  write_monitor_csv((out.dir / "monitor.csv").string(), traj.monitors, bound);

  double min_i = std::numeric_limits<double>::infinity(), min_w = min_i;
  for (const auto& m : traj.monitors) {
    for (double x : m.min_i) min_i = std::min(min_i, x);
    for (double x : m.min_w) min_w = std::min(min_w, x);
  }
  report["trajectory"] = {{"steps", traj.steps},
                          {"snapshots", traj.snapshots.size()},
                          {"failed", traj.failed},
                          {"error", traj.error},
                          {"min_i", number(min_i)},
                          {"min_w", number(min_w)}};
  report["theta_window"] = to_json(w);
  if (abs) {
    report["absorbing"] = to_json(*abs);
    try {
      const LyapunovVerdict v = lyapunov_monitor(traj, *abs, p);
      write_energy_csv((out.dir / "energy.csv").string(), v.trace);
      report["lyapunov"] = to_json(v);
    } catch (const ConeViolation& e) {
      report["lyapunov"] = {{"withheld", true}, {"reason", e.what()}};
    }
  } else {
    report["lyapunov"] = {{"withheld", true}, {"reason", why}};
  }
  report["timings"] = {{"simulate_s", t_sim}};
  if (traj.failed) {
    log << "error: " << traj.error << "\n";
    return kExitError;
  }
  log << "simulated " << traj.steps << " steps, " << traj.snapshots.size() << " snapshots written to "
      << out.dir.string() << "\n";
  return kExitOk;
}

int run_equilibrium(const RunConfig& cfg, json& report, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const HomogeneousEquilibrium eq = solve_homogeneous(cfg.parameters, cfg.input);
  report["equilibrium"] = to_json(eq);
  if (eq.converged) {
    try {
      json roots = json::array();
      for (const auto& r : find_secondary(cfg.parameters, cfg.input, eq)) roots.push_back(to_json(r));
      report["secondary_roots"] = roots;
    } catch (const EmptyResult&) {
      report["secondary_roots"] = json::array();
    }
  }
  report["timings"] = {{"equilibrium_s", seconds_since(t0)}};
  log << "v_e = (" << eq.v_e(0) << ", " << eq.v_e(1) << ") residual " << eq.residual_norm
      << (eq.converged ? "" : " (not converged)") << "\n";
  return eq.converged ? kExitOk : kExitVerdict;
}

int run_noncompactness(const RunConfig& cfg, json& report, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const NoncompactnessReport r = check_noncompactness(cfg.parameters, cfg.input);
  report["noncompactness"] = to_json(r);
  report["timings"] = {{"noncompactness_s", seconds_since(t0)}};
  log << "spectral_lower_bound = " << r.spectral_lower_bound << ", assumptions "
      << r.assumption_1 << r.assumption_2 << r.assumption_3 << r.assumption_4 << "\n";
  return r.all_hold() ? kExitOk : kExitVerdict;
}

int run_absorbing(const RunConfig& cfg, const RunOptions& opts, json& report, std::ostream& log) {
  const ThetaWindow w = theta_window(cfg.parameters);
  report["theta_window"] = to_json(w);
  const auto theta = choose_theta(cfg, opts, w);
  if (!theta) {
    report["feasible"] = false;
    log << "theta window is empty\n";
    return kExitVerdict;
  }
  std::string why;
  const auto abs = try_absorbing(cfg, *theta, why);
  if (!abs) {
    report["feasible"] = false;
    report["reason"] = why;
    report["theta"] = *theta;
    log << "infeasible: " << why << "\n";
    return kExitVerdict;
  }
  report["feasible"] = true;
  report["absorbing"] = to_json(*abs);
  report["strong"] = to_json(strong_constants(cfg.parameters, abs->theta, abs->epsilon, cfg.analysis.eta, abs->g_sup,
                                              std::sqrt(abs->rho_w2), abs->omega, true));
  log << "theta = " << abs->theta << ", alpha_w = " << abs->alpha_w << ", rho_w^2 = " << abs->rho_w2 << "\n";
  return kExitOk;
}

int run_oracle(const RunConfig& cfg, const OutputPaths& out, json& report, std::ostream& log) {
  const TelegraphProblem prob = oracle_problem(cfg.parameters, cfg.input, cfg.domain.omega);
  const std::size_t stride = std::max<std::size_t>(1, cfg.domain.n / 8);
  const auto t0 = std::chrono::steady_clock::now();
  const OracleComparison cmp = oracle_compare(prob, cfg.domain.n, cfg.domain.T, cfg.domain.dt, stride);
  auto f = std::ofstream((out.dir / "oracle.csv").string());
  f << "x1,x2,t,w_spectral,w_poisson,abs_err\n";
  char buf[160];
  for (const auto& r : cmp.rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.12g,%.12g,%.6g\n", r.x1, r.x2, r.t, r.w_spectral, r.w_poisson,
                  r.abs_err);
    f << buf;
  }
  report["oracle"] = {{"points", cmp.rows.size()}, {"rel_l2", cmp.rel_l2}, {"tolerance", 1e-4}};
  report["timings"] = {{"oracle_s", seconds_since(t0)}};
  log << "relative L2 difference " << cmp.rel_l2 << " over " << cmp.rows.size() << " points\n";
  return cmp.rel_l2 <= 1e-4 ? kExitOk : kExitVerdict;
}

} // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "equilibrium") return Subcommand::Equilibrium;
  if (name == "noncompactness") return Subcommand::Noncompactness;
  if (name == "absorbing") return Subcommand::Absorbing;
  if (name == "oracle-check") return Subcommand::OracleCheck;
  return std::nullopt;
}

FieldState initial_state(const RunConfig& cfg) {
  const std::size_t n = cfg.domain.n;
  switch (cfg.initial.preset) {
  case InitialPreset::Zero:
    return FieldState(n);
  case InitialPreset::File: {
    FieldState s = read_snapshot_csv(cfg.initial.path);
    if (s.n != n) throw ShapeError("initial snapshot grid does not match [domain] n");
    return s;
  }
  case InitialPreset::Equilibrium:
  case InitialPreset::PerturbedEquilibrium:
    break;
  }
  const HomogeneousEquilibrium eq = solve_homogeneous(cfg.parameters, cfg.input);
  if (!eq.converged) throw Error("homogeneous equilibrium did not converge");
  PointState pt;
  pt.v = eq.v_e;
  pt.i = eq.i_e;
  pt.w = eq.w_e;
  FieldState s = FieldState::constant(n, pt);
  if (cfg.initial.preset == InitialPreset::PerturbedEquilibrium) {
    std::mt19937_64 rng(cfg.analysis.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double ph[2] = {phase(rng), phase(rng)};
    const double k = 2.0 * std::numbers::pi / cfg.domain.omega;
    const double h = cfg.domain.omega / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t q = 0; q < n; ++q) {
        const double arg = k * (cfg.initial.m1 * static_cast<double>(j) * h + cfg.initial.m2 * static_cast<double>(q) * h);
        s.field(kVE)[j * n + q] += cfg.initial.amplitude * std::cos(arg + ph[0]);
        s.field(kVI)[j * n + q] += cfg.initial.amplitude * std::cos(arg + ph[1]);
      }
  }
  return s;
}

TelegraphProblem oracle_problem(const ModelParameters& p, const Vec4& g, double omega) {
  const HomogeneousEquilibrium eq = solve_homogeneous(p, g);
  const double W = std::max(eq.w_e(0), 1.0);
  const double vE = eq.v_e(0);
  const double k = 2.0 * std::numbers::pi / omega;
  TelegraphProblem prob;
  prob.a = p.nu * p.Lam_ee;
  prob.c = std::sqrt(1.5) * p.nu;
  prob.omega = omega;
  prob.w0 = [W, k](double x1, double x2) { return W * (1.0 + 0.05 * std::cos(k * (x1 + x2))); };
  prob.grad_w0 = [W, k](double x1, double x2) {
    const double d = -0.05 * W * k * std::sin(k * (x1 + x2));
    return std::array<double, 2>{d, d};
  };
  const double a = prob.a;
  prob.w0p = [W, k, a](double, double x2) { return 0.1 * a * W * std::sin(k * x2); };
  const double scale = p.nu * p.nu * p.Lam_ee * p.Lam_ee * p.M_ee;
  prob.forcing = [p, vE, k, scale](double x1, double x2, double) {
    const double v = vE + 2.0 * std::cos(k * x1) * std::sin(2.0 * k * x2);
    return scale * firing_rate(v, Population::E, p);
  };
  return prob;
}

OracleComparison oracle_compare(const TelegraphProblem& prob, std::size_t n, double t, double dt,
                                std::size_t stride) {
  const double h = prob.omega / static_cast<double>(n);
  WaveProblem wp;
  wp.a = prob.a;
  wp.c2 = prob.c * prob.c;
  wp.w0.resize(n * n);
  wp.w0p.resize(n * n);
  wp.source.resize(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double x1 = static_cast<double>(j) * h, x2 = static_cast<double>(k) * h;
      wp.w0[j * n + k] = prob.w0(x1, x2);
      wp.w0p[j * n + k] = prob.w0p(x1, x2);
      wp.source[j * n + k] = prob.forcing ? prob.forcing(x1, x2, 0.0) : 0.0;
    }
  const std::vector<double> w = simulate_wave_frozen(wp, n, prob.omega, t, dt);

  OracleComparison out;
  double num = 0, den = 0;
  for (std::size_t j = 0; j < n; j += stride)
    for (std::size_t k = 0; k < n; k += stride) {
      const double x1 = static_cast<double>(j) * h, x2 = static_cast<double>(k) * h;
      const double ref = poisson_eval(prob, x1, x2, t);
      const double ws = w[j * n + k];
      out.rows.push_back({x1, x2, t, ws, ref, std::abs(ws - ref)});
      num += (ws - ref) * (ws - ref);
      den += ref * ref;
    }
  out.rel_l2 = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

int run_subcommand(Subcommand cmd, const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
  apply_threads(opts);
  for (const auto& wmsg : cfg.warnings) log << "warning: " << wmsg << "\n";
  const OutputPaths out = resolve_output(cfg, opts);
  json report;
  report["config"] = to_json(cfg);
  int code = kExitOk;
  switch (cmd) {
  case Subcommand::Simulate: code = run_simulate(cfg, opts, out, report, log); break;
  case Subcommand::Equilibrium: code = run_equilibrium(cfg, report, log); break;
  case Subcommand::Noncompactness: code = run_noncompactness(cfg, report, log); break;
  case Subcommand::Absorbing: code = run_absorbing(cfg, opts, report, log); break;
  case Subcommand::OracleCheck: code = run_oracle(cfg, out, report, log); break;
  }
  report["exit_code"] = code;
  write_json(out.report.string(), report);
  return code;
}

} // namespace mfm
