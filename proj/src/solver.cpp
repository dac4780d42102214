#include "mfm/solver.hpp"

#include "mfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mfm {

namespace {

std::size_t step_count(double T, double dt) {
  return static_cast<std::size_t>(std::llround(T / dt));
}

} // namespace

double stability_bound(const ModelParameters& p, std::size_t n, double omega) {
  const DerivedMatrices d(p);
  const double k_max = std::sqrt(2.0) * std::numbers::pi * static_cast<double>(n) / omega;
  const double wave = std::sqrt(1.5) * p.nu * k_max;
  const double rate = std::max({d.gamma_max, p.nu * d.Lam_max, wave});
  return 2.5 / rate;
}

Integrator::Integrator(const ModelParameters& p, SubcorticalInput g, std::size_t n, double omega,
                       kernels::Backend backend, bool dealias)
    : coeff_(p), g_(std::move(g)), n_(n), backend_(backend), ws_(n, omega, dealias) {
  const std::size_t len = kNumFields * n * n;
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(len, 0.0);
  lap_.assign(2 * n * n, 0.0);
}

double Integrator::stability_bound() const { return mfm::stability_bound(coeff_.p, n_, ws_.omega()); }

void Integrator::eval(const double* y, double t, double* out) {
  const std::size_t np = n_ * n_;
  ws_.laplacian(y + kWEE * np, lap_.data());
  ws_.laplacian(y + kWEI * np, lap_.data() + np);
  const Vec4 gv = g_.at(t);
  const double g[4] = {gv(0), gv(1), gv(2), gv(3)};
  if (backend_ == kernels::Backend::Serial)
    kernels::serial::field_rhs(y, lap_.data(), g, coeff_, out, np);
  else
    kernels::omp::field_rhs(y, lap_.data(), g, coeff_, out, np);
}

void Integrator::step(FieldState& s, double dt) {
  if (s.n != n_) throw ShapeError("state grid does not match integrator grid");
  const std::size_t len = s.data.size();
  double* y = s.data.data();
  const bool serial = backend_ == kernels::Backend::Serial;
  auto axpy = serial ? kernels::serial::axpy : kernels::omp::axpy;

  eval(y, s.t, k1_.data());
  axpy(tmp_.data(), y, 0.5 * dt, k1_.data(), len);
  eval(tmp_.data(), s.t + 0.5 * dt, k2_.data());
  axpy(tmp_.data(), y, 0.5 * dt, k2_.data(), len);
  eval(tmp_.data(), s.t + 0.5 * dt, k3_.data());
  axpy(tmp_.data(), y, dt, k3_.data(), len);
  eval(tmp_.data(), s.t + dt, k4_.data());
  if (serial)
    kernels::serial::rk4_combine(y, k1_.data(), k2_.data(), k3_.data(), k4_.data(), dt, len);
  else
    kernels::omp::rk4_combine(y, k1_.data(), k2_.data(), k3_.data(), k4_.data(), dt, len);
  s.t += dt;

  const std::size_t bad = serial ? kernels::serial::first_nonfinite(y, len) : kernels::omp::first_nonfinite(y, len);
  if (bad != kernels::kAllFinite) throw NonFiniteError(s.t, bad / s.points(), bad % s.points());
}

MonitorRecord monitor_state(const FieldState& s) {
  MonitorRecord r;
  r.t = s.t;
  const std::size_t np = s.points();
  for (std::size_t c = 0; c < 4; ++c) r.min_i[c] = kernels::omp::min_value(s.field(kIEE + c), np);
  for (std::size_t c = 0; c < 2; ++c) r.min_w[c] = kernels::omp::min_value(s.field(kWEE + c), np);
  return r;
}

Trajectory simulate(const FieldState& init, const DomainSpec& spec, const ModelParameters& p,
                    const SubcorticalInput& g, const SimulateOptions& opts) {
  spec.validate();
  if (init.n != spec.n || init.data.size() != kNumFields * spec.n * spec.n)
    throw ShapeError("initial state does not match the domain grid");

  Integrator integ(p, g, spec.n, spec.omega, opts.backend, opts.dealias);
  if (spec.dt > integ.stability_bound() && opts.warn) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "dt = %g exceeds the stability bound %g", spec.dt, integ.stability_bound());
    opts.warn(buf);
  }

  Trajectory traj;
  FieldState s = init;
  auto record = [&](const FieldState& st) {
    MonitorRecord r = monitor_state(st);
    if (opts.energy) std::tie(r.Q_minus, r.Q_plus) = opts.energy(st);
    traj.monitors.push_back(r);
  };
  traj.snapshots.push_back(s);
  record(s);

  const std::size_t steps = step_count(spec.T, spec.dt);
  const std::size_t mstride = std::max<std::size_t>(1, opts.monitor_every);
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      integ.step(s, spec.dt);
    } catch (const NonFiniteError& e) {
      traj.failed = true;
      traj.error = e.what();
      traj.snapshots.push_back(s);
      return traj;
    }
    traj.steps = k;
    // Accumulated t drifts by rounding; pin it to the step grid.
    s.t = init.t + static_cast<double>(k) * spec.dt;
    if (k % mstride == 0 || k == steps) record(s);
    const bool snap = opts.snapshot_every > 0 ? k % opts.snapshot_every == 0 : k == steps;
    if (snap) traj.snapshots.push_back(s);
  }
  return traj;
}

HomogeneousSeries reduce_homogeneous(const ModelParameters& p, const SubcorticalInput& g,
                                     const PointState& init, double T, double dt) {
  const RhsCoefficients c(p);
  constexpr std::size_t m = PointState::kSize;
  using Arr = std::array<double, m>;
  const double zero_lap[2] = {0.0, 0.0};
  auto f = [&](const Arr& y, double t, Arr& out) {
    const Vec4 gv = g.at(t);
    const double gg[4] = {gv(0), gv(1), gv(2), gv(3)};
    rhs_point(y.data(), zero_lap, gg, c, out.data());
  };

  HomogeneousSeries out;
  Arr y = init.pack();
  double t = 0.0;
  out.t.push_back(t);
  out.states.push_back(init);
  const std::size_t steps = step_count(T, dt);
  Arr k1, k2, k3, k4, tmp;
  for (std::size_t k = 1; k <= steps; ++k) {
    f(y, t, k1);
    for (std::size_t q = 0; q < m; ++q) tmp[q] = y[q] + 0.5 * dt * k1[q];
    f(tmp, t + 0.5 * dt, k2);
    for (std::size_t q = 0; q < m; ++q) tmp[q] = y[q] + 0.5 * dt * k2[q];
    f(tmp, t + 0.5 * dt, k3);
    for (std::size_t q = 0; q < m; ++q) tmp[q] = y[q] + dt * k3[q];
    f(tmp, t + dt, k4);
    const double h = dt / 6.0;
    for (std::size_t q = 0; q < m; ++q) y[q] += h * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    t = static_cast<double>(k) * dt;
    for (std::size_t q = 0; q < m; ++q)
      if (!std::isfinite(y[q])) throw NonFiniteError(t, q, 0);
    out.t.push_back(t);
    out.states.push_back(PointState::unpack(y));
  }
  return out;
}

std::vector<double> simulate_wave_frozen(const WaveProblem& prob, std::size_t n, double omega, double T,
                                         double dt) {
  const std::size_t np = n * n;
  if (prob.w0.size() != np || prob.w0p.size() != np || prob.source.size() != np)
    throw ShapeError("wave problem fields must have n*n values");
  SpectralWorkspace ws(n, omega);
  // y = (w, w_t)
  std::vector<double> y(2 * np), k[4], tmp(2 * np), lap(np);
  for (auto& v : k) v.assign(2 * np, 0.0);
  std::copy(prob.w0.begin(), prob.w0.end(), y.begin());
  std::copy(prob.w0p.begin(), prob.w0p.end(), y.begin() + static_cast<std::ptrdiff_t>(np));
  const double a2 = prob.a * prob.a;
  auto f = [&](const std::vector<double>& s, std::vector<double>& out) {
    ws.laplacian(s.data(), lap.data());
    for (std::size_t q = 0; q < np; ++q) {
      out[q] = s[np + q];
      out[np + q] = -2.0 * prob.a * s[np + q] - a2 * s[q] + prob.c2 * lap[q] + prob.source[q];
    }
  };
  const std::size_t steps = step_count(T, dt);
  for (std::size_t s = 0; s < steps; ++s) {
    f(y, k[0]);
    kernels::serial::axpy(tmp.data(), y.data(), 0.5 * dt, k[0].data(), 2 * np);
    f(tmp, k[1]);
    kernels::serial::axpy(tmp.data(), y.data(), 0.5 * dt, k[1].data(), 2 * np);
    f(tmp, k[2]);
    kernels::serial::axpy(tmp.data(), y.data(), dt, k[2].data(), 2 * np);
    f(tmp, k[3]);
    kernels::serial::rk4_combine(y.data(), k[0].data(), k[1].data(), k[2].data(), k[3].data(), dt, 2 * np);
  }
  y.resize(np);
  return y;
}

} // namespace mfm
