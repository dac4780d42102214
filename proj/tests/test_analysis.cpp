#include "mfm/analysis.hpp"
#include "mfm/equilibrium.hpp"
#include "mfm/errors.hpp"
#include "mfm/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mfm;

namespace {

const ModelParameters kP = ModelParameters::table2();
const Vec4 kG = ModelParameters::table2_input();
constexpr double kOmega = 10.0;

ModelParameters corner() {
  auto p = kP;
  p.ups_ee = p.ups_ei = 2;
  p.Lam_ee = p.Lam_ei = 0.1;
  p.nu = 100;
  p.gamma_ee = p.gamma_ei = 1000;
  p.gamma_ie = p.gamma_ii = 10;
  return p;
}

PointState equilibrium_point() {
  const auto eq = solve_homogeneous(kP, kG);
  PointState pt;
  pt.v = eq.v_e;
  pt.i = eq.i_e;
  pt.w = eq.w_e;
  return pt;
}

FieldState random_state(std::size_t n, std::uint64_t seed, bool smooth_w = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  FieldState s(n);
  for (auto& x : s.data) x = 10 * U(rng);
  if (smooth_w) {
    const double k = 2 * std::numbers::pi / kOmega;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        const double x1 = kOmega * j / n, x2 = kOmega * l / n;
        s.field(kWEE)[j * n + l] = 5 + std::sin(k * x1) + 0.5 * std::cos(2 * k * x2);
        s.field(kWEI)[j * n + l] = 3 + std::cos(k * (x1 - x2));
      }
  }
  return s;
}

// Pointwise energy density of a constant state, written from the functional's definition.
EnergyPair constant_energy(const PointState& u, const ModelParameters& p, double theta, double omega) {
  const double gam[4] = {p.gamma_ee, p.gamma_ei, p.gamma_ie, p.gamma_ii};
  const double lam[2] = {p.Lam_ee, p.Lam_ei};
  double q = p.tau_e * u.v(0) * u.v(0) + p.tau_i * u.v(1) * u.v(1);
  for (int k = 0; k < 4; ++k) {
    q += theta * std::pow(u.di(k) + 1.5 * gam[k] * u.i(k), 2);
    q += 0.25 * theta * std::pow(gam[k] * u.i(k), 2);
  }
  double w2 = 0;
  for (int k = 0; k < 2; ++k) {
    q += std::pow(u.dw(k) + 1.5 * p.nu * lam[k] * u.w(k), 2);
    w2 += u.w(k) * u.w(k);
  }
  const double lmin = std::min(p.Lam_ee, p.Lam_ei), lmax = std::max(p.Lam_ee, p.Lam_ei);
  const double area = omega * omega;
  return {area * (q + 0.25 * p.nu * p.nu * std::min(6.0, lmin * lmin) * w2),
          area * (q + 0.25 * p.nu * p.nu * std::max(6.0, lmax * lmax) * w2)};
}

} // namespace

TEST_CASE("theta window at the worst-case corner") {
  const auto w = theta_window(corner());
  CHECK(std::abs(w.lhs_coeff - 39.4083) <= 1e-3);
  CHECK(std::abs(w.theta_min - 0.002) <= 1e-3);
  CHECK(std::abs(w.theta_max - 0.0254) <= 1e-3);
  CHECK(w.theta_min == 2.0 / 1000.0);
  CHECK(w.feasible);
}

TEST_CASE("theta window of the reference set against scalar evaluation") {
  const auto w = theta_window(kP);
  const auto s = oracle::scalar_absorbing(kP, 1.0, 1e-4, 0, kOmega, 1, 0);
  CHECK(w.coeff_ee == doctest::Approx(s.lhs_ee).epsilon(1e-13));
  CHECK(w.coeff_ei == doctest::Approx(s.lhs_ei).epsilon(1e-13));
  CHECK(w.theta_max == doctest::Approx(1 / std::max(s.lhs_ee, s.lhs_ei)).epsilon(1e-13));
  CHECK(w.theta_min == doctest::Approx(2 / std::pow(std::min({kP.gamma_ee, kP.gamma_ei, kP.gamma_ie, kP.gamma_ii}), 3)));
}

TEST_CASE("epsilon range") {
  const auto w = theta_window(kP);
  const auto degenerate = epsilon_range(w.theta_max, kP);
  CHECK(degenerate.lo == doctest::Approx(degenerate.hi).epsilon(1e-14));
  const auto r = epsilon_range(w.theta_min * 1.01, kP);
  CHECK(r.lo < r.hi);
  CHECK(r.contains_open(r.midpoint()));
  CHECK_THROWS_AS(epsilon_range(w.theta_max * 1.0001, kP), EmptyInterval);
  CHECK_THROWS_AS(epsilon_range(w.theta_min, kP), EmptyInterval);
}

TEST_CASE("absorbing constants at the window midpoint, two implementations") {
  const double theta = theta_window(kP).midpoint();
  const double eps = epsilon_range(theta, kP).midpoint();
  const double gs = g_l2_norm(kG, kOmega);
  const auto rep = absorbing_constants(kP, theta, eps, gs, kOmega);
  CHECK(rep.feasible);
  for (double t : rep.alpha_terms) CHECK(t > 0);
  CHECK(rep.alpha_w > 0);
  CHECK(rep.epsilon_range.contains_open(eps));
  const auto s = oracle::scalar_absorbing(kP, theta, eps, gs, kOmega, 1.0, std::sqrt(rep.rho_w2));
  CHECK(rep.alpha_w == doctest::Approx(s.alpha_w).epsilon(1e-12));
  CHECK(rep.beta_w == doctest::Approx(s.beta_w).epsilon(1e-12));
  CHECK(rep.rho_w2 == doctest::Approx(rep.beta_w / rep.alpha_w).epsilon(1e-14));

  const auto st = strong_constants(kP, theta, eps, 1.0, gs, std::sqrt(rep.rho_w2), kOmega);
  CHECK(st.alpha_s == doctest::Approx(s.alpha_s).epsilon(1e-12));
  CHECK(st.beta_s == doctest::Approx(s.beta_s).epsilon(1e-12));
  CHECK(st.rho_s2 == doctest::Approx(2 * st.beta_s / st.alpha_s));
  CHECK(st.alpha_s >= rep.alpha_w);
  for (int k = 0; k < 5; ++k) {
    if (k == 3)
      CHECK(st.alpha_terms[k] == 2 * rep.alpha_terms[k]);
    else
      CHECK(st.alpha_terms[k] == rep.alpha_terms[k]);
  }
}

TEST_CASE("feasibility is the conjunction of the five decay terms") {
  const auto w = theta_window(kP);
  const double theta = w.midpoint();
  const auto r = epsilon_range(theta, kP);
  // epsilon at the top of its range drives the second term to zero.
  CHECK_THROWS_AS(absorbing_constants(kP, theta, r.hi, 1.0, kOmega), InfeasibleTheta);
  const auto rep = absorbing_constants(kP, theta, r.hi, 1.0, kOmega, true);
  CHECK(!rep.feasible);
  CHECK(!(rep.alpha_terms[1] > 0));
  CHECK_THROWS_AS(absorbing_constants(kP, w.theta_max * 2, r.midpoint(), 1.0, kOmega), EmptyInterval);
}

TEST_CASE("no forcing means no absorbing radius") {
  auto p = kP;
  p.F_e = p.F_i = 0;
  const double theta = theta_window(p).midpoint();
  const double eps = epsilon_range(theta, p).midpoint();
  const auto rep = absorbing_constants(p, theta, eps, 0.0, kOmega);
  CHECK(rep.beta_w == 0.0);
  CHECK(rep.rho_w2 == 0.0);
  const auto st = strong_constants(p, theta, eps, 1.0, 0.0, 0.0, kOmega);
  CHECK(st.beta_s == 0.0);
}

TEST_CASE("beta_w is non-decreasing in the forcing and the domain") {
  const double theta = theta_window(kP).midpoint();
  const double eps = epsilon_range(theta, kP).midpoint();
  const double base = absorbing_constants(kP, theta, eps, 100.0, kOmega).beta_w;
  CHECK(absorbing_constants(kP, theta, eps, 200.0, kOmega).beta_w >= base);
  CHECK(absorbing_constants(kP, theta, eps, 100.0, 1.5 * kOmega).beta_w >= base);
  auto p = kP;
  p.F_e *= 1.1;
  CHECK(absorbing_constants(p, theta, eps, 100.0, kOmega).beta_w >= base);
  p = kP;
  p.F_i *= 1.1;
  CHECK(absorbing_constants(p, theta, eps, 100.0, kOmega).beta_w >= base);
}

TEST_CASE("absorb_time closed-form cases") {
  const double theta = theta_window(kP).midpoint();
  const double eps = epsilon_range(theta, kP).midpoint();
  AbsorbingSetReport rep = absorbing_constants(kP, theta, eps, g_l2_norm(kG, kOmega), kOmega);
  // Work with a small artificial rho_w so the arithmetic stays well conditioned.
  rep.rho_w2 = 4.0;
  const double rho = 3.0, gap = rho * rho - rep.rho_w2;
  CHECK(absorb_time(std::sqrt(gap), rho, rep) == doctest::Approx(0.0).scale(1.0));
  CHECK(absorb_time(0.5, rho, rep) == 0.0);
  CHECK(absorb_time(std::sqrt(std::exp(1.0) * gap), rho, rep) == doctest::Approx(1 / rep.alpha_w));
  CHECK(absorb_time(std::sqrt(std::exp(5.0) * gap), rho, rep) == doctest::Approx(5 / rep.alpha_w));
  CHECK_THROWS_AS(absorb_time(10, 2.0, rep), InvalidRho);
  CHECK_THROWS_AS(absorb_time(10, 1.0, rep), InvalidRho);
}

TEST_CASE("trajectories enter the absorbing ball by the predicted time") {
  const double theta = theta_window(kP).midpoint();
  const double eps = epsilon_range(theta, kP).midpoint();
  const auto rep = absorbing_constants(kP, theta, eps, g_l2_norm(kG, kOmega), kOmega);
  const double rho = std::sqrt(2 * rep.rho_w2);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0, 1);
  for (int run = 0; run < 5; ++run) {
    FieldState s = FieldState::constant(16, equilibrium_point());
    const double scale = 1 + 9 * U(rng);
    for (std::size_t q = 0; q < s.points(); ++q) {
      s.field(kVE)[q] += 20 * (U(rng) - 0.5);
      for (std::size_t c = 0; c < 4; ++c) s.field(kIEE + c)[q] *= scale * (0.5 + U(rng));
      for (std::size_t c = 0; c < 2; ++c) s.field(kWEE + c)[q] *= scale;
    }
    const double R = std::sqrt(Q_plus(s, kP, theta, kOmega));
    const double tw = absorb_time(R, rho, rep);
    DomainSpec d;
    d.n = 16;
    d.dt = 2e-5;
    d.T = std::max(tw, 0.01);
    SimulateOptions o;
    o.snapshot_every = 50;
    const auto tr = simulate(s, d, kP, SubcorticalInput(kG), o);
    REQUIRE(!tr.failed);
    for (const auto& snap : tr.snapshots)
      if (snap.t >= tw) CHECK(Q_minus(snap, kP, theta, kOmega) <= rho * rho * (1 + 1e-6));
  }
}

TEST_CASE("energy functional: zero, homogeneity, constant fields and the gap identity") {
  const double theta = 0.01;
  CHECK(Q_minus(FieldState(16), kP, theta, kOmega) == 0.0);
  CHECK(Q_plus(FieldState(16), kP, theta, kOmega) == 0.0);

  const FieldState s = random_state(16, 5);
  SpectralWorkspace ws(16, kOmega);
  const EnergyPair e = energy(s, kP, theta, ws);
  for (double c : {-2.0, 0.5, 3.0}) {
    FieldState t = s;
    for (auto& x : t.data) x *= c;
    const EnergyPair et = energy(t, kP, theta, ws);
    CHECK(et.minus == doctest::Approx(c * c * e.minus).epsilon(1e-12));
    CHECK(et.plus == doctest::Approx(c * c * e.plus).epsilon(1e-12));
  }

  PointState u;
  u.v = Vec2(1.5, -2);
  u.i = Vec4(3, 1, 4, 1);
  u.di = Vec4(-5, 9, -2, 6);
  u.w = Vec2(800, 300);
  u.dw = Vec2(-3000, 1000);
  const EnergyPair ec = energy(FieldState::constant(16, u), kP, theta, ws);
  const EnergyPair oc = constant_energy(u, kP, theta, kOmega);
  CHECK(ec.minus == doctest::Approx(oc.minus).epsilon(1e-12));
  CHECK(ec.plus == doctest::Approx(oc.plus).epsilon(1e-12));

  // Q_plus - Q_minus = (m_plus - m_minus)/4 nu^2 ||w||_{H^1}^2 with a finite-difference gradient norm.
  const double h = kOmega / 16;
  double h1 = 0;
  for (std::size_t f : {kWEE, kWEI}) {
    const auto lap = oracle::fd4_laplacian(std::vector<double>(s.field(f), s.field(f) + 256), 16, kOmega);
    for (std::size_t q = 0; q < 256; ++q) h1 += h * h * (s.field(f)[q] * s.field(f)[q] - s.field(f)[q] * lap[q]);
  }
  const double gap = 0.25 * kP.nu * kP.nu * (std::max(6.0, kP.Lam_ee * kP.Lam_ee) - std::min(6.0, kP.Lam_ee * kP.Lam_ee));
  CHECK(e.plus - e.minus == doctest::Approx(gap * h1).epsilon(1e-3));
  CHECK(e.minus <= e.plus);
}

TEST_CASE("Lyapunov monitor") {
  const double theta = theta_window(kP).midpoint();
  const double eps = epsilon_range(theta, kP).midpoint();
  const auto rep = absorbing_constants(kP, theta, eps, g_l2_norm(kG, kOmega), kOmega);

  DomainSpec d;
  d.n = 16;
  d.T = 0.02;
  d.dt = 1e-4;
  SimulateOptions o;
  o.snapshot_every = 20;
  const auto eq_traj = simulate(FieldState::constant(16, equilibrium_point()), d, kP, SubcorticalInput(kG), o);
  CHECK(Q_minus(eq_traj.snapshots.front(), kP, theta, kOmega) <= rep.rho_w2);
  const auto v = lyapunov_monitor(eq_traj, rep, kP);
  CHECK(v.holds);
  CHECK(v.trace.size() == eq_traj.snapshots.size());
  CHECK(!v.first_violation);

  auto p0 = kP;
  p0.F_e = p0.F_i = 0;
  const auto rep0 = absorbing_constants(p0, theta, eps, 0.0, kOmega);
  const auto zero_traj = simulate(FieldState(16), d, p0, SubcorticalInput(Vec4::Zero()), o);
  const auto vz = lyapunov_monitor(zero_traj, rep0, p0);
  CHECK(vz.holds);
  for (const auto& row : vz.trace) CHECK(row.Q_minus == 0.0);

  Trajectory bad = eq_traj;
  bad.snapshots.back().field(kIEI)[7] = -1.0;
  CHECK_THROWS_AS(lyapunov_monitor(bad, rep, kP), ConeViolation);

  // An artificial energy jump above the envelope is reported as a violation.
  AbsorbingSetReport tight = rep;
  tight.rho_w2 = 0;
  tight.alpha_w = 1e5;
  Trajectory grow = eq_traj;
  for (std::size_t k = 1; k < grow.snapshots.size(); ++k) {
    const double t = grow.snapshots[k].t;
    grow.snapshots[k] = grow.snapshots.front();
    grow.snapshots[k].t = t;
  }
  const auto vg = lyapunov_monitor(grow, tight, kP);
  CHECK(!vg.holds);
  CHECK(vg.first_violation.value() == 1);
}

TEST_CASE("cone membership verdicts") {
  FieldState s(16);
  CHECK(in_D_i(s, kP).member);
  const double gam[4] = {kP.gamma_ee, kP.gamma_ei, kP.gamma_ie, kP.gamma_ii};
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t q = 0; q < s.points(); ++q) {
      s.field(kIEE + c)[q] = 1.0 + 0.01 * static_cast<double>(q);
      s.field(kDIEE + c)[q] = -gam[c] * s.field(kIEE + c)[q];
    }
  CHECK(in_D_i(s, kP).member);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0, 5);
  FieldState r(16);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t q = 0; q < r.points(); ++q) {
      r.field(kIEE + c)[q] = U(rng);
      r.field(kDIEE + c)[q] = U(rng);
    }
  REQUIRE(in_D_i(r, kP).member);
  r.field(kIIE)[123] = -0.5;
  const auto v = in_D_i(r, kP);
  CHECK(!v.member);
  CHECK(v.field == kIIE);
  CHECK(v.index == 123);
  CHECK(v.value == -0.5);

  CHECK(in_D_g(SubcorticalInput(kG)).member);
  CHECK(!in_D_g(SubcorticalInput(Vec4(1, -1, 0, 0))).member);
  const SubcorticalInput wave([](double t) { return Vec4(1, std::sin(50 * t), 0, 0); }, Vec4(1, 0, 0, 0));
  CHECK(!in_D_g(wave, 1.0).member);

  const FieldState eq = FieldState::constant(16, equilibrium_point());
  CHECK(in_D_Bio(eq, kP, kOmega, 0.5).member);
  FieldState neg = eq;
  for (std::size_t q = 0; q < neg.points(); ++q) neg.field(kDWEE)[q] = -3 * kP.nu * kP.Lam_ee * neg.field(kWEE)[q];
  const auto vb = in_D_Bio(neg, kP, kOmega, 0.5);
  CHECK(!vb.member);
  CHECK(vb.field == kWEE);
}
