#include "mfm/analysis.hpp"

#include "mfm/errors.hpp"
#include "mfm/kernels.hpp"
#include "mfm/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mfm {

namespace {

constexpr double kE2 = kNapier * kNapier;

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

/// The five arguments of the decay-rate minimum; `wave_term` is nu*Lam_min/2 or nu*Lam_min.
std::array<double, 5> decay_terms(const ModelParameters& p, double theta, double eps, double wave_term) {
  const DerivedMatrices d(p);
  const double gmin = d.gamma_min, gmax = d.gamma_max;
  const double nu3 = p.nu * p.nu * p.nu;
  const double k = (2.0 / 3.0) * theta * kE2 / (nu3 * eps);
  const double lam_term = std::min(p.Lam_ee * p.Lam_ee * p.Lam_ee - k * p.ups_ee * p.ups_ee,
                                   p.Lam_ei * p.Lam_ei * p.Lam_ei - k * p.ups_ei * p.ups_ei);
  return {(2.0 / 3.0) / d.tau_max,
          (0.5 / gmax - eps) * gmin * gmin,
          3.0 / theta * (theta * gmin - 2.0 / (gmin * gmin)),
          wave_term,
          3.0 * p.nu / (d.Lam_max * d.Lam_max) * lam_term};
}

double current_part(const ModelParameters& p, double theta, double eps, double g_sup, double area,
                    double& norm_unj7, double& norm_u) {
  const DerivedMatrices d(p);
  const Eigen::Matrix<double, 4, 2> unj7 = d.Ups * d.Ncnt * J7();
  norm_unj7 = spectral_norm(unj7);
  norm_u = spectral_norm(d.Ups);
  const double F2 = p.F_e * p.F_e + p.F_i * p.F_i;
  return 4.0 * theta * kE2 / (1.0 / d.gamma_max - 2.0 * eps) *
         (area * F2 * norm_unj7 * norm_unj7 + norm_u * norm_u * g_sup * g_sup);
}

double trace_LkM2(const ModelParameters& p, int k) {
  return std::pow(p.Lam_ee, k) * p.M_ee * p.M_ee + std::pow(p.Lam_ei, k) * p.M_ei * p.M_ei;
}

} // namespace

ThetaWindow theta_window(const ModelParameters& p) {
  const DerivedMatrices d(p);
  ThetaWindow w;
  auto coeff = [&](double ups, double lam) {
    const double nl = p.nu * lam;
    return (4.0 / 3.0) * kE2 * ups * ups * d.gamma_max / (nl * nl * nl);
  };
  w.coeff_ee = coeff(p.ups_ee, p.Lam_ee);
  w.coeff_ei = coeff(p.ups_ei, p.Lam_ei);
  w.lhs_coeff = std::max(w.coeff_ee, w.coeff_ei);
  w.theta_max = 1.0 / w.lhs_coeff;
  w.theta_min = 2.0 / (d.gamma_min * d.gamma_min * d.gamma_min);
  w.feasible = w.theta_min < w.theta_max;
  return w;
}

Interval epsilon_range(double theta, const ModelParameters& p) {
  const ThetaWindow w = theta_window(p);
  if (!(theta > w.theta_min) || theta > w.theta_max)
    throw EmptyInterval(fmt("theta = %g is outside the feasible window", theta) +
                        fmt(" (%g, %g]", w.theta_min, w.theta_max));
  const double gmax = DerivedMatrices(p).gamma_max;
  return {w.lhs_coeff * theta / (2.0 * gmax), 1.0 / (2.0 * gmax)};
}

double spectral_norm(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd gram = m.cols() <= m.rows() ? Eigen::MatrixXd(m.transpose() * m)
                                                    : Eigen::MatrixXd(m * m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

AbsorbingSetReport absorbing_constants(const ModelParameters& p, double theta, double epsilon, double g_sup,
                                       double omega, bool allow_infeasible) {
  if (g_sup < 0) throw ValidationError("g_sup", "must be >= 0");
  if (!(omega > 0)) throw ValidationError("omega", "must be > 0");
  AbsorbingSetReport r;
  r.theta = theta;
  r.epsilon = epsilon;
  r.omega = omega;
  r.g_sup = g_sup;
  r.epsilon_range = epsilon_range(theta, p);
  const DerivedMatrices d(p);
  r.alpha_terms = decay_terms(p, theta, epsilon, 0.5 * p.nu * d.Lam_min);
  r.alpha_w = *std::min_element(r.alpha_terms.begin(), r.alpha_terms.end());
  const double area = omega * omega;
  r.beta_i = current_part(p, theta, epsilon, g_sup, area, r.norm_UNJ7, r.norm_U);
  r.trace_L3M2 = trace_LkM2(p, 3);
  r.beta_w = r.beta_i + 2.0 * p.nu * p.nu * p.nu * area * p.F_e * p.F_e * r.trace_L3M2;
  r.feasible = r.alpha_w > 0 && r.epsilon_range.contains_open(epsilon);
  r.rho_w2 = r.feasible ? r.beta_w / r.alpha_w : std::numeric_limits<double>::infinity();
  if (!r.feasible && !allow_infeasible) {
    std::string msg = "decay rate terms not all positive or epsilon outside its range:";
    for (double t : r.alpha_terms) msg += fmt(" %g", t);
    throw InfeasibleTheta(msg);
  }
  return r;
}

double absorb_time(double R, double rho, const AbsorbingSetReport& rep) {
  const double gap = rho * rho - rep.rho_w2;
  if (!(gap > 0)) throw InvalidRho(fmt("rho = %g must exceed rho_w = %g", rho, std::sqrt(rep.rho_w2)));
  return std::max(0.0, std::log(R * R / gap) / rep.alpha_w);
}

StrongAbsorbingReport strong_constants(const ModelParameters& p, double theta, double epsilon, double eta,
                                       double g_sup, double rho_w, double omega, bool allow_infeasible) {
  if (!(eta > 0)) throw ValidationError("eta", "must be > 0");
  const DerivedMatrices d(p);
  StrongAbsorbingReport s;
  s.eta = eta;
  s.alpha_terms = decay_terms(p, theta, epsilon, p.nu * d.Lam_min);
  s.alpha_s = *std::min_element(s.alpha_terms.begin(), s.alpha_terms.end());
  s.feasible = s.alpha_s > 0 && epsilon_range(theta, p).contains_open(epsilon);
  if (!s.feasible && !allow_infeasible) throw InfeasibleTheta("strong decay rate is not positive");

  const double mmin = std::min(6.0, d.Lam_min * d.Lam_min);
  const double shift = std::max(std::abs(1.5 * p.nu * p.Lam_ee - s.alpha_s), std::abs(1.5 * p.nu * p.Lam_ei - s.alpha_s));
  s.eps1 = s.alpha_s * mmin / (32.0 * (1.0 + shift * shift));
  s.eps2 = mmin / 16.0;

  const double area = omega * omega;
  double nu7 = 0, nu1 = 0;
  const double beta = current_part(p, theta, epsilon, g_sup, area, nu7, nu1);
  const double tr4 = trace_LkM2(p, 4);
  const double rw2 = rho_w * rho_w;
  const double FE2 = p.F_e * p.F_e;
  s.beta_s = beta + 2.0 * p.nu * p.nu *
                        (FE2 / (p.sigma_e * p.sigma_e) * tr4 * eta * rw2 * (1.0 + rw2) / (32.0 * s.eps1) +
                         0.25 * area * FE2 * tr4 * (1.0 / s.eps1 + s.alpha_s / s.eps2));
  s.rho_s2 = 2.0 * s.beta_s / s.alpha_s;
  return s;
}

double g_l2_norm(const Vec4& g, double omega) { return omega * g.norm(); }

double g_sup_norm(const SubcorticalInput& g, double omega, double T, std::size_t samples) {
  if (g.is_constant()) return g_l2_norm(g.mean(), omega);
  double best = 0;
  for (std::size_t k = 0; k <= samples; ++k)
    best = std::max(best, g_l2_norm(g.at(T * static_cast<double>(k) / static_cast<double>(samples)), omega));
  return best;
}

EnergyPair energy(const FieldState& s, const ModelParameters& p, double theta, SpectralWorkspace& ws) {
  const std::size_t np = s.points();
  ws.check_size(np);
  const DerivedMatrices d(p);
  const double gam[4] = {p.gamma_ee, p.gamma_ei, p.gamma_ie, p.gamma_ii};
  const double lam[2] = {p.Lam_ee, p.Lam_ei};
  std::vector<double> dens(np, 0.0), lap(np), h1(np, 0.0);

  for (std::size_t q = 0; q < np; ++q) {
    const double vE = s.field(kVE)[q], vI = s.field(kVI)[q];
    double e = p.tau_e * vE * vE + p.tau_i * vI * vI;
    for (std::size_t k = 0; k < 4; ++k) {
      const double i = s.field(kIEE + k)[q], di = s.field(kDIEE + k)[q];
      const double a = di + 1.5 * gam[k] * i;
      const double b = gam[k] * i;
      e += theta * a * a + 0.25 * theta * b * b;
    }
    for (std::size_t j = 0; j < 2; ++j) {
      const double w = s.field(kWEE + j)[q], dw = s.field(kDWEE + j)[q];
      const double a = dw + 1.5 * p.nu * lam[j] * w;
      e += a * a;
    }
    dens[q] = e;
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const double* w = s.field(kWEE + j);
    ws.laplacian(w, lap.data());
    for (std::size_t q = 0; q < np; ++q) h1[q] += w[q] * w[q] - w[q] * lap[q];
  }
  const double cell = (ws.omega() / static_cast<double>(s.n)) * (ws.omega() / static_cast<double>(s.n));
  const double base = cell * kernels::serial::chunked_sum(dens.data(), np);
  const double wnorm = cell * kernels::serial::chunked_sum(h1.data(), np);
  const double m_minus = std::min(6.0, d.Lam_min * d.Lam_min);
  const double m_plus = std::max(6.0, d.Lam_max * d.Lam_max);
  return {base + 0.25 * p.nu * p.nu * m_minus * wnorm, base + 0.25 * p.nu * p.nu * m_plus * wnorm};
}

double Q_minus(const FieldState& s, const ModelParameters& p, double theta, double omega) {
  SpectralWorkspace ws(s.n, omega);
  return energy(s, p, theta, ws).minus;
}

double Q_plus(const FieldState& s, const ModelParameters& p, double theta, double omega) {
  SpectralWorkspace ws(s.n, omega);
  return energy(s, p, theta, ws).plus;
}

bool state_in_cone(const FieldState& s, double tol) {
  const std::size_t np = s.points();
  for (std::size_t f : {kIEE, kIEI, kIIE, kIII, kWEE, kWEI})
    if (kernels::serial::min_value(s.field(f), np) < -tol) return false;
  return true;
}

LyapunovVerdict lyapunov_monitor(const Trajectory& traj, const AbsorbingSetReport& rep, const ModelParameters& p,
                                 double tol) {
  LyapunovVerdict out;
  out.tolerance = tol;
  if (traj.snapshots.empty()) return out;
  SpectralWorkspace ws(traj.snapshots.front().n, rep.omega);
  double scale = 0;
  for (double x : traj.snapshots.front().data) scale = std::max(scale, std::abs(x));
  const double cone_tol = 1e-8 * (1.0 + scale);

  const double t0 = traj.snapshots.front().t;
  double q0 = 0;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const FieldState& s = traj.snapshots[k];
    EnergyRow row;
    row.t = s.t;
    const EnergyPair e = energy(s, p, rep.theta, ws);
    row.Q_minus = e.minus;
    row.Q_plus = e.plus;
    if (k == 0) q0 = e.plus;
    const double decay = std::exp(-rep.alpha_w * (s.t - t0));
    row.bound = q0 * decay + rep.rho_w2 * (1.0 - decay);
    row.in_cone = state_in_cone(s, cone_tol);
    out.trace.push_back(row);
    if (!row.in_cone)
      throw ConeViolation(fmt("state left the nonnegative cone at t = %g", s.t));
    if (out.holds && row.Q_minus > row.bound + tol * (1.0 + q0)) {
      out.holds = false;
      out.first_violation = k;
    }
  }
  return out;
}

CellVerdict in_D_i(const FieldState& s, const ModelParameters& p, double tol) {
  const double gam[4] = {p.gamma_ee, p.gamma_ei, p.gamma_ie, p.gamma_ii};
  const std::size_t np = s.points();
  for (std::size_t k = 0; k < 4; ++k) {
    const double* i = s.field(kIEE + k);
    const double* di = s.field(kDIEE + k);
    for (std::size_t q = 0; q < np; ++q) {
      if (i[q] < -tol) return {false, kIEE + k, q, i[q], "i < 0"};
      const double b = di[q] + gam[k] * i[q];
      if (b < -tol) return {false, kDIEE + k, q, b, "di + Gamma i < 0"};
    }
  }
  return {};
}

CellVerdict in_D_g(const SubcorticalInput& g, double T, std::size_t samples) {
  const std::size_t m = g.is_constant() ? 0 : samples;
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = m == 0 ? 0.0 : T * static_cast<double>(k) / static_cast<double>(m);
    const Vec4 v = g.at(t);
    for (std::size_t c = 0; c < 4; ++c)
      if (!(v(static_cast<Eigen::Index>(c)) >= 0)) return {false, c, k, v(static_cast<Eigen::Index>(c)), "g < 0"};
  }
  return {};
}

CellVerdict in_D_Bio(const FieldState& s, const ModelParameters& p, double omega, double T,
                     const DwCheckOptions& opts) {
  CellVerdict vi = in_D_i(s, p, opts.tol);
  if (!vi.member) return vi;

  const std::size_t n = s.n, np = s.points();
  const double h = omega / static_cast<double>(n);
  SpectralWorkspace ws(n, omega);
  const double lam[2] = {p.Lam_ee, p.Lam_ei};
  const double c = std::sqrt(1.5) * p.nu;
  CellVerdict out;

  for (std::size_t j = 0; j < 2; ++j) {
    const double* w = s.field(kWEE + j);
    const double* wp = s.field(kDWEE + j);
    std::vector<double> g1(np), g2(np);
    ws.gradient(w, g1.data(), g2.data());
    auto bilinear = [&](const double* f) {
      return [f, n, h, omega](double x1, double x2) {
        const double u1 = std::fmod(std::fmod(x1, omega) + omega, omega) / h;
        const double u2 = std::fmod(std::fmod(x2, omega) + omega, omega) / h;
        const std::size_t a = static_cast<std::size_t>(u1) % n, b = static_cast<std::size_t>(u2) % n;
        const std::size_t a1 = (a + 1) % n, b1 = (b + 1) % n;
        const double s1 = u1 - std::floor(u1), s2 = u2 - std::floor(u2);
        return (1 - s1) * (1 - s2) * f[a * n + b] + s1 * (1 - s2) * f[a1 * n + b] +
               (1 - s1) * s2 * f[a * n + b1] + s1 * s2 * f[a1 * n + b1];
      };
    };
    const ScalarFn w0 = bilinear(w);
    const ScalarFn w0p = bilinear(wp);
    const ScalarFn d1 = bilinear(g1.data()), d2 = bilinear(g2.data());
    const GradientFn grad = [d1, d2](double x1, double x2) { return std::array<double, 2>{d1(x1, x2), d2(x1, x2)}; };

    DwCheckOptions o = opts;
    o.grid_a = n;
    const DwVerdict dv = check_Dw_condition(w0, grad, w0p, p.nu * lam[j], c, T, omega, o);
    if (!dv.member) {
      const auto a = static_cast<std::size_t>(std::lround(dv.x1 / h)) % n;
      const auto b = static_cast<std::size_t>(std::lround(dv.x2 / h)) % n;
      return {false, kWEE + j, a * n + b, dv.value,
              dv.clause == DwVerdict::Clause::A ? "dw + nu Lam w < 0" : "ball condition on w fails"};
    }
    if (dv.capped) out.reason = fmt("ball radius capped at %g cm", dv.radius);
  }
  return out;
}

} // namespace mfm
