#include "mfm/equilibrium.hpp"

#include "mfm/errors.hpp"
#include "mfm/spectral.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace mfm {

namespace {

/// d P_v / d v and d P_v / d i at (v, i).
void Pv_partials(const Vec2& v, const Vec4& i, const ModelParameters& p, Mat2& dv,
                 Eigen::Matrix<double, 2, 4>& di) {
  const double aV[4] = {std::abs(p.V_ee), std::abs(p.V_ei), std::abs(p.V_ie), std::abs(p.V_ii)};
  dv.setZero();
  dv(0, 0) = 1.0 + i(0) / aV[0] + i(2) / aV[2];
  dv(1, 1) = 1.0 + i(1) / aV[1] + i(3) / aV[3];
  di.setZero();
  di(0, 0) = -1.0 + v(0) / aV[0];
  di(0, 2) = 1.0 + v(0) / aV[2];
  di(1, 1) = -1.0 + v(1) / aV[1];
  di(1, 3) = 1.0 + v(1) / aV[3];
}

Vec2 firing_derivs(const Vec2& v, const ModelParameters& p) {
  return {firing_rate_deriv(v(0), Population::E, p), firing_rate_deriv(v(1), Population::I, p)};
}

/// e Upsilon Gamma^{-1} as a diagonal.
Vec4 drive_over_gamma(const DerivedMatrices& d) {
  return (kNapier * d.Ups.diagonal().array() / d.Gamma.diagonal().array()).matrix();
}

struct NewtonResult {
  Vec2 v;
  double norm;
  bool converged;
  int iterations;
};

/// Newton with step halving. `tol(v)` gives the absolute residual target.
template <typename R, typename J, typename T>
NewtonResult damped_newton(const R& residual, const J& jacobian, const T& tol, Vec2 v, int max_iter) {
  Vec2 r = residual(v);
  double norm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iter; ++it) {
    if (norm <= tol(v)) return {v, norm, true, it};
    const Mat2 Jm = jacobian(v);
    const Eigen::FullPivLU<Mat2> lu(Jm);
    if (!lu.isInvertible()) return {v, norm, false, it};
    const Vec2 step = lu.solve(-r);
    double lambda = 1.0;
    Vec2 trial = v + step;
    Vec2 rt = residual(trial);
    double nt = rt.lpNorm<Eigen::Infinity>();
    for (int h = 0; h < 30 && !(nt < norm); ++h) {
      lambda *= 0.5;
      trial = v + lambda * step;
      rt = residual(trial);
      nt = rt.lpNorm<Eigen::Infinity>();
    }
    if (!(nt < norm)) {
      // No decrease at any damping; accept only if already at rounding level.
      return {v, norm, norm <= 100.0 * tol(v), it};
    }
    v = trial;
    r = rt;
    norm = nt;
  }
  return {v, norm, norm <= tol(v), max_iter};
}

} // namespace

Vec2 steady_wave(const Vec2& v, const ModelParameters& p) {
  const DerivedMatrices d(p);
  return d.Mcnt * J8() * firing_rates(v, p);
}

Vec4 steady_current(const Vec2& v, const ModelParameters& p, const Vec4& g) {
  const DerivedMatrices d(p);
  const Vec2 f = firing_rates(v, p);
  const Vec4 input = d.Ncnt * J7() * f + J6() * (d.Mcnt * J8() * f) + g;
  return drive_over_gamma(d).cwiseProduct(input);
}

double equilibrium_residual(const Vec2& v, const Vec4& i, const Vec2& w, const ModelParameters& p,
                            const Vec4& g) {
  const double a = eval_Pv(v, i, p).lpNorm<Eigen::Infinity>();
  const double b = (eval_Pi(v, i, p, g) - J6() * w).lpNorm<Eigen::Infinity>();
  const double c = (w - steady_wave(v, p)).lpNorm<Eigen::Infinity>();
  return std::max({a, b, c});
}

HomogeneousEquilibrium solve_homogeneous(const ModelParameters& p, const Vec4& g_mean, const Vec2& v_init) {
  if ((g_mean.array() < 0).any()) throw ValidationError("g", "mean input must be nonnegative");
  const DerivedMatrices d(p);
  const Vec4 dg = drive_over_gamma(d);

  auto residual = [&](const Vec2& v) { return eval_Pv(v, steady_current(v, p, g_mean), p); };
  auto jacobian = [&](const Vec2& v) {
    const Vec4 i = steady_current(v, p, g_mean);
    Mat2 dv;
    Eigen::Matrix<double, 2, 4> di;
    Pv_partials(v, i, p, dv, di);
    const Mat2 fp = firing_derivs(v, p).asDiagonal();
    const Eigen::Matrix<double, 4, 2> di_dv =
        dg.asDiagonal() * (d.Ncnt * J7() * fp + J6() * d.Mcnt * J8() * fp);
    return Mat2(dv + di * di_dv);
  };
  auto tol = [&](const Vec2& v) {
    return 1e-13 * (1.0 + steady_current(v, p, g_mean).lpNorm<Eigen::Infinity>());
  };

  auto nr = damped_newton(residual, jacobian, tol, v_init, 100);
  if (!nr.converged) {
    // Newton can stall in a local minimum of |P_v|. With i >= 0, P_v changes
    // sign across each Nernst-potential interval, so bracket vI for fixed vE,
    // then bracket vE on the reduced map, and polish with Newton.
    const std::pair<double, double> bE{-std::abs(p.V_ie), std::abs(p.V_ee)};
    const std::pair<double, double> bI{-std::abs(p.V_ii), std::abs(p.V_ei)};
    auto bisect = [](auto&& f, double lo, double hi) {
      boost::uintmax_t it = 200;
      const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
      return 0.5 * (r.first + r.second);
    };
    auto inner = [&](double vE) {
      return bisect([&](double vI) { return residual(Vec2(vE, vI))(1); }, bI.first, bI.second);
    };
    try {
      const double vE = bisect([&](double x) { return residual(Vec2(x, inner(x)))(0); }, bE.first, bE.second);
      const int used = nr.iterations;
      nr = damped_newton(residual, jacobian, tol, Vec2(vE, inner(vE)), 100);
      nr.iterations += used;
    } catch (const std::exception&) {
      // Left unconverged; the caller sees converged == false.
    }
  }
  HomogeneousEquilibrium eq;
  eq.v_e = nr.v;
  eq.i_e = steady_current(nr.v, p, g_mean);
  eq.w_e = steady_wave(nr.v, p);
  eq.converged = nr.converged;
  eq.iterations = nr.iterations;
  eq.residual_norm = equilibrium_residual(eq.v_e, eq.i_e, eq.w_e, p, g_mean);
  return eq;
}

Mat6 jacobian_P(const Vec2& v, const Vec4& i, const ModelParameters& p) {
  const DerivedMatrices d(p);
  Mat2 dv;
  Eigen::Matrix<double, 2, 4> di;
  Pv_partials(v, i, p, dv, di);
  Mat6 J = Mat6::Zero();
  J.block<2, 2>(0, 0) = dv;
  J.block<2, 4>(0, 2) = di;
  J.block<4, 2>(2, 0) = -d.Ncnt * J7() * Mat2(firing_derivs(v, p).asDiagonal());
  J.block<4, 4>(2, 2) = Vec4((d.Gamma.diagonal().array() / (kNapier * d.Ups.diagonal().array())).matrix())
                            .asDiagonal();
  return J;
}

Vec4 secondary_current(const Vec2& v, const HomogeneousEquilibrium& eq, const ModelParameters& p) {
  const DerivedMatrices d(p);
  const Vec2 df = firing_rates(v, p) - firing_rates(eq.v_e, p);
  return eq.i_e + drive_over_gamma(d).cwiseProduct(d.Ncnt * J7() * df);
}

std::vector<SecondaryRoot> find_secondary(const ModelParameters& p, const Vec4& g_mean,
                                          const HomogeneousEquilibrium& eq, const SearchBox& box) {
  (void)g_mean;  // P_i equality fixes i0 relative to i_e; g cancels.
  if (!eq.converged) throw Error("find_secondary needs a converged equilibrium");
  if (box.cells < 1 || !(box.hi > box.lo)) throw ValidationError("search box", "empty");
  const DerivedMatrices d(p);
  const Vec4 dg = drive_over_gamma(d);

  auto residual = [&](const Vec2& v) { return eval_Pv(v, secondary_current(v, eq, p), p); };
  auto jacobian = [&](const Vec2& v) {
    const Vec4 i = secondary_current(v, eq, p);
    Mat2 dv;
    Eigen::Matrix<double, 2, 4> di;
    Pv_partials(v, i, p, dv, di);
    const Eigen::Matrix<double, 4, 2> di_dv =
        dg.asDiagonal() * d.Ncnt * J7() * Mat2(firing_derivs(v, p).asDiagonal());
    return Mat2(dv + di * di_dv);
  };
  auto tol = [&](const Vec2& v) {
    return 1e-13 * (1.0 + secondary_current(v, eq, p).lpNorm<Eigen::Infinity>());
  };

  const std::size_t m = box.cells;
  const double h = (box.hi - box.lo) / static_cast<double>(m);
  std::vector<Vec2> corner((m + 1) * (m + 1));
  for (std::size_t a = 0; a <= m; ++a)
    for (std::size_t b = 0; b <= m; ++b)
      corner[a * (m + 1) + b] =
          residual(Vec2(box.lo + static_cast<double>(a) * h, box.lo + static_cast<double>(b) * h));

  std::vector<SecondaryRoot> roots;
  auto known = [&](const Vec2& v) {
    if ((v - eq.v_e).lpNorm<Eigen::Infinity>() <= 1e-3) return true;
    for (const auto& r : roots)
      if ((v - r.v0).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + v.lpNorm<Eigen::Infinity>())) return true;
    return false;
  };

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const Vec2* c[4] = {&corner[a * (m + 1) + b], &corner[(a + 1) * (m + 1) + b],
                          &corner[a * (m + 1) + b + 1], &corner[(a + 1) * (m + 1) + b + 1]};
      bool candidate = true;
      for (int comp = 0; comp < 2 && candidate; ++comp) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Vec2* x : c) {
          lo = std::min(lo, (*x)(comp));
          hi = std::max(hi, (*x)(comp));
        }
        candidate = lo <= 0.0 && hi >= 0.0;
      }
      if (!candidate) continue;
      const Vec2 start(box.lo + (static_cast<double>(a) + 0.5) * h, box.lo + (static_cast<double>(b) + 0.5) * h);
      const auto nr = damped_newton(residual, jacobian, tol, start, 100);
      const bool inside = nr.v.minCoeff() >= box.lo && nr.v.maxCoeff() <= box.hi;
      if (!nr.converged || !inside || known(nr.v)) continue;
      SecondaryRoot r;
      r.v0 = nr.v;
      r.i0 = secondary_current(nr.v, eq, p);
      r.residual = nr.norm;
      r.separation = std::max((r.v0 - eq.v_e).lpNorm<Eigen::Infinity>(),
                              (r.i0 - eq.i_e).lpNorm<Eigen::Infinity>());
      roots.push_back(r);
    }
  if (roots.empty()) throw EmptyResult("no secondary equilibrium root in the search box");
  std::sort(roots.begin(), roots.end(), [&](const SecondaryRoot& x, const SecondaryRoot& y) {
    return (x.v0 - eq.v_e).norm() < (y.v0 - eq.v_e).norm();
  });
  return roots;
}

double D_symbol(double c, double lam2, double k1, double k2) { return c / (1.5 * (k1 * k1 + k2 * k2) + lam2); }

void apply_D(SpectralWorkspace& ws, double c, double lam2, const double* in, double* out) {
  ws.apply_multiplier(in, out, [&](double k1, double k2) { return D_symbol(c, lam2, k1, k2); });
}

NoncompactnessReport check_noncompactness(const ModelParameters& p, const Vec4& g_mean, const SearchBox& box) {
  NoncompactnessReport rep;
  rep.equilibrium = solve_homogeneous(p, g_mean);
  const auto& eq = rep.equilibrium;
  if (!eq.converged) rep.notes.emplace_back("homogeneous equilibrium did not converge");

  rep.assumption_1 = p.Lam_ee == p.Lam_ei;

  try {
    rep.roots = find_secondary(p, g_mean, eq, box);
    rep.root = rep.roots.front();
    rep.assumption_2 = rep.root->separation > 0;
  } catch (const EmptyResult& e) {
    rep.notes.emplace_back(e.what());
  }

  auto det_check = [](const Mat6& J, double& det, double& scale) {
    det = J.determinant();
    scale = 1.0;
    for (int r = 0; r < 6; ++r) scale *= J.row(r).lpNorm<Eigen::Infinity>();
    return std::abs(det) > 1e-8 * scale;
  };
  rep.J_e = jacobian_P(eq.v_e, eq.i_e, p);
  bool ok3 = det_check(rep.J_e, rep.det_e, rep.det_scale_e);
  if (rep.root) {
    rep.J_0 = jacobian_P(rep.root->v0, rep.root->i0, p);
    ok3 = det_check(rep.J_0, rep.det_0, rep.det_scale_0) && ok3;
  } else {
    ok3 = false;
  }
  rep.assumption_3 = ok3;

  // Linearised equilibrium equations at (v_e, i_e). The w terms enter only the
  // i_EE and i_EI rows, as M_xy * Lam^2 f_E' (-(3/2) Lap + Lam^2)^{-1} phi_vE,
  // so M_EE * row(i_EI) - M_EI * row(i_EE) is purely algebraic. Together with
  // the other four algebraic rows it fixes the remaining components per unit
  // phi_iEE, and row(i_EE) becomes the scalar equation (I - D) phi_iEE = h.
  const Mat6& J = rep.J_e;
  Eigen::Matrix<double, 5, 5> A = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 1> b = Eigen::Matrix<double, 5, 1>::Zero();
  // Unknown order: vE, vI, iEI, iIE, iII (matrix columns 0, 1, 3, 4, 5).
  const int cols[5] = {0, 1, 3, 4, 5};
  auto put_row = [&](int eqn, const Eigen::Matrix<double, 1, 6>& row) {
    for (int u = 0; u < 5; ++u) A(eqn, u) = row(cols[u]);
    b(eqn) = -row(2);
  };
  put_row(0, J.row(0));
  put_row(1, J.row(1));
  put_row(2, p.M_ee * J.row(3) - p.M_ei * J.row(2));
  put_row(3, J.row(4));
  put_row(4, J.row(5));
  const Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(A);
  if (!lu.isInvertible()) {
    rep.degenerate_pivot = true;
    rep.notes.emplace_back("elimination system is singular");
  } else {
    const Eigen::Matrix<double, 5, 1> x = lu.solve(b);
    for (int u = 0; u < 5; ++u) rep.reduction_coeffs[u] = x(u);
    Eigen::Matrix<double, 6, 1> kvec;
    kvec << x(0), x(1), 1.0, x(2), x(3), x(4);
    rep.pivot = J.row(2).dot(kvec);
    const double scale = J.row(2).lpNorm<Eigen::Infinity>();
    if (std::abs(rep.pivot) < 1e-10 * scale) {
      rep.degenerate_pivot = true;
      rep.notes.emplace_back("elimination pivot is degenerate");
    } else {
      const double lam2 = p.Lam_ee * p.Lam_ee;
      const double fp = firing_rate_deriv(eq.v_e(0), Population::E, p);
      rep.D_coeff = lam2 * p.M_ee * fp * x(0) / rep.pivot;
      // The spectrum of I - D is {1 - c / ((3/2)|k|^2 + Lam^2)}; its infimum is
      // at k = 0 for c >= 0 and tends to 1 as |k| grows for c < 0.
      rep.spectral_lower_bound = rep.D_coeff >= 0 ? 1.0 - rep.D_coeff / lam2 : 1.0;
      rep.alpha_bound = rep.spectral_lower_bound > 0 ? 1.0 / rep.spectral_lower_bound
                                                     : std::numeric_limits<double>::infinity();
    }
  }
  rep.assumption_4 = !rep.degenerate_pivot && rep.spectral_lower_bound > 0;
  return rep;
}

} // namespace mfm
