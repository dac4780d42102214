#include "mfm/errors.hpp"
#include "mfm/model.hpp"
#include "mfm/run.hpp"
#include "mfm/telegraph.hpp"

#include <doctest.h>

#include <random>

using namespace mfm;

namespace {

const ModelParameters kP = ModelParameters::table2();
const double kA = kP.nu * kP.Lam_ee;
const double kC = std::sqrt(1.5) * kP.nu;
constexpr double kOmega = 10.0;
const double kK = 2 * std::numbers::pi / kOmega;

TelegraphProblem constant_problem(double w0, double w0p, double forcing) {
  TelegraphProblem p;
  p.a = kA;
  p.c = kC;
  p.omega = kOmega;
  p.w0 = [w0](double, double) { return w0; };
  p.grad_w0 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  p.w0p = [w0p](double, double) { return w0p; };
  if (forcing != 0) p.forcing = [forcing](double, double, double) { return forcing; };
  return p;
}

TelegraphProblem smooth_problem(double amp, double phase, double src) {
  TelegraphProblem p;
  p.a = kA;
  p.c = kC;
  p.omega = kOmega;
  p.w0 = [=](double x1, double x2) { return 100 + amp * std::cos(kK * x1 + phase) * std::sin(2 * kK * x2); };
  p.grad_w0 = [=](double x1, double x2) {
    return std::array<double, 2>{-amp * kK * std::sin(kK * x1 + phase) * std::sin(2 * kK * x2),
                                 2 * amp * kK * std::cos(kK * x1 + phase) * std::cos(2 * kK * x2)};
  };
  p.w0p = [=](double x1, double x2) { return amp * kA * std::sin(kK * (x1 - x2)); };
  p.forcing = [=](double x1, double, double t) { return src * (2 + std::cos(kK * x1)) * (1 + 50 * t); };
  return p;
}

} // namespace

TEST_CASE("constant data follows the critically damped solution") {
  const double c = 3.5;
  const auto prob = constant_problem(c, 0, 0);
  for (double t : {1e-3, 0.01, 0.05}) {
    const double expect = c * (1 + kA * t) * std::exp(-kA * t);
    CHECK(poisson_eval(prob, 1.3, 7.2, t) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("constant forcing at the steady value stays put") {
  const double phi = kA * kA * 821.7;
  const auto prob = constant_problem(phi / (kA * kA), 0, phi);
  for (double t : {2e-3, 0.02})
    CHECK(poisson_eval(prob, 4.0, 4.0, t) == doctest::Approx(phi / (kA * kA)).epsilon(1e-6));
}

TEST_CASE("representation is additive in the data") {
  const auto A = smooth_problem(20, 0.3, 1e5), B = smooth_problem(-7, 1.1, 3e4);
  TelegraphProblem S = A;
  S.w0 = [&](double x1, double x2) { return A.w0(x1, x2) + B.w0(x1, x2); };
  S.grad_w0 = [&](double x1, double x2) {
    const auto a = A.grad_w0(x1, x2), b = B.grad_w0(x1, x2);
    return std::array<double, 2>{a[0] + b[0], a[1] + b[1]};
  };
  S.w0p = [&](double x1, double x2) { return A.w0p(x1, x2) + B.w0p(x1, x2); };
  S.forcing = [&](double x1, double x2, double t) { return A.forcing(x1, x2, t) + B.forcing(x1, x2, t); };
  for (auto [x1, x2] : {std::pair{0.5, 9.0}, std::pair{3.3, 2.2}}) {
    const double t = 0.008;
    const double sum = poisson_eval(A, x1, x2, t) + poisson_eval(B, x1, x2, t);
    CHECK(poisson_eval(S, x1, x2, t) == doctest::Approx(sum).epsilon(1e-5));
  }
}

TEST_CASE("faster waves on a proportionally larger domain give the same solution") {
  // nu -> 2 nu with Lambda -> Lambda / 2 keeps a = nu Lambda and doubles the
  // wave speed; stretching the domain and the data by 2 must map solutions onto
  // each other.
  const auto A = smooth_problem(15, 0.2, 2e5);
  TelegraphProblem B = A;
  B.c = 2 * A.c;
  B.omega = 2 * A.omega;
  B.w0 = [&](double x1, double x2) { return A.w0(x1 / 2, x2 / 2); };
  B.grad_w0 = [&](double x1, double x2) {
    const auto g = A.grad_w0(x1 / 2, x2 / 2);
    return std::array<double, 2>{g[0] / 2, g[1] / 2};
  };
  B.w0p = [&](double x1, double x2) { return A.w0p(x1 / 2, x2 / 2); };
  B.forcing = [&](double x1, double x2, double t) { return A.forcing(x1 / 2, x2 / 2, t); };
  for (auto [x1, x2] : {std::pair{1.0, 2.0}, std::pair{8.5, 6.1}})
    for (double t : {0.003, 0.01})
      CHECK(poisson_eval(B, 2 * x1, 2 * x2, t) == doctest::Approx(poisson_eval(A, x1, x2, t)).epsilon(1e-6));
}

TEST_CASE("data in D_w with nonnegative forcing give nonnegative solutions") {
  const auto prob = oracle_problem(kP, ModelParameters::table2_input(), kOmega);
  const auto verdict = check_Dw_condition(prob.w0, prob.grad_w0, prob.w0p, prob.a, prob.c, 0.01, kOmega);
  REQUIRE(verdict.member);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0, kOmega), T(1e-4, 0.01);
  for (int k = 0; k < 12; ++k) CHECK(poisson_eval(prob, U(rng), U(rng), T(rng)) >= -1e-8);
}

TEST_CASE("D_w membership verdicts") {
  auto zero2 = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  const auto member = check_Dw_condition([](double, double) { return 2.0; }, zero2,
                                         [](double, double) { return 0.0; }, kA, kC, 0.5, kOmega);
  CHECK(member.member);
  CHECK(member.clause == DwVerdict::Clause::None);

  const double c = 4.0;
  const auto a = check_Dw_condition([c](double, double) { return c; }, zero2,
                                    [c](double, double) { return -2 * kA * c; }, kA, kC, 0.1, kOmega);
  CHECK(!a.member);
  CHECK(a.clause == DwVerdict::Clause::A);
  CHECK(a.value == doctest::Approx(-kA * c));

  // Ramp w0 = 1.1 A + A sin(k x1): fine for small balls, violated once k R is of order one.
  const double A = 10;
  auto w0 = [=](double x1, double) { return 1.1 * A + A * std::sin(kK * x1); };
  auto grad = [=](double x1, double) { return std::array<double, 2>{A * kK * std::cos(kK * x1), 0.0}; };
  auto w0p = [](double, double) { return 0.0; };
  auto dense_min = [&](double R) {
    double m = 1e300;
    for (double y = 0; y < kOmega; y += kOmega / 4000)
      for (double d = -R; d <= R; d += R / 200) m = std::min(m, w0(y, 0) + grad(y, 0)[0] * d);
    return m;
  };
  const double T_small = 0.1 / (kK * kC), T_large = 1.0 / (kK * kC);
  CHECK(dense_min(kC * T_small) > 0);
  CHECK(dense_min(kC * T_large) < 0);
  CHECK(check_Dw_condition(w0, grad, w0p, kA, kC, T_small, kOmega).member);
  const auto b = check_Dw_condition(w0, grad, w0p, kA, kC, T_large, kOmega);
  CHECK(!b.member);
  CHECK(b.clause == DwVerdict::Clause::B);
  CHECK(b.value < 0);
  // The witness pair reproduces the reported value and lies in the ball.
  double d1 = b.y1 - b.x1, d2 = b.y2 - b.x2;
  d1 -= kOmega * std::round(d1 / kOmega);
  d2 -= kOmega * std::round(d2 / kOmega);
  CHECK(std::hypot(d1, d2) <= b.radius * (1 + 1e-12));
  CHECK(w0(b.y1, b.y2) + grad(b.y1, b.y2)[0] * d1 == doctest::Approx(b.value));

  DwCheckOptions capped;
  capped.radius_cap = 1.0;
  const auto cv = check_Dw_condition([](double, double) { return 1.0; }, zero2, w0p, kA, kC, 10.0, kOmega, capped);
  CHECK(cv.capped);
  CHECK(cv.radius == 1.0);
}

TEST_CASE("unreachable tolerance raises QuadratureFailure") {
  TelegraphProblem p = constant_problem(1, 0, 0);
  p.w0 = [](double x1, double x2) { return 1 + std::sin(40 * kK * x1) * std::cos(37 * kK * x2); };
  p.grad_w0 = [](double x1, double x2) {
    return std::array<double, 2>{40 * kK * std::cos(40 * kK * x1) * std::cos(37 * kK * x2),
                                 -37 * kK * std::sin(40 * kK * x1) * std::sin(37 * kK * x2)};
  };
  QuadratureOptions o;
  o.rel_tol = 1e-14;
  o.max_depth = 0;
  CHECK_THROWS_AS(poisson_eval(p, 1.0, 1.0, 0.05, o), QuadratureFailure);
  CHECK_THROWS(poisson_eval(p, 1.0, 1.0, 0.0));
}
