// Serial reference kernels against the OpenMP kernels, plus a full RK4 step.

#include "mfm/equilibrium.hpp"
#include "mfm/kernels.hpp"
#include "mfm/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace mfm;

FieldState bench_state(std::size_t n) {
  const ModelParameters p = ModelParameters::table2();
  const auto eq = solve_homogeneous(p, ModelParameters::table2_input());
  PointState pt;
  pt.v = eq.v_e;
  pt.i = eq.i_e;
  pt.w = eq.w_e;
  FieldState s = FieldState::constant(n, pt);
  for (std::size_t q = 0; q < s.points(); ++q) s.field(kVE)[q] += std::sin(0.01 * static_cast<double>(q));
  return s;
}

template <kernels::Backend B>
void BM_FieldRhs(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const FieldState s = bench_state(n);
  const RhsCoefficients c(ModelParameters::table2());
  const Vec4 gv = ModelParameters::table2_input();
  const double g[4] = {gv(0), gv(1), gv(2), gv(3)};
  std::vector<double> lap(2 * n * n, 0.0), out(s.data.size());
  for (auto _ : st) {
    if constexpr (B == kernels::Backend::Serial)
      kernels::serial::field_rhs(s.data.data(), lap.data(), g, c, out.data(), n * n);
    else
      kernels::omp::field_rhs(s.data.data(), lap.data(), g, c, out.data(), n * n);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * n * n));
}

template <kernels::Backend B>
void BM_ChunkedSum(benchmark::State& st) {
  const auto len = static_cast<std::size_t>(st.range(0));
  std::vector<double> x(len);
  for (std::size_t q = 0; q < len; ++q) x[q] = std::cos(static_cast<double>(q));
  for (auto _ : st) {
    double s = B == kernels::Backend::Serial ? kernels::serial::chunked_sum(x.data(), len)
                                             : kernels::omp::chunked_sum(x.data(), len);
    benchmark::DoNotOptimize(s);
  }
}

template <kernels::Backend B>
void BM_Step(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  FieldState s = bench_state(n);
  Integrator integ(ModelParameters::table2(), SubcorticalInput(ModelParameters::table2_input()), n, 10.0, B);
  for (auto _ : st) integ.step(s, 1e-5);
}

BENCHMARK(BM_FieldRhs<kernels::Backend::Serial>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_FieldRhs<kernels::Backend::OpenMP>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_ChunkedSum<kernels::Backend::Serial>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_ChunkedSum<kernels::Backend::OpenMP>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Step<kernels::Backend::Serial>)->Arg(32)->Arg(64);
BENCHMARK(BM_Step<kernels::Backend::OpenMP>)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
