// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <numbers>

#include <benchmark/benchmark.h>

#include "satreg/kernels.hpp"
#include "satreg/pde_models.hpp"
#include "satreg/regulator.hpp"
#include "satreg/simulator.hpp"

using namespace satreg;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

const StateSpaceModel& heat31() {
  static const StateSpaceModel m = build_heat2d({31});
  return m;
}

void BM_PropagatorApply(benchmark::State& state) {
  const auto ops = exponential_operators(heat31().A(), 1e-3);
  const Vec x = Vec::LinSpaced(heat31().states(), -1, 1);
  Vec y(x.size());
  for (auto _ : state) {
    ops.expA.apply(x, y, exec_of(state));
    ops.phi1.apply_add(x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
}

// 2x2 blocks, as for a large modal wave model; range(1) = number of blocks
void BM_BlockApplyLarge(benchmark::State& state) {
  const auto nblk = static_cast<Eigen::Index>(state.range(1));
  std::vector<BlockDiagonalOperator::Block> blocks;
  for (Eigen::Index b = 0; b < nblk; ++b) {
    Mat m(2, 2);
    const double a = 0.001 * double(b);
    m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    blocks.push_back({{2 * b, 2 * b + 1}, m});
  }
  const BlockDiagonalOperator op(2 * nblk, std::move(blocks));
  const Vec x = Vec::LinSpaced(2 * nblk, -1, 1);
  Vec y(x.size());
  for (auto _ : state) {
    op.apply(x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_ExponentialOperators(benchmark::State& state) {
  const auto wave = build_wave1d({200});
  for (auto _ : state) benchmark::DoNotOptimize(exponential_operators(wave.A(), 1e-3, exec_of(state)));
}

void BM_TransferSweep(benchmark::State& state) {
  const auto heat = build_heat2d({15});
  std::vector<cplx> lambdas;
  for (int k = 1; k <= 16; ++k) lambdas.emplace_back(0.0, k * std::numbers::pi / 2);
  for (auto _ : state) benchmark::DoNotOptimize(transfer_sweep(heat, 3.0, lambdas, exec_of(state)));
}

void BM_LinearRegimeMargin(benchmark::State& state) {
  const auto heat = build_heat2d({15});
  SignalSpec sig = heat_paper_signals();
  sig.harmonics[2].omega = 5 * std::sqrt(2.0);  // incommensurate: 1e5 samples
  const auto coeffs = compute_coefficients(heat, 3.0, sig);
  const auto sat = SaturationSpec::scalar({-4.5, 2.5}, {7, 12.5});
  for (auto _ : state) benchmark::DoNotOptimize(linear_regime_margin(coeffs, sat, exec_of(state)));
}

void BM_SimulateHeat(benchmark::State& state) {
  const auto coeffs = compute_coefficients(heat31(), 3.0, heat_paper_signals());
  const auto sat = SaturationSpec::scalar({-4.5, 2.5}, {7, 12.5});
  SimulationConfig cfg;
  cfg.t_end = 0.2;
  cfg.kappa = 3.0;
  cfg.exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_closed_loop(heat31(), sat, coeffs, heat_paper_signals(), heat_initial_state({31}), cfg));
  }
}

}  // namespace

BENCHMARK(BM_PropagatorApply)->Arg(0)->Arg(1);
BENCHMARK(BM_BlockApplyLarge)->Args({0, 1 << 16})->Args({1, 1 << 16})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExponentialOperators)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransferSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearRegimeMargin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateHeat)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
