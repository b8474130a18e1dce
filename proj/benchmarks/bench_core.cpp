#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "calderon/experiments.hpp"

using namespace calderon;

namespace {

LipschitzProfile bump() {
  ProfileSeed s;
  s.tag = ProfileTag::GaussianBump;
  return make_profile(s);
}

GridFunction gaussian(const Domain& d) {
  return GridFunction::sample(d, [](double x) { return std::exp(-x * x) * std::cos(3 * x); });
}

void BM_ForwardTransform(benchmark::State& st) {
  const Domain d(64, std::size_t(st.range(0)));
  const auto f = gaussian(d);
  for (auto _ : st) benchmark::DoNotOptimize(forward_transform(f));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ForwardTransform)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_HilbertKernel(benchmark::State& st) {
  const Domain d(64, std::size_t(st.range(0)));
  const auto f = gaussian(d);
  for (auto _ : st) benchmark::DoNotOptimize(apply_hilbert(f));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_HilbertKernel)->RangeMultiplier(2)->Range(512, 4096)->Unit(benchmark::kMillisecond);

void BM_CommutatorKernel(benchmark::State& st) {
  const Domain d(64, 2048);
  const auto A = bump();
  const auto f = gaussian(d);
  for (auto _ : st) benchmark::DoNotOptimize(apply_commutator_kernel(int(st.range(0)), A, f));
}
BENCHMARK(BM_CommutatorKernel)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_CommutatorMultiplierD1(benchmark::State& st) {
  const Domain d(64, std::size_t(st.range(0)));
  const auto A = bump();
  const auto f = gaussian(d);
  const std::vector<GridFunction> slots{sample(A, d, 1)};
  for (auto _ : st)
    benchmark::DoNotOptimize(apply_commutator_multiplier(SymbolSpec::commutator(1), f, slots, cplx(0, -kPi)));
}
BENCHMARK(BM_CommutatorMultiplierD1)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SymbolExact(benchmark::State& st) {
  const auto spec = SymbolSpec::commutator(int(st.range(0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-4, 4);
  std::vector<double> freqs(std::size_t(st.range(0)) + 1);
  for (auto _ : st) {
    for (auto& v : freqs) v = U(rng);
    benchmark::DoNotOptimize(eval_symbol_exact(spec, freqs));
  }
}
BENCHMARK(BM_SymbolExact)->DenseRange(1, 6);

void BM_SymbolMonteCarlo(benchmark::State& st) {
  const auto spec = SymbolSpec::commutator(3);
  const std::vector<double> freqs{0.3, -1.2, 0.7, 0.4};
  for (auto _ : st) benchmark::DoNotOptimize(eval_symbol_mc(spec, freqs, std::size_t(st.range(0)), 5));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_SymbolMonteCarlo)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FourierCoeff(benchmark::State& st) {
  const auto w = standard_window_pair();
  for (auto _ : st) benchmark::DoNotOptimize(fourier_coeff(w, 16, 4, int(st.range(0))));
}
BENCHMARK(BM_FourierCoeff)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ShiftedMaximal(benchmark::State& st) {
  const Domain d(256, 256 * 256);
  const auto f = GridFunction::sample(d, [](double x) { return (x >= 0 && x < 1) ? 1.0 : 0.0; });
  for (auto _ : st) benchmark::DoNotOptimize(shifted_maximal(st.range(0), f, {-7, 8}));
}
BENCHMARK(BM_ShiftedMaximal)->Arg(0)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Paraproduct(benchmark::State& st) {
  const Domain d(64, 4096);
  const auto f = gaussian(d);
  const auto a = sample(bump(), d, 1);
  const int deg = int(st.range(0));
  ParaproductSpec spec;
  spec.slots.assign(std::size_t(deg) + 2, SlotType::Phi);
  spec.slots.front() = spec.slots.back() = SlotType::Psi;
  spec.k_min = -3;
  spec.k_max = 4;
  std::vector<GridFunction> in{f};
  for (int j = 0; j < deg; ++j) in.push_back(a);
  for (auto _ : st) benchmark::DoNotOptimize(paraproduct_apply(spec, in));
}
BENCHMARK(BM_Paraproduct)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_EstimateNormHilbert(benchmark::State& st) {
  NormQuery q;
  q.op = OperatorKind::Hilbert;
  q.exponents = {2};
  q.trials = 8;
  q.n = 2048;
  for (auto _ : st) benchmark::DoNotOptimize(estimate_norm(q));
}
BENCHMARK(BM_EstimateNormHilbert)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
