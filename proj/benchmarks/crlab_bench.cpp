#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "crlab/codec.hpp"
#include "crlab/pixel_model.hpp"
#include "crlab/range_coder.hpp"
#include "crlab/rd_solver.hpp"

namespace {

crlab::PixelModelParams pixel(double p, int q, int m) {
  crlab::PixelModelParams out;
  out.alphabet_size = m;
  out.occlusion_prob = p;
  out.quant_step = q;
  return out;
}

void BM_EntropyReport(benchmark::State& state) {
  const auto params = pixel(0.5, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(crlab::entropy_report(params));
}
BENCHMARK(BM_EntropyReport)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RangeEncode(benchmark::State& state) {
  std::mt19937 gen(1);
  std::vector<std::uint32_t> syms(1 << 16);
  for (auto& s : syms) s = gen() % 256;
  for (auto _ : state) {
    crlab::codec::RangeEncoder enc;
    for (auto s : syms) enc.encode(s * 256, 256, 16);
    benchmark::DoNotOptimize(enc.finish());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * syms.size()));
}
BENCHMARK(BM_RangeEncode);

void BM_CodecRoundTrip(benchmark::State& state) {
  const auto params = pixel(0.5, 2, 256);
  const auto par = static_cast<crlab::codec::Paradigm>(state.range(0));
  const auto model = crlab::codec::ProbabilityModel::for_paradigm(params, par);
  const auto seq = crlab::codec::sample_pixels(params, 100000, 3);
  std::vector<int> xp;
  for (const auto& s : seq) xp.push_back(s.x_p);
  for (auto _ : state) {
    const auto bs = crlab::codec::encode(seq, par, model);
    benchmark::DoNotOptimize(crlab::codec::decode(bs, xp, model));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * seq.size()));
}
BENCHMARK(BM_CodecRoundTrip)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BlahutArimotoSlope(benchmark::State& state) {
  const auto probs = crlab::rd::paradigm_problems(pixel(0.3, 4, 16));
  const double slope = 0.001 * std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(probs.conditional_residual.solve(slope));
}
BENCHMARK(BM_BlahutArimotoSlope)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);

void BM_CompareParadigms(benchmark::State& state) {
  const auto slopes = crlab::rd::log_slope_grid();
  for (auto _ : state) benchmark::DoNotOptimize(crlab::rd::compare_paradigms(pixel(0.3, 4, 16), slopes));
}
BENCHMARK(BM_CompareParadigms)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
