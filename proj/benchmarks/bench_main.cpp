#include <benchmark/benchmark.h>

#include "mwc/fft.hpp"
#include "mwc/refvolt.hpp"

using namespace mwc;

namespace {

constexpr double kFp = 10e9 / 195.0;

void BM_RealFft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    fft::RealTransform t(n);
    for (std::size_t i = 0; i < n; ++i) t.real()[i] = static_cast<double>(i % 17) - 8.0;
    for (auto _ : state) {
        t.forward();
        benchmark::DoNotOptimize(t.spectrum().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
// 79950 is the default dense grid (2 * 195 * 205), 39780 the fast preset.
BENCHMARK(BM_RealFft)->Arg(39780)->Arg(79950)->Arg(1 << 16);

void BM_FourierCoeffs(benchmark::State& state) {
    RngStream rng(1, 0);
    const auto chips = draw_chips(195, kFp, rng);
    const auto count = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fourier_coeffs(chips, -static_cast<long>(count / 2), count));
}
BENCHMARK(BM_FourierCoeffs)->Arg(19)->Arg(195)->Arg(1171);

void BM_ChannelTrial(benchmark::State& state) {
    MwcConfig cfg;
    cfg.q = static_cast<int>(state.range(0));
    const auto detail = state.range(1) ? ChannelSimulator::Detail::Full : ChannelSimulator::Detail::SamplesOnly;
    ChannelSimulator sim(make_multiband(3, kFp, 10e9, BandComponent{}), cfg);
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng(7, i++);
        benchmark::DoNotOptimize(sim.run(draw_chips(195, kFp, rng), detail));
    }
}
BENCHMARK(BM_ChannelTrial)->Args({3, 0})->Args({19, 0})->Args({19, 1})->Unit(benchmark::kMicrosecond);

void BM_ReferenceTrace(benchmark::State& state) {
    MwcConfig cfg;
    cfg.q = 3;
    cfg.oversample = 8;
    const auto spec = make_multiband(1, kFp, 10e9, BandComponent{});
    RngStream rng(3, 0);
    const auto chips = draw_chips(195, kFp, rng);
    for (auto _ : state) benchmark::DoNotOptimize(reference_trace(spec, chips, cfg));
}
BENCHMARK(BM_ReferenceTrace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
