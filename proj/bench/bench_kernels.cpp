// Serial reference vs OpenMP kernel for each parallel hot path.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "paritysim/channels.hpp"
#include "paritysim/detector.hpp"
#include "paritysim/heterodyne.hpp"
#include "paritysim/kernels.hpp"
#include "paritysim/tomography.hpp"

using namespace paritysim;

namespace {

const DensityMatrix& cat() {
  static const DensityMatrix rho = DensityMatrix::pure(cat_state(1.06, +1, FockSpace(20)));
  return rho;
}

const PhaseGrid& grid() {
  static const PhaseGrid g = PhaseGrid::square(2.0, 41);
  return g;
}

const GridFunction& wide_wigner() {
  static const GridFunction w = [] {
    const PhaseGrid g = PhaseGrid::square(4.0, 81);
    return GridFunction{g, wigner_map(DensityMatrix::fock(1, FockSpace(10)), g.points())};
  }();
  return w;
}

const std::vector<HeterodyneRecord>& records() {
  static const auto recs = simulate_heterodyne(cat(), NoiseModel{}, 200000, 1);
  return recs;
}

template <bool Parallel>
void BM_WignerMap(benchmark::State& state) {
  const auto points = grid().points();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? wigner_map(cat(), points) : wigner_map_serial(cat(), points));
  }
}

template <bool Parallel>
void BM_ConvolutionMap(benchmark::State& state) {
  const auto points = grid().points();
  wide_wigner();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? convolution_map(wide_wigner(), 0.78, points)
                                      : convolution_map_serial(wide_wigner(), 0.78, points));
  }
}

template <bool Parallel>
void BM_ForwardTomogram(benchmark::State& state) {
  const auto points = grid().points();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? forward_tomogram_means(cat(), 0.78, 0.84, points)
                                      : forward_tomogram_means_serial(cat(), 0.78, 0.84, points));
  }
}

template <bool Parallel>
void BM_SynthesizeTomogram(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? synthesize_tomogram(cat(), 0.78, 0.84, grid(), 10000, 1)
                                      : synthesize_tomogram_serial(cat(), 0.78, 0.84, grid(), 10000, 1));
  }
}

template <bool Parallel>
void BM_ParityTrain(benchmark::State& state) {
  const DetectorParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? parity_train_sample(6, p, 100000, 1)
                                      : parity_train_sample_serial(6, p, 100000, 1));
  }
}

template <bool Parallel>
void BM_Heterodyne(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? simulate_heterodyne(cat(), NoiseModel{}, 100000, 2)
                                      : simulate_heterodyne_serial(cat(), NoiseModel{}, 100000, 2));
  }
}

template <bool Parallel>
void BM_RawMomentSums(benchmark::State& state) {
  records();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? raw_moment_sums(records(), 6) : raw_moment_sums_serial(records(), 6));
  }
}

}  // namespace

BENCHMARK(BM_WignerMap<false>)->Name("wigner_map/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WignerMap<true>)->Name("wigner_map/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolutionMap<false>)->Name("convolution_map/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolutionMap<true>)->Name("convolution_map/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardTomogram<false>)->Name("forward_tomogram/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardTomogram<true>)->Name("forward_tomogram/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesizeTomogram<false>)->Name("synthesize_tomogram/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesizeTomogram<true>)->Name("synthesize_tomogram/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParityTrain<false>)->Name("parity_train/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParityTrain<true>)->Name("parity_train/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Heterodyne<false>)->Name("heterodyne/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Heterodyne<true>)->Name("heterodyne/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RawMomentSums<false>)->Name("raw_moment_sums/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RawMomentSums<true>)->Name("raw_moment_sums/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
