#include <random>

#include <benchmark/benchmark.h>

#include "flexpath/kernels/rate_kernels.hpp"

namespace k = flexpath::kernels;

namespace {

struct Instance {
  k::SensorField field;
  Eigen::Matrix3Xd points;
  Eigen::VectorXd durations;
  Eigen::MatrixXd alpha;
};

// S sensors in a 1 km square, N segments on a circle at 100 m.
Instance make(Eigen::Index sensors, Eigen::Index segments) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  Instance in;
  in.field.positions.resize(3, sensors);
  for (Eigen::Index s = 0; s < sensors; ++s) in.field.positions.col(s) << u(rng), u(rng), 0.0;
  in.field.gamma = Eigen::VectorXd::Constant(sensors, 2e2);
  in.points.resize(3, segments + 1);
  for (Eigen::Index n = 0; n <= segments; ++n) {
    const double a = 2.0 * 3.141592653589793 * static_cast<double>(n) / static_cast<double>(segments);
    in.points.col(n) << 500.0 + 300.0 * std::cos(a), 500.0 + 300.0 * std::sin(a), 100.0;
  }
  in.durations = Eigen::VectorXd::Constant(segments, 1.0);
  in.alpha = Eigen::MatrixXd::Constant(sensors, segments, 1.0 / static_cast<double>(sensors));
  return in;
}

template <bool Parallel>
void spectral(benchmark::State& state) {
  const Instance in = make(state.range(0), state.range(1));
  for (auto _ : state) {
    auto se = Parallel ? k::parallel::spectral_matrix(in.field, in.points) : k::serial::spectral_matrix(in.field, in.points);
    benchmark::DoNotOptimize(se.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(1) + 1));
}

template <bool Parallel>
void weighted(benchmark::State& state) {
  const Instance in = make(state.range(0), state.range(1));
  const Eigen::MatrixXd se = k::serial::spectral_matrix(in.field, in.points).leftCols(state.range(1));
  for (auto _ : state) {
    auto r = Parallel ? k::parallel::weighted_rates(se, in.alpha, in.durations, 1.0)
                      : k::serial::weighted_rates(se, in.alpha, in.durations, 1.0);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

template <bool Parallel>
void midpoint(benchmark::State& state) {
  const Instance in = make(state.range(0), state.range(1));
  const double period = in.durations.sum();
  for (auto _ : state) {
    auto r = Parallel ? k::parallel::midpoint_rates(in.field, in.points, in.durations, in.alpha, 50, period)
                      : k::serial::midpoint_rates(in.field, in.points, in.durations, in.alpha, 50, period);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * 50);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int s : {5, 50}) {
    for (int n : {40, 400, 4000}) b->Args({s, n});
  }
  b->ArgNames({"S", "N"});
}

}  // namespace

BENCHMARK(spectral<false>)->Name("spectral_matrix/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(spectral<true>)->Name("spectral_matrix/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(weighted<false>)->Name("weighted_rates/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(weighted<true>)->Name("weighted_rates/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(midpoint<false>)->Name("midpoint_rates/serial")->Apply(sizes)->UseRealTime();
BENCHMARK(midpoint<true>)->Name("midpoint_rates/omp")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
