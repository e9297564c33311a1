// Serial reference against the OpenMP kernels on random fields of the
// default benchmark mesh. Arguments are (count, threads); threads = 0 runs
// the serial reference.

#include <benchmark/benchmark.h>

#include "romuq/kernels.hpp"
#include "romuq/mesh.hpp"
#include "support.hpp"

using namespace romuq;

namespace {

const mesh::MeshPtr& bench_mesh() {
  static const mesh::MeshPtr m = [] {
    auto s = test::plate_spec(72, 36);
    s.obstacle = mesh::Rect{1.5, -1.0 / 6.0, 2.5, 1.0 / 6.0};
    return mesh::build_mesh(s);
  }();
  return m;
}

std::vector<mesh::VelocityField> fields(int n) {
  test::Rng rng(42);
  std::vector<mesh::VelocityField> f;
  for (int i = 0; i < n; ++i) f.push_back(test::random_velocity(rng, bench_mesh()));
  return f;
}

void correlation(benchmark::State& state) {
  const auto f = fields(static_cast<int>(state.range(0)));
  const auto s = kernels::flatten(f);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto k = threads == 0 ? kernels::serial::correlation_matrix(s) : kernels::parallel::correlation_matrix(s, 1.0, threads);
    benchmark::DoNotOptimize(k);
  }
}

void convection(benchmark::State& state) {
  const auto f = fields(static_cast<int>(state.range(0)));
  kernels::ConvectionOperands ops;
  for (const auto& m : f) ops.modes.push_back(&m);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto c = threads == 0 ? kernels::serial::convection_tensor(ops) : kernels::parallel::convection_tensor(ops, threads);
    benchmark::DoNotOptimize(c);
  }
}

} // namespace

BENCHMARK(correlation)->ArgsProduct({{60, 120}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(convection)->ArgsProduct({{12, 22}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
