#include "lgae/liegroup.hpp"
#include "lgae/rng.hpp"

#include <benchmark/benchmark.h>

namespace lg = lgae::liegroup;

namespace {

lg::Utdat random_utdat(lgae::Rng& rng, Eigen::Index n) {
  lg::Matrix U = lg::Matrix::Zero(n, n);
  lg::Vector mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    U(i, i) = 0.1 + 9.9 * rng.uniform();
    for (Eigen::Index j = i + 1; j < n; ++j) U(i, j) = 2.0 * rng.uniform() - 1.0;
    mu[i] = 20.0 * rng.uniform() - 10.0;
  }
  return {U, mu};
}

void BM_MatrixLog(benchmark::State& state) {
  lgae::Rng rng(1);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const lg::Matrix g = random_utdat(rng, n).embedded();
  for (auto _ : state) benchmark::DoNotOptimize(lg::matrix_log(g));
}
BENCHMARK(BM_MatrixLog)->Arg(2)->Arg(5)->Arg(11);

void BM_MatrixExp(benchmark::State& state) {
  lgae::Rng rng(2);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const lg::Matrix g = lg::matrix_log(random_utdat(rng, n).embedded());
  for (auto _ : state) benchmark::DoNotOptimize(lg::matrix_exp(g));
}
BENCHMARK(BM_MatrixExp)->Arg(2)->Arg(5)->Arg(11);

void BM_DiagExpMap(benchmark::State& state) {
  lgae::Rng rng(3);
  const auto k = static_cast<Eigen::Index>(state.range(0));
  lg::TangentDiag t{lg::Vector(k), lg::Vector(k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    t.phi[i] = rng.normal();
    t.theta[i] = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(lg::diag_exp_map(t));
}
BENCHMARK(BM_DiagExpMap)->Arg(10)->Arg(100);

void BM_GeodesicDistance(benchmark::State& state) {
  lgae::Rng rng(4);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto a = random_utdat(rng, n);
  const auto b = random_utdat(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(lg::geodesic_distance(a, b));
}
BENCHMARK(BM_GeodesicDistance)->Arg(4)->Arg(8);

}  // namespace
