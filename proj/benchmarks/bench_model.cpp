#include "lgae/models.hpp"
#include "lgae/rng.hpp"

#include <benchmark/benchmark.h>

namespace md = lgae::models;

namespace {

// One minibatch step at the MNIST architecture: forward, backward, no update.
void BM_TrainStep(benchmark::State& state) {
  const auto variant = static_cast<md::Variant>(state.range(0));
  lgae::Rng rng(1);
  md::Model model(variant, md::ModelShape{}, 0.5, rng);
  md::DenseMatrix x(100, 784);
  for (md::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  for (auto _ : state) {
    const auto pass = md::reconstruct(model, x, rng);
    benchmark::DoNotOptimize(md::backward(model, x, pass));
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
  state.SetLabel(std::string(md::to_string(variant)));
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ExtractRepresentation(benchmark::State& state) {
  lgae::Rng rng(2);
  md::Model model(md::Variant::lgae, md::ModelShape{}, 0.5, rng);
  md::DenseMatrix x(1000, 784);
  for (md::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        md::extract_representation(model, x, md::RepresentationKind::lie_algebra));
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_ExtractRepresentation)->Unit(benchmark::kMillisecond);

}  // namespace
