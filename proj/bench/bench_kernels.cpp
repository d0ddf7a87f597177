// Serial reference vs OpenMP kernels on the hot paths of one refinement pass.

#include <benchmark/benchmark.h>

#include <vector>

#include "mvver/kernels.hpp"

using namespace mvver;

namespace {

const LabeledDataset& data() {
  static const LabeledDataset ds = make_blobs({10, 500, 32, 4.0, 1.0, 1}).data;
  return ds;
}

std::vector<Model> views(ModelKind kind, int n) {
  std::vector<Model> out;
  for (int j = 0; j < n; ++j) out.push_back(Model::initialized(kind, 32, 10, 64, j));
  return out;
}

template <auto Kernel>
void bm_predict_views(benchmark::State& state) {
  const auto models = views(static_cast<ModelKind>(state.range(0)), 3);
  const auto rows = kernels::rows_of(data().samples);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(models, rows));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.size() * models.size()));
}

template <auto Kernel>
void bm_score_entropy(benchmark::State& state) {
  const auto model = views(static_cast<ModelKind>(state.range(0)), 1).front();
  const auto rows = kernels::rows_of(data().samples);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(model, rows, false));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.size()));
}

template <auto Kernel>
void bm_fit_all(benchmark::State& state) {
  const auto parts = stratified_split(data(), static_cast<int>(state.range(0)), 3);
  std::vector<ClassifierConfig> cfgs(parts.size());
  for (std::size_t j = 0; j < cfgs.size(); ++j) {
    cfgs[j].epochs = 5;
    cfgs[j].seed = j;
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(parts, cfgs));
}

}  // namespace

BENCHMARK(bm_predict_views<kernels::predict_views_serial>)->Arg(0)->Arg(1)->Name("predict_views/serial");
BENCHMARK(bm_predict_views<kernels::predict_views>)->Arg(0)->Arg(1)->Name("predict_views/omp");
BENCHMARK(bm_score_entropy<kernels::score_entropy_serial>)->Arg(0)->Arg(1)->Name("score_entropy/serial");
BENCHMARK(bm_score_entropy<kernels::score_entropy>)->Arg(0)->Arg(1)->Name("score_entropy/omp");
BENCHMARK(bm_fit_all<kernels::fit_all_serial>)->Arg(2)->Arg(4)->Name("fit_all/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_fit_all<kernels::fit_all>)->Arg(2)->Arg(4)->Name("fit_all/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
