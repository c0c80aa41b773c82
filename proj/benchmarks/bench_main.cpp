#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "recast/dsl_json.hpp"
#include "recast/eval.hpp"
#include "recast/layout.hpp"
#include "recast/render.hpp"
#include "recast/validate.hpp"

namespace {

using namespace recast;

std::string read_corpus(const std::string& rel) {
  std::ifstream in(std::filesystem::path(RECAST_CORPUS_DIR) / rel, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* const kDocs[] = {
    "basic/01_simple_bar.revis.json",
    "basic/12_strip_plot.revis.json",
    "composite/01_concentric_rings.revis.json",
    "composite/02_linked_panels.revis.json",
};

void BM_ParseSerialize(benchmark::State& state) {
  const std::string text = read_corpus(kDocs[state.range(0)]);
  for (auto _ : state) {
    auto doc = parse_document(text);
    benchmark::DoNotOptimize(serialize(doc));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseSerialize)->DenseRange(0, 3);

void BM_Validate(benchmark::State& state) {
  const auto doc = parse_document(read_corpus(kDocs[state.range(0)]));
  for (auto _ : state) benchmark::DoNotOptimize(validate(doc));
}
BENCHMARK(BM_Validate)->DenseRange(0, 3);

void BM_ResolveDimension(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  LayoutDimensionSpec spec;
  spec.stacking = true;
  spec.anchor = Anchor::stacking_decided;
  spec.size_uniform = false;
  spec.size_max = 100.0 / n;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> values(n);
  for (auto& v : values) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(resolve_dimension(spec, n, values));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ResolveDimension)->RangeMultiplier(8)->Range(8, 4096);

void BM_RenderDocument(benchmark::State& state) {
  const auto doc = parse_document(read_corpus(kDocs[state.range(0)]));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(render_document(doc, 42, Canvas{800, 600}, {}, threads));
}
BENCHMARK(BM_RenderDocument)->ArgsProduct({{0, 1, 2, 3}, {1, 4}});

void BM_BuildScene(benchmark::State& state) {
  const auto doc = parse_document(read_corpus(kDocs[state.range(0)]));
  const DataProvider data(doc, 42);
  for (auto _ : state) benchmark::DoNotOptimize(build_scene(data, Canvas{800, 600}));
}
BENCHMARK(BM_BuildScene)->DenseRange(0, 3);

void BM_Score(benchmark::State& state) {
  const auto gt = parse_document(read_corpus("basic/09_bubble_2.revis.json"));
  for (auto _ : state) benchmark::DoNotOptimize(score(gt, gt));
}
BENCHMARK(BM_Score);

}  // namespace

BENCHMARK_MAIN();
