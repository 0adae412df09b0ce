#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include <sstream>

#include "scholmig/analysis.hpp"
#include "scholmig/clustering.hpp"
#include "scholmig/disambig.hpp"
#include "scholmig/geoinfer.hpp"
#include "scholmig/random.hpp"
#include "scholmig/records.hpp"
#include "scholmig/synth.hpp"

using namespace scholmig;

namespace {

const geoinfer::Gazetteer& gazetteer() {
  static const auto g = geoinfer::Gazetteer::load(std::filesystem::path(SCHOLMIG_DATA_DIR) / "gazetteer.csv");
  return g;
}

Corpus synthetic(int authors) {
  return synth::generate_corpus(synth::GeneratorConfig::with_population(authors, 1), gazetteer()).corpus;
}

void BM_AverageLinkage(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  disambig::DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(disambig::cluster_records(m, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AverageLinkage)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_ParseCorpusCsv(benchmark::State& state) {
  std::ostringstream text;
  write_corpus_csv(synthetic(static_cast<int>(state.range(0))), text);
  const auto csv = text.str();
  for (auto _ : state) {
    std::istringstream in(csv);
    benchmark::DoNotOptimize(parse_corpus(in, InputFormat::kCsv));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseCorpusCsv)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Disambiguate(benchmark::State& state) {
  auto cfg = synth::GeneratorConfig::with_population(static_cast<int>(state.range(0)), 2);
  cfg.merged_id_fraction = 0.005;
  const auto corpus = synth::generate_corpus(cfg, gazetteer()).corpus;
  for (auto _ : state) benchmark::DoNotOptimize(disambig::disambiguate_corpus(corpus));
}
BENCHMARK(BM_Disambiguate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AnalyzeCorpus(benchmark::State& state) {
  const auto corpus = synthetic(static_cast<int>(state.range(0)));
  const auto table = taxonomy::AsjcTable::standard();
  for (auto _ : state) benchmark::DoNotOptimize(analyze_corpus(corpus, table, AnalysisConfig{}));
}
BENCHMARK(BM_AnalyzeCorpus)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
