#include <sstream>

#include <benchmark/benchmark.h>

#include "mixscope/expansion.hpp"
#include "mixscope/heuristics.hpp"
#include "mixscope/matcher.hpp"
#include "mixscope/simulator.hpp"
#include "mixscope/taint.hpp"

using namespace mixscope;

namespace {

Simulation corpus(std::size_t scale) {
  SimConfig cfg;
  cfg.rng_seed = 11;
  cfg.chip_mixes = 50 * scale;
  cfg.coinjoin_rounds = 10 * scale;
  cfg.peeling_chains = 5 * scale;
  cfg.background_txs = 500 * scale;
  cfg.converter_deposits = 50 * scale;
  cfg.converter_payouts = 50 * scale;
  cfg.hack_targets = 12;
  return simulate(cfg);
}

std::string ndjson(const Simulation& sim) {
  std::ostringstream out;
  write_ndjson(sim, out);
  return out.str();
}

void BM_Ingest(benchmark::State& state) {
  const auto text = ndjson(corpus(state.range(0)));
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(ingest_ndjson(in));
  }
  state.SetBytesProcessed(std::int64_t(state.iterations() * text.size()));
}
BENCHMARK(BM_Ingest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DetectSets(benchmark::State& state) {
  const auto sim = corpus(4);
  for (auto _ : state)
    for (const auto& tx : sim.transactions) benchmark::DoNotOptimize(detect_anonymity_sets(tx, {}));
  state.SetItemsProcessed(std::int64_t(state.iterations() * sim.transactions.size()));
}
BENCHMARK(BM_DetectSets)->Unit(benchmark::kMillisecond);

void BM_SeedExpand(benchmark::State& state) {
  const auto sim = corpus(state.range(0));
  const auto g = TransactionGraph::build(sim.transactions);
  const std::vector<TxId> seed{sim.truth.with_label(Label::ChipMix).front()};
  for (auto _ : state) benchmark::DoNotOptimize(seed_expand(g, seed, {}));
}
BENCHMARK(BM_SeedExpand)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TraceTaint(benchmark::State& state) {
  const auto sim = corpus(state.range(0));
  const auto g = TransactionGraph::build(sim.transactions);
  const auto mixes = sim.truth.with_label(Label::ChipMix);
  for (auto _ : state) benchmark::DoNotOptimize(trace_taint(g, *sim.truth.hack_root, mixes, {50, 1'000'000}));
}
BENCHMARK(BM_TraceTaint)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_MatchRecords(benchmark::State& state) {
  const auto sim = corpus(4);
  const auto g = TransactionGraph::build(sim.transactions);
  Rng rng(3);
  const auto records = emit_convert_records(sim.truth, 90, rng);
  const auto validator = unknown_validator();
  for (auto _ : state) benchmark::DoNotOptimize(match_records(g, records, {}, validator));
  state.SetItemsProcessed(std::int64_t(state.iterations() * records.size()));
}
BENCHMARK(BM_MatchRecords)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
