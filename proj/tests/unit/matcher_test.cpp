#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mixscope/error.hpp"
#include "mixscope/matcher.hpp"
#include "mixscope/simulator.hpp"

using namespace mixscope;
using namespace mixscope::testing;

namespace {

struct Corpus {
  Simulation sim;
  TransactionGraph graph;
  std::vector<ConvertRecord> records;
};

Corpus corpus(std::int64_t jitter, std::uint64_t seed = 3) {
  SimConfig cfg;
  cfg.rng_seed = seed;
  cfg.converter_deposits = 200;
  cfg.converter_payouts = 60;
  cfg.background_txs = 300;
  auto sim = simulate(cfg);
  Rng rng(seed + 100);
  auto records = emit_convert_records(sim.truth, jitter, rng);
  auto graph = TransactionGraph::build(sim.transactions);
  return {std::move(sim), std::move(graph), std::move(records)};
}

AddressValidator perfect(const Simulation& sim) {
  auto addresses = std::make_shared<std::set<std::string, std::less<>>>();
  std::map<TxId, const Transaction*> by_id;
  for (const auto& tx : sim.transactions) by_id[tx.txid] = &tx;
  for (const auto& r : sim.truth.records) addresses->insert(by_id.at(r.txid)->outputs[r.vout].address.text);
  return [addresses](std::string_view a) {
    return addresses->count(a) ? Validation::Service : Validation::NotService;
  };
}

std::size_t correct(const Corpus& c, const std::vector<MatchResult>& results) {
  std::size_t n = 0;
  for (const auto& r : results)
    n += r.txid && *r.txid == c.sim.truth.records[r.record_index].txid;
  return n;
}

}  // namespace

TEST(Matcher, ExactRecordsMatchEverything) {
  const auto c = corpus(0);
  const auto results = match_records(c.graph, c.records, {}, perfect(c.sim));
  EXPECT_EQ(correct(c, results), c.records.size());
  for (const auto& r : results) EXPECT_EQ(r.status, MatchStatus::Validated);
}

TEST(Matcher, WindowMonotonicity) {
  const auto c = corpus(400);
  std::size_t previous = 0;
  for (std::uint32_t w : {1u, 3u, 5u, 7u, 9u}) {
    MatcherConfig cfg;
    cfg.window_blocks = w;
    std::size_t matched = 0;
    for (const auto& r : match_records(c.graph, c.records, cfg, unknown_validator()))
      matched += r.status != MatchStatus::Rejected;
    EXPECT_GE(matched, previous) << w;
    previous = matched;
  }
}

TEST(Matcher, MatchesLieInsideWindowAndTolerance) {
  const auto c = corpus(90);
  MatcherConfig cfg;
  cfg.value_tolerance = 5;
  for (const auto& r : match_records(c.graph, c.records, cfg, unknown_validator())) {
    if (!r.txid) continue;
    const auto& tx = c.graph.get(*r.txid);
    const auto& rec = c.records[r.record_index];
    bool near = false;
    for (const auto& o : tx.outputs) near |= std::llabs(o.value - rec.value) <= cfg.value_tolerance;
    EXPECT_TRUE(near);
    std::uint64_t closest = 0;
    std::int64_t best = -1;
    for (const auto& [h, t] : c.graph.block_times())
      if (best < 0 || std::llabs(t - rec.timestamp) < best) best = std::llabs(t - rec.timestamp), closest = h;
    EXPECT_LE(tx.block_height, closest + 3);
    EXPECT_GE(tx.block_height + 3, closest);
  }
}

TEST(Matcher, UnmatchedValueIsRejected) {
  const auto c = corpus(0);
  std::vector<ConvertRecord> records{{"BTC", "ETH", c.records[0].timestamp, 123}};
  const auto r = match_records(c.graph, records, {}, unknown_validator());
  EXPECT_EQ(r[0].status, MatchStatus::Rejected);
  EXPECT_FALSE(r[0].txid.has_value());
  EXPECT_THROW(match_records(c.graph, std::vector<ConvertRecord>{}, {}, unknown_validator()), AnalysisError);
}

TEST(Matcher, ReversePayouts) {
  const auto c = corpus(0);
  const auto results = reverse_match(c.graph, c.records, "BTC", {}, unknown_validator());
  EXPECT_EQ(results.size(), 60u);
  EXPECT_GE(correct(c, results) * 100, results.size() * 99);
  EXPECT_THROW(reverse_match(c.graph, c.records, "DOGE", {}, unknown_validator()), AnalysisError);
}

TEST(Matcher, TiesBreakByTimeThenTxid) {
  std::vector<Transaction> txs{make_tx("f1", 1, {}, {{addr("3", "hot1"), btc("2")}}),
                               make_tx("f2", 1, {}, {{addr("3", "hot2"), btc("2")}}),
                               make_tx("pb", 2, {in("f2", 0)}, {{addr("1", "u2"), btc("1")}, {addr("3", "c2"), btc("0.9")}}),
                               make_tx("pa", 2, {in("f1", 0)}, {{addr("1", "u1"), btc("1")}, {addr("3", "c1"), btc("0.8")}})};
  const auto g = TransactionGraph::build(txs);
  const auto t = g.get(tid("pa")).timestamp;
  const std::vector<ConvertRecord> records{{"LTC", "BTC", t, btc("1")}};
  const auto a = reverse_match(g, records, "BTC", {}, unknown_validator());
  const auto b = reverse_match(g, records, "BTC", {}, unknown_validator());
  EXPECT_EQ(a, b);
  ASSERT_TRUE(a[0].txid.has_value());
  EXPECT_EQ(*a[0].txid, std::min(tid("pa"), tid("pb")));
  EXPECT_EQ(a[0].candidate_count, 2u);
}

TEST(Matcher, LegacyDeltasAreAfterThenBefore) {
  MatcherConfig cfg;
  cfg.legacy_deltas = std::pair{1u, 0u};
  EXPECT_NO_THROW(cfg.validate());
  cfg.window_blocks = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Matcher, RecordIo) {
  std::istringstream in("{\"curIn\":\"BTC\",\"curOut\":\"ETH\",\"time\":5,\"value_sat\":7}\n\n");
  const auto records = read_records(in);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(parse_record(record_to_json(records[0])), records[0]);
  EXPECT_THROW(parse_record("{\"curIn\":\"BTC\"}"), DataError);
  EXPECT_THROW(parse_record("{\"curIn\":\"BTC\",\"curOut\":\"ETH\",\"time\":5,\"value_sat\":7,\"x\":1}"), DataError);
}
