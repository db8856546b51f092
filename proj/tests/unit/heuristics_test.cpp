#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mixscope/error.hpp"
#include "mixscope/heuristics.hpp"
#include "mixscope/simulator.hpp"
#include "oracles.hpp"

using namespace mixscope;
using namespace mixscope::testing;

namespace {

Transaction with_values(std::vector<Amount> values) {
  std::vector<OutSpec> outs;
  for (std::size_t i = 0; i < values.size(); ++i) outs.push_back({addr("1", std::to_string(i)), values[i]});
  return make_tx("t", 1, {}, outs);
}

}  // namespace

TEST(AnonymitySets, CoinJoinWithTwoDenominations) {
  const auto tx = with_values({btc("0.1"), btc("0.2"), btc("0.1"), btc("0.1"), btc("0.2"),
                               btc("0.1"), btc("0.2"), btc("0.0537")});
  const auto sets = detect_anonymity_sets(tx, {});
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].value, btc("0.1"));
  EXPECT_EQ(sets[0].member_vouts, (std::vector<std::uint32_t>{0, 2, 3, 5}));
  EXPECT_EQ(sets[1].value, btc("0.2"));
  EXPECT_EQ(sets[1].member_vouts, (std::vector<std::uint32_t>{1, 4, 6}));
  EXPECT_TRUE(generates_anonymity_sets(tx, {}));
}

TEST(AnonymitySets, DistinctValuesHaveNone) {
  const auto tx = with_values({btc("7"), btc("3")});
  EXPECT_TRUE(detect_anonymity_sets(tx, {}).empty());
  EXPECT_FALSE(generates_anonymity_sets(tx, {}));
}

TEST(AnonymitySets, ThresholdAndWhitelist) {
  const auto tx = with_values({btc("0.001"), btc("0.001")});
  HeuristicsConfig three;
  three.min_set_size = 3;
  EXPECT_FALSE(generates_anonymity_sets(tx, three));
  HeuristicsConfig listed;
  listed.denomination_whitelist = std::set<Amount>{btc("0.002")};
  EXPECT_FALSE(generates_anonymity_sets(tx, listed));
  listed.denomination_whitelist->insert(btc("0.001"));
  EXPECT_TRUE(generates_anonymity_sets(tx, listed));
  HeuristicsConfig two_sets;
  two_sets.min_set_count = 2;
  EXPECT_FALSE(generates_anonymity_sets(tx, two_sets));
}

TEST(AnonymitySets, InvalidConfigRejected) {
  HeuristicsConfig cfg;
  cfg.min_set_size = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(AnonymitySets, MatchesHistogramOracle) {
  std::mt19937_64 gen(3);
  for (int round = 0; round < 2000; ++round) {
    const auto n = 1 + gen() % 12;
    std::vector<Amount> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(1 + static_cast<Amount>(gen() % 5));
    const auto tx = with_values(values);
    for (std::size_t k : {2u, 3u}) {
      HeuristicsConfig cfg;
      cfg.min_set_size = k;
      const auto expected = histogram_sets(tx, k);
      const auto sets = detect_anonymity_sets(tx, cfg);
      ASSERT_EQ(sets.size(), expected.size());
      for (const auto& s : sets) {
        ASSERT_TRUE(expected.count(s.value));
        EXPECT_EQ(s.member_vouts, expected.at(s.value));
        for (auto v : s.member_vouts) EXPECT_EQ(tx.outputs.at(v).value, s.value);
      }
      EXPECT_EQ(generates_anonymity_sets(tx, cfg), !expected.empty());
    }
  }
}

TEST(ChangeOutput, AddressTypeSplit) {
  const auto g = TransactionGraph::build(
      {make_tx("f", 1, {}, {{addr("1", "user"), btc("1")}}),
       make_tx("p", 2, {in("f", 0)}, {{addr("bc1q", "shop"), btc("0.4")}, {addr("1", "change"), btc("0.6")}})});
  EXPECT_EQ(address_type_change(g.get(tid("p")), g), 1u);
  EXPECT_EQ(change_output_candidate(g.get(tid("p")), g), 1u);
}

TEST(ChangeOutput, FreshAddressRule) {
  const auto g = TransactionGraph::build(
      {make_tx("f", 1, {}, {{addr("1", "user"), btc("1")}}),
       make_tx("seen", 1, {}, {{addr("1", "merchant"), btc("0.01")}}),
       make_tx("p", 2, {in("f", 0)}, {{addr("1", "merchant"), btc("0.4")}, {addr("1", "fresh"), btc("0.6")}}),
       make_tx("f2", 1, {}, {{addr("1", "user2"), btc("1")}}),
       make_tx("q", 2, {in("f2", 0)}, {{addr("1", "newA"), btc("0.4")}, {addr("1", "newB"), btc("0.6")}})});
  EXPECT_FALSE(address_type_change(g.get(tid("p")), g).has_value());
  EXPECT_EQ(change_output_candidate(g.get(tid("p")), g), 1u);
  EXPECT_FALSE(change_output_candidate(g.get(tid("q")), g).has_value());
  EXPECT_THROW(change_output_candidate(g.get(tid("f")), g), AnalysisError);
}

TEST(Mechanism, IsolatedPaymentsAreUnknown) {
  const auto g = TransactionGraph::build(
      {make_tx("f", 1, {}, {{addr("1", "a"), btc("1")}}),
       make_tx("p", 2, {in("f", 0)}, {{addr("1", "b"), btc("0.3")}, {addr("1", "c"), btc("0.7")}})});
  const std::vector<TxId> samples{tid("p")};
  EXPECT_EQ(classify_mechanism(samples, g, {}).verdict, Mechanism::Unknown);
  EXPECT_THROW(classify_mechanism(std::vector<TxId>{}, g, {}), AnalysisError);
  EXPECT_THROW(classify_mechanism(std::vector<TxId>{tid("zz")}, g, {}), AnalysisError);
}

TEST(Mechanism, SimulatedScenarios) {
  SimConfig cj;
  cj.coinjoin_rounds = 20;
  cj.background_txs = 30;
  const auto cj_sim = simulate(cj);
  const auto cj_graph = TransactionGraph::build(cj_sim.transactions);
  const auto rounds = cj_sim.truth.with_label(Label::CoinJoin);
  const auto cj_verdict = classify_mechanism(rounds, cj_graph, {});
  EXPECT_EQ(cj_verdict.verdict, Mechanism::Obfuscating);
  ASSERT_FALSE(cj_verdict.evidence.empty());
  EXPECT_EQ(cj_verdict.evidence.front().reason, "anonymity-set");

  SimConfig peel;
  peel.peeling_chains = 10;
  const auto peel_sim = simulate(peel);
  const auto peel_graph = TransactionGraph::build(peel_sim.transactions);
  const auto nodes = peel_sim.truth.with_label(Label::PeelNode);
  const auto verdict = classify_mechanism(nodes, peel_graph, {});
  EXPECT_EQ(verdict.verdict, Mechanism::Swapping);
  EXPECT_GT(verdict.chain_linked, 0u);
}
