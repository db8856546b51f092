#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mixscope/heuristics.hpp"
#include "mixscope/serialize.hpp"
#include "mixscope/simulator.hpp"

using namespace mixscope;
using namespace mixscope::testing;

namespace {

SimConfig mixed(std::uint64_t seed) {
  SimConfig cfg;
  cfg.rng_seed = seed;
  cfg.chip_mixes = 15;
  cfg.coinjoin_rounds = 8;
  cfg.peeling_chains = 6;
  cfg.background_txs = 80;
  cfg.converter_deposits = 10;
  cfg.converter_payouts = 10;
  cfg.hack_targets = 3;
  return cfg;
}

std::string ndjson(const Simulation& sim) {
  std::ostringstream out;
  write_ndjson(sim, out);
  return out.str();
}

}  // namespace

TEST(Simulator, OneMixFourChips) {
  SimConfig cfg;
  cfg.chip_mixes = 1;
  cfg.chip_unit = btc("0.1");
  cfg.chip_denominations = {btc("0.1")};
  cfg.scripted_deposits = {{btc("0.15"), btc("0.25")}};
  cfg.network_fee = 0;
  const auto sim = simulate(cfg);
  const auto mixes = sim.truth.with_label(Label::ChipMix);
  ASSERT_EQ(mixes.size(), 1u);
  const auto g = TransactionGraph::build(sim.transactions);
  const auto& mix = g.get(mixes[0]);
  ASSERT_EQ(mix.outputs.size(), 4u);
  const auto sets = detect_anonymity_sets(mix, {});
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].value, btc("0.1"));
  EXPECT_EQ(sets[0].member_vouts.size(), 4u);
}

TEST(Simulator, FourUserCoinJoin) {
  SimConfig cfg;
  cfg.coinjoin_rounds = 1;
  cfg.coinjoin_participants = {4, 4};
  const auto sim = simulate(cfg);
  const auto rounds = sim.truth.with_label(Label::CoinJoin);
  ASSERT_EQ(rounds.size(), 1u);
  const auto g = TransactionGraph::build(sim.transactions);
  const auto sets = detect_anonymity_sets(g.get(rounds[0]), {});
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].value, btc("0.1"));
  EXPECT_EQ(sets[1].value, btc("0.2"));
  EXPECT_GT(g.get(rounds[0]).outputs.size(), 4u);
}

TEST(Simulator, ConservationAndLabels) {
  const auto sim = simulate(mixed(1));
  const auto g = TransactionGraph::build(sim.transactions);
  EXPECT_EQ(sim.truth.labels.size(), sim.transactions.size());
  for (const auto& tx : sim.transactions) {
    if (!tx.is_coinbase()) {
      EXPECT_GE(fee_of(tx, g), 0);
    }
    if (sim.truth.labels.at(tx.txid) == Label::Background) {
      EXPECT_FALSE(generates_anonymity_sets(tx, {})) << tx.txid.str();
    }
  }
}

TEST(Simulator, ByteIdenticalPerSeed) {
  EXPECT_EQ(ndjson(simulate(mixed(7))), ndjson(simulate(mixed(7))));
  EXPECT_NE(ndjson(simulate(mixed(7))), ndjson(simulate(mixed(8))));
  EXPECT_EQ(to_json(simulate(mixed(7)).truth).dump(), to_json(simulate(mixed(7)).truth).dump());
}

TEST(Simulator, GroundTruthRoundTrip) {
  const auto sim = simulate(mixed(2));
  const auto doc = nlohmann::json::parse(to_json(sim.truth).dump());
  const auto back = ground_truth_from_json(doc);
  EXPECT_EQ(to_json(back).dump(), to_json(sim.truth).dump());
}

TEST(Simulator, RecordsFollowTruth) {
  const auto sim = simulate(mixed(3));
  Rng rng(1);
  const auto exact = emit_convert_records(sim.truth, 0, rng);
  ASSERT_EQ(exact.size(), sim.truth.records.size());
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_EQ(exact[i], sim.truth.records[i].record);
  const auto jittered = emit_convert_records(sim.truth, 90, rng);
  for (std::size_t i = 0; i < jittered.size(); ++i) {
    EXPECT_LE(std::llabs(jittered[i].timestamp - exact[i].timestamp), 90);
    EXPECT_EQ(jittered[i].value, exact[i].value);
  }
  EXPECT_TRUE(emit_convert_records(simulate(SimConfig{}).truth, 0, rng).empty());
}

TEST(Simulator, RejectsInfeasibleConfigs) {
  SimConfig cfg;
  cfg.chain_length = {10, 5};
  EXPECT_THROW(simulate(cfg), std::invalid_argument);
  cfg = {};
  cfg.coinjoin_participants = {1, 3};
  EXPECT_THROW(simulate(cfg), std::invalid_argument);
  cfg = {};
  cfg.hack_targets = 2;
  EXPECT_THROW(simulate(cfg), std::invalid_argument);
  cfg = {};
  cfg.isolated_fraction = 1.5;
  EXPECT_THROW(simulate(cfg), std::invalid_argument);
}

TEST(Simulator, IsolatedMixesAreCounted) {
  SimConfig cfg;
  cfg.chip_mixes = 50;
  cfg.isolated_fraction = 0.08;
  const auto sim = simulate(cfg);
  EXPECT_EQ(sim.truth.isolated_mixes.size(), 4u);
}
