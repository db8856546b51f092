#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mixscope/error.hpp"
#include "mixscope/simulator.hpp"
#include "mixscope/taint.hpp"

using namespace mixscope;
using namespace mixscope::testing;

namespace {

Amount pwyw_fee_for(std::string_view deposit) {
  const auto v = btc(deposit);
  const auto g = TransactionGraph::build(
      {make_tx("user", 1, {}, {{addr("1", "user"), v}}),
       make_tx("dep", 2, {in("user", 0)}, {{addr("1", "deposit"), v}}),
       make_tx("mix", 3, {in("dep", 0)}, {{addr("1", "chip"), v}})});
  return estimate_pwyw_fees(g, std::vector<TxId>{tid("mix")}).total;
}

Simulation rounds(std::size_t n, double switch_at) {
  SimConfig cfg;
  cfg.rng_seed = 2;
  cfg.coinjoin_rounds = n;
  cfg.coordinator_switch = switch_at;
  return simulate(cfg);
}

}  // namespace

TEST(Pwyw, TrailingDigitsAreTheFee) {
  EXPECT_EQ(pwyw_fee_for("0.0015"), btc("0.0005"));
  EXPECT_EQ(pwyw_fee_for("0.0005"), btc("0.0005"));
  EXPECT_EQ(pwyw_fee_for("0.128"), 0);
}

TEST(Pwyw, EmptyMixerSetIsError) {
  const auto g = TransactionGraph::build(coinbase_split_transactions());
  EXPECT_THROW(estimate_pwyw_fees(g, std::vector<TxId>{}), AnalysisError);
}

TEST(Pwyw, MatchesSimulatorLedger) {
  SimConfig cfg;
  cfg.rng_seed = 31;
  cfg.chip_mixes = 40;
  cfg.background_txs = 40;
  const auto sim = simulate(cfg);
  const auto g = TransactionGraph::build(sim.transactions);
  const auto report = estimate_pwyw_fees(g, sim.truth.with_label(Label::ChipMix), cfg.chip_unit);
  Amount ledger = 0;
  for (const auto& [txid, fee] : sim.truth.fees) ledger += fee;
  EXPECT_EQ(report.total, ledger);
  Amount buckets = 0;
  for (const auto& [month, v] : report.monthly) buckets += v;
  EXPECT_EQ(buckets, report.total);
  EXPECT_EQ(report.monthly_average, report.total / Amount(report.monthly.size()));
}

TEST(AddressFees, HundredRoundsInOneMonth) {
  const auto sim = rounds(100, 1.0);
  const auto g = TransactionGraph::build(sim.transactions);
  const auto txs = sim.truth.with_label(Label::CoinJoin);
  const auto report = estimate_address_fees(g, sim.truth.coordinator_addresses, txs);
  ASSERT_EQ(report.monthly.size(), 1u);
  EXPECT_EQ(report.monthly.begin()->second, btc("0.3"));
  EXPECT_EQ(report.total, btc("0.3"));
}

TEST(AddressFees, EmptyInputsGiveZero) {
  const auto sim = rounds(5, 0.5);
  const auto g = TransactionGraph::build(sim.transactions);
  const auto empty = estimate_address_fees(g, sim.truth.coordinator_addresses, std::vector<TxId>{});
  EXPECT_EQ(empty.total, 0);
  EXPECT_TRUE(empty.monthly.empty());
  const std::vector<std::string> nobody{addr("1", "nobody")};
  EXPECT_EQ(estimate_address_fees(g, nobody, sim.truth.with_label(Label::CoinJoin)).total, 0);
}

TEST(CommonOutputs, CoordinatorAddressesSurface) {
  const auto single = rounds(20, 1.0);
  const auto g1 = TransactionGraph::build(single.transactions);
  const auto t1 = single.truth.with_label(Label::CoinJoin);
  const auto top = common_output_addresses(g1, t1, 0.3);
  ASSERT_FALSE(top.empty());
  EXPECT_EQ(top[0].first, single.truth.coordinator_addresses[0]);
  EXPECT_EQ(top[0].second, t1.size());

  const auto two = rounds(20, 0.5);
  const auto g2 = TransactionGraph::build(two.transactions);
  const auto t2 = two.truth.with_label(Label::CoinJoin);
  std::set<std::string> found;
  for (const auto& [a, n] : common_output_addresses(g2, t2, 0.3)) found.insert(a);
  EXPECT_TRUE(found.count(two.truth.coordinator_addresses[0]));
  EXPECT_TRUE(found.count(two.truth.coordinator_addresses[1]));
  EXPECT_TRUE(common_output_addresses(g2, t2, 1.0).empty());
}
