#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mixscope/error.hpp"
#include "mixscope/simulator.hpp"
#include "mixscope/txgraph.hpp"

using namespace mixscope;
using namespace mixscope::testing;

namespace {

std::string to_ndjson(const std::vector<Transaction>& txs) {
  std::string out;
  for (const auto& tx : txs) out += transaction_to_json(tx) + "\n";
  return out;
}

TransactionGraph ingest(const std::string& text) {
  std::istringstream in(text);
  return ingest_ndjson(in);
}

}  // namespace

TEST(TxGraph, AliceSendsSevenBitcoin) {
  const auto g = ingest(to_ndjson(coinbase_split_transactions()));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(spender_of(g, tid("A"), 0), tid("B"));
  EXPECT_EQ(fee_of(g.get(tid("B")), g), 0);
}

TEST(TxGraph, EmptyStream) {
  const auto g = ingest("");
  EXPECT_TRUE(g.empty());
  EXPECT_TRUE(ingest("\n  \n").empty());
}

TEST(TxGraph, DanglingReferenceIsDataError) {
  auto txs = coinbase_split_transactions();
  txs[1].inputs[0].prev_txid = tid("nonexistent");
  EXPECT_THROW(ingest(to_ndjson(txs)), DataError);
}

TEST(TxGraph, SelfReferenceAndBadVoutAreDangling) {
  auto txs = coinbase_split_transactions();
  txs[1].inputs.push_back({tid("B"), 0});
  EXPECT_THROW(TransactionGraph::build(txs), DataError);
  txs = coinbase_split_transactions();
  txs[1].inputs[0].prev_vout = 3;
  EXPECT_THROW(TransactionGraph::build(txs), DataError);
}

TEST(TxGraph, DuplicateTxidRejected) {
  auto txs = coinbase_split_transactions();
  txs.push_back(txs[0]);
  EXPECT_THROW(TransactionGraph::build(txs), DataError);
}

TEST(TxGraph, DoubleSpendRejected) {
  auto txs = coinbase_split_transactions();
  txs.push_back(make_tx("C", 3, {in("A", 0)}, {{addr("1", "x"), btc("1")}}));
  EXPECT_THROW(TransactionGraph::build(txs), DataError);
}

TEST(TxGraph, OutputsExceedingInputsRejected) {
  auto txs = coinbase_split_transactions();
  txs[1].outputs[0].value = btc("8");
  EXPECT_THROW(TransactionGraph::build(txs), DataError);
}

TEST(TxGraph, FeeArithmetic) {
  std::vector<Transaction> txs{
      make_tx("f1", 1, {}, {{addr("1", "a"), 600'000}}),
      make_tx("f2", 1, {}, {{addr("1", "b"), 400'000}}),
      make_tx("pay", 2, {in("f1", 0), in("f2", 0)}, {{addr("1", "c"), 990'000}}),
      make_tx("g", 1, {}, {{addr("1", "d"), 500'000}}),
      make_tx("even", 2, {in("g", 0)}, {{addr("1", "e"), 200'000}, {addr("1", "f"), 300'000}}),
  };
  const auto g = TransactionGraph::build(txs);
  EXPECT_EQ(fee_of(g.get(tid("pay")), g), 10'000);
  EXPECT_EQ(fee_of(g.get(tid("even")), g), 0);
  EXPECT_THROW(fee_of(g.get(tid("g")), g), AnalysisError);
}

TEST(TxGraph, SpenderQueries) {
  const auto g = TransactionGraph::build(coinbase_split_transactions());
  EXPECT_FALSE(spender_of(g, tid("B"), 0).has_value());
  EXPECT_THROW(spender_of(g, tid("Z"), 0), AnalysisError);
  EXPECT_THROW(spender_of(g, tid("A"), 1), AnalysisError);
}

TEST(TxGraph, MalformedLinesCarryLineNumbers) {
  const auto good = to_ndjson(coinbase_split_transactions());
  try {
    ingest(good + "{\"txid\": 1}\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ingest("not json\n"), DataError);
  auto line = transaction_to_json(coinbase_split_transactions()[0]);
  line.insert(line.size() - 1, ",\"extra\":1");
  EXPECT_THROW(ingest(line + "\n"), DataError);
}

TEST(TxGraph, TxIdValidation) {
  EXPECT_THROW(TxId("abc"), DataError);
  EXPECT_THROW(TxId(std::string(64, 'G')), DataError);
  EXPECT_NO_THROW(TxId(std::string(64, 'a')));
  EXPECT_EQ(TxId(std::string(64, 'e')).abbrev(), "eeeeee");
}

TEST(TxGraph, AddressSeenBefore) {
  const auto g = TransactionGraph::build(peel_chain_transactions());
  EXPECT_TRUE(g.address_seen_before(addr("1", "Bob"), 3));
  EXPECT_FALSE(g.address_seen_before(addr("1", "Bob"), 1));
  EXPECT_FALSE(g.address_seen_before(addr("3", "Change1"), 3));
  EXPECT_TRUE(g.address_seen_before(addr("3", "Change1"), 4));
}

TEST(TxGraph, BlockTimesUseLowerMedian) {
  auto a = make_tx("a", 1, {}, {{addr("1", "a"), 1}});
  auto b = make_tx("b", 1, {}, {{addr("1", "b"), 1}});
  a.timestamp = 100;
  b.timestamp = 200;
  const auto g = TransactionGraph::build({a, b});
  EXPECT_EQ(g.block_times().at(1), 100);
}

class SimulatedGraph : public ::testing::Test {
 protected:
  static Simulation sim() {
    SimConfig cfg;
    cfg.rng_seed = 11;
    cfg.chip_mixes = 10;
    cfg.coinjoin_rounds = 5;
    cfg.peeling_chains = 5;
    cfg.background_txs = 60;
    return simulate(cfg);
  }
};

TEST_F(SimulatedGraph, RoundTripIsRecordEqual) {
  const auto s = sim();
  const auto g = TransactionGraph::build(s.transactions);
  std::ostringstream out;
  export_ndjson(g, out);
  const auto again = ingest(out.str());
  ASSERT_EQ(again.size(), s.transactions.size());
  for (const auto& tx : s.transactions) {
    const auto& r = again.get(tx.txid);
    EXPECT_EQ(r.inputs, tx.inputs);
    EXPECT_EQ(r.outputs, tx.outputs);
    EXPECT_EQ(r.block_height, tx.block_height);
    EXPECT_EQ(r.timestamp, tx.timestamp);
  }
}

TEST_F(SimulatedGraph, BuildIsOrderIndependent) {
  const auto s = sim();
  auto shuffled = s.transactions;
  std::mt19937 gen(5);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto a = TransactionGraph::build(s.transactions);
  const auto b = TransactionGraph::build(shuffled);
  std::ostringstream oa, ob;
  export_ndjson(a, oa);
  export_ndjson(b, ob);
  EXPECT_EQ(oa.str(), ob.str());
  for (TxIndex i = 0; i < a.size(); ++i)
    for (std::uint32_t v = 0; v < a.tx(i).outputs.size(); ++v)
      EXPECT_EQ(a.spender(i, v), b.spender(i, v));
}

TEST_F(SimulatedGraph, FeesNonNegativeAndSpendersUnique) {
  const auto s = sim();
  const auto g = TransactionGraph::build(s.transactions);
  std::map<std::pair<TxId, std::uint32_t>, int> refs;
  for (const auto& tx : g.transactions()) {
    if (!tx.is_coinbase()) {
      EXPECT_GE(fee_of(tx, g), 0);
    }
    for (const auto& i : tx.inputs) ++refs[{i.prev_txid, i.prev_vout}];
  }
  for (TxIndex i = 0; i < g.size(); ++i) {
    const auto& tx = g.tx(i);
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
      const auto sp = spender_of(g, tx.txid, v);
      const auto key = std::pair{tx.txid, v};
      if (!sp) {
        EXPECT_EQ(refs.count(key), 0u);
        continue;
      }
      EXPECT_EQ(refs[key], 1);
      const auto& spending = g.get(*sp);
      EXPECT_TRUE(std::any_of(spending.inputs.begin(), spending.inputs.end(),
                              [&](const TxInput& in) { return in.outpoint() == OutPoint{tx.txid, v}; }));
    }
  }
}
