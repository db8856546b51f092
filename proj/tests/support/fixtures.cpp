#include "fixtures.hpp"

namespace mixscope::testing {

TxId tid(std::string_view name) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned char c : name) {
    hex += kHex[c >> 4];
    hex += kHex[c & 0xf];
  }
  hex.resize(64, '0');
  return TxId(hex);
}

Amount btc(std::string_view text) { return parse_btc(text); }

TxInput in(std::string_view name, std::uint32_t vout) { return {tid(name), vout}; }

Transaction make_tx(std::string_view name, std::uint64_t height, std::vector<TxInput> inputs,
                    std::vector<OutSpec> outputs) {
  Transaction tx;
  tx.txid = tid(name);
  tx.block_height = height;
  tx.timestamp = 1'575'158'400 + static_cast<std::int64_t>(height) * 600;
  tx.inputs = std::move(inputs);
  for (auto& o : outputs) tx.outputs.push_back({Address(o.address), o.value});
  return tx;
}

std::string addr(std::string_view prefix, std::string_view tag) {
  std::string a(prefix);
  a += tag;
  if (a.size() < 34) a.resize(34, 'x');
  return a;
}

std::vector<Transaction> coinbase_split_transactions() {
  return {make_tx("A", 1, {}, {{addr("1", "addr1"), btc("10")}}),
          make_tx("B", 2, {in("A", 0)}, {{addr("1", "addr2"), btc("7")}, {addr("1", "addr3"), btc("3")}})};
}

std::vector<Transaction> peel_chain_transactions() {
  std::vector<Transaction> txs{
      make_tx("alice-funds", 1, {}, {{addr("1", "AliceFunds"), btc("3.5")}}),
      make_tx("bob-seen", 1, {}, {{addr("1", "Bob"), btc("0.01")}}),
      make_tx("charlie-seen", 1, {}, {{addr("1", "Charlie"), btc("0.01")}}),
      make_tx("D", 2, {in("alice-funds", 0)},
              {{addr("3", "Hp1Fk"), btc("3")}, {addr("1", "AliceChange"), btc("0.5")}}),
      make_tx("tx1", 3, {in("D", 0)}, {{addr("1", "Bob"), btc("2")}, {addr("3", "Change1"), btc("1")}}),
      make_tx("tx2", 4, {in("tx1", 1)},
              {{addr("1", "Charlie"), btc("0.5")}, {addr("3", "Change2"), btc("0.5")}}),
  };
  std::vector<TxInput> collector_inputs{in("tx2", 1)};
  Amount total = btc("0.5");
  for (int i = 0; i < 5; ++i) {
    const auto name = "pad" + std::to_string(i);
    txs.push_back(make_tx(name, 1, {}, {{addr("3", name), btc("0.2")}}));
    collector_inputs.push_back(in(name, 0));
    total += btc("0.2");
  }
  txs.push_back(make_tx("collector", 5, collector_inputs, {{addr("3", "Collector"), total}}));
  return txs;
}

}  // namespace mixscope::testing
