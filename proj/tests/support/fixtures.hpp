#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixscope/amount.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope::testing {

/// Readable deterministic txid: the name's bytes in hex, zero padded.
TxId tid(std::string_view name);

Amount btc(std::string_view text);

TxInput in(std::string_view name, std::uint32_t vout);

struct OutSpec {
  std::string address;
  Amount value;
};

Transaction make_tx(std::string_view name, std::uint64_t height, std::vector<TxInput> inputs,
                    std::vector<OutSpec> outputs);

/// Address with the given prefix, padded to a plausible length.
std::string addr(std::string_view prefix, std::string_view tag);

/// A: coinbase 10 BTC to addr1. B: spends A:0 paying 7 BTC and 3 BTC.
std::vector<Transaction> coinbase_split_transactions();

/// Alice funds deposit tx D (3 BTC to 3Hp1Fk plus her change); tx1 pays Bob
/// 2 BTC, tx2 pays Charlie 0.5 BTC, and a six-input collector takes the rest.
std::vector<Transaction> peel_chain_transactions();

}  // namespace mixscope::testing
