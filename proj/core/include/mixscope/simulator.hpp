#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mixscope/amount.hpp"
#include "mixscope/matcher.hpp"
#include "mixscope/peeling.hpp"
#include "mixscope/rng.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

/// Synthetic mixing activity. Every default is synthetic; nothing here is a
/// measured property of a real service.
struct SimConfig {
  std::uint64_t rng_seed = 1;

  // Scenario mix.
  std::size_t chip_mixes = 0;
  std::size_t coinjoin_rounds = 0;
  std::size_t peeling_chains = 0;
  std::size_t background_txs = 0;
  std::size_t converter_deposits = 0;
  std::size_t converter_payouts = 0;

  // Chip mixer. Deposits are credited in chip_unit steps; the remainder is
  // the pay-what-you-want fee. Leftover mix change funds the next mix.
  Amount chip_unit = 100'000;
  std::vector<Amount> chip_denominations = default_chip_denominations();
  std::pair<std::size_t, std::size_t> deposits_per_mix{2, 6};
  std::size_t max_chips_per_mix = 40;
  /// Each mix co-spends one chip with a chip of an earlier mix in a user
  /// withdrawal, linking every mix into one expansion component.
  bool connected_mixes = true;
  /// Share of mixes whose outputs are never co-spent with another mix.
  double isolated_fraction = 0.0;
  double unspent_chip_fraction = 0.2;
  double donation_fraction = 0.05;
  /// Exact deposit values for the first mixes, replacing the random draw.
  std::vector<std::vector<Amount>> scripted_deposits;

  // Hack: a root transaction fanned through two layers into hack_targets
  // distinct chip mixes as deposits.
  std::size_t hack_targets = 0;
  Amount hack_amount = 10'000'000'000;

  // CoinJoin rounds.
  std::vector<Amount> coinjoin_denominations{10'000'000, 20'000'000};
  std::pair<std::size_t, std::size_t> coinjoin_participants{4, 10};
  /// Flat coordinator fee per round, shared by the participants.
  Amount coordinator_fee = 300'000;
  /// Fraction of rounds paid to the first coordinator address.
  double coordinator_switch = 0.5;
  double remix_fraction = 0.3;

  // Peeling chains.
  std::pair<std::size_t, std::size_t> chain_length{5, 20};
  /// Service addresses are P2SH and user addresses never are.
  bool address_type_disjoint = true;
  /// Chance a payout goes to an address seen in an earlier block.
  double payout_reuse = 0.9;
  /// Chance a payout is later spent by a one-input two-output payment.
  double payout_spend_fraction = 0.3;
  double unspent_end_fraction = 0.1;
  std::size_t collector_min_inputs = 6;

  // Time model.
  std::int64_t start_time = 1'575'158'400;  // 2019-12-01T00:00:00Z
  double mean_block_interval = 600.0;
  std::size_t txs_per_block = 10;
  std::int64_t record_jitter = 0;

  Amount network_fee = 1'000;

  /// Throws std::invalid_argument for infeasible settings.
  void validate() const;

  static std::vector<Amount> default_chip_denominations();
};

enum class Label { ChipMix, CoinJoin, PeelNode, PeelStart, PeelEnd, Deposit, Payout, Background };

std::string_view to_string(Label label) noexcept;
Label label_from_string(std::string_view text);

/// A convert record as it really happened, and the output it pays.
struct RecordTruth {
  ConvertRecord record;
  TxId txid;
  std::uint32_t vout = 0;
};

struct GroundTruth {
  std::map<TxId, Label> labels;
  /// Injected service fees: PWYW remainders per chip deposit and coordinator
  /// fees per CoinJoin round.
  std::map<TxId, Amount> fees;
  std::vector<PeelingChain> chains;
  std::vector<RecordTruth> records;
  /// Chip mixes the isolated_fraction knob cut off from the others.
  std::vector<TxId> isolated_mixes;
  /// Coordinator fee addresses, first epoch first.
  std::vector<std::string> coordinator_addresses;
  std::optional<TxId> hack_root;
  /// Mixing transaction to the hacked value it consumes.
  std::map<TxId, Amount> hack_hits;

  std::vector<TxId> with_label(Label label) const;
};

struct Simulation {
  std::vector<Transaction> transactions;  // graph order
  GroundTruth truth;
};

/// Deterministic: identical configs give byte-identical output.
Simulation simulate(const SimConfig& cfg);

void write_ndjson(const Simulation& sim, std::ostream& out);

/// One record per Deposit/Payout truth entry, timestamps jittered uniformly
/// within +-jitter seconds, values exact.
std::vector<ConvertRecord> emit_convert_records(const GroundTruth& truth, std::int64_t jitter,
                                                Rng& rng);

}  // namespace mixscope
