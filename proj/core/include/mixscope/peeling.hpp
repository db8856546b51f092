#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mixscope/amount.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

struct PeelingConfig {
  /// Spenders with at least this many inputs are change collectors.
  std::size_t many_inputs_threshold = 5;
  std::size_t max_chain_length = 10'000;
  /// Trailing change below this is flagged as dust. Labeling only.
  Amount dust_floor = 10'000;

  void validate() const;
};

struct ChainNode {
  TxId txid;
  std::uint32_t user_vout = 0;
  /// Empty only for a one-output final node.
  std::optional<std::uint32_t> change_vout;

  friend bool operator==(const ChainNode&, const ChainNode&) = default;
};

/// Why a forward walk stopped.
enum class ChainStop {
  UnspentChange,      // trailing change is still a UTXO
  Collector,          // change consumed by a many-input transaction (ending point)
  MergedSpender,      // change consumed by a 2..threshold-1 input transaction
  NonChainSpender,    // spender is not peel-shaped (fan-out)
  FinalPayout,        // one-output node spent the whole change
  Ambiguous,          // both outputs could continue the chain
  ChangeUndetermined, // neither heuristic nor spender shape identifies change
  NoEntry,            // no output of the start leads into a chain
  MaxLength,
};

std::string_view to_string(ChainStop stop) noexcept;

struct PeelingChain {
  TxId start;
  std::vector<ChainNode> nodes;
  std::optional<TxId> end;
  ChainStop stop = ChainStop::NoEntry;
  /// Last change output is below the dust floor.
  bool trailing_dust = false;
};

/// Walks backward from a transaction inside a chain while the current
/// transaction is a one-input, two-output node whose address-type change is
/// the output the walk arrived through. Returns the first transaction with
/// several inputs (or none), or whose address-type split marks the other
/// output as change, i.e. the user paid the deposit and kept the change.
/// Throws AnalysisError("unbounded chain") past max_chain_length steps.
TxId find_starting_point(const TransactionGraph& graph, const TxId& txid_in_chain,
                         const PeelingConfig& cfg);

/// Follows the chain forward from its starting point. At each two-output node
/// the change is chosen by change_output_candidate, falling back to the only
/// output whose spender is a one-input two-output node or a collector. The
/// walk truncates instead of guessing when the continuation is ambiguous.
PeelingChain extend_chain(const TransactionGraph& graph, const TxId& start,
                          const PeelingConfig& cfg);

/// Chain index to collector for every chain whose trailing change is consumed
/// by a transaction with at least many_inputs_threshold inputs.
std::map<std::size_t, TxId> find_ending_points(const TransactionGraph& graph,
                                               std::span<const PeelingChain> chains,
                                               const PeelingConfig& cfg);

/// Collector to the chain indices it terminates.
std::map<TxId, std::vector<std::size_t>> group_by_collector(
    const std::map<std::size_t, TxId>& ending_points);

}  // namespace mixscope
