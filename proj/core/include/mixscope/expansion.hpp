#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mixscope/heuristics.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

/// One admission in the expansion walk: `discovered` entered the queue because
/// `via_output` (an output of a member) is spent by a transaction that also
/// spends `via_input` (an output of `discovered`).
struct FrontierEntry {
  TxId discovered;
  OutPoint via_output;
  OutPoint via_input;

  friend bool operator==(const FrontierEntry&, const FrontierEntry&) = default;
};

struct ExpansionStats {
  std::size_t seeds = 0;
  std::size_t dequeued = 0;
  std::size_t candidates_examined = 0;  // T_I lookups
  std::size_t rejected = 0;             // candidates without anonymity sets
  std::size_t unspent_skipped = 0;      // member outputs with no spender

  friend bool operator==(const ExpansionStats&, const ExpansionStats&) = default;
};

struct ExpansionResult {
  std::vector<TxId> members;  // graph order: (block_height, txid)
  std::vector<FrontierEntry> frontier_log;
  ExpansionStats stats;

  bool contains(const TxId& id) const;
};

/// Seed expansion over the co-spend relation.
///
/// Breadth-first from the seeds. For every output of a member, the spending
/// transaction's inputs name candidate transactions; a candidate joins when it
/// generates anonymity sets and is neither a member nor already queued. Each
/// BFS layer is processed in (block_height, txid) order, so the result is
/// independent of ingestion order. Unspent outputs are skipped.
///
/// Throws AnalysisError naming the first seed that is unknown or lacks an
/// anonymity set, or when `seeds` is empty.
ExpansionResult seed_expand(const TransactionGraph& graph, std::span<const TxId> seeds,
                            const HeuristicsConfig& cfg);

struct ColorTraceResult {
  std::set<std::string> colored_addresses;
  /// Addresses colored as co-spent siblings and later un-colored because
  /// their funding transaction produced no anonymity set.
  std::set<std::string> uncolored_addresses;
  /// Anonymity-set transactions whose members were colored, graph order.
  std::vector<TxId> mixing_txs;
};

/// Address-level coloring from seed inputs (outpoints paid into the service).
///
/// The spender of each seed input that generates anonymity sets has its set
/// members colored. Every other input co-spent with an output of a colored
/// transaction is colored as a sibling, then walked back to its funding
/// transaction: a funder with anonymity sets is colored in turn, otherwise
/// the sibling loses its color. Seed inputs that are unspent, or whose spender
/// has no anonymity set, contribute nothing. Throws AnalysisError for unknown
/// outpoints.
ColorTraceResult color_trace(const TransactionGraph& graph, std::span<const OutPoint> seed_inputs,
                             const HeuristicsConfig& cfg);

}  // namespace mixscope
