#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixscope/amount.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

struct TaintConfig {
  std::uint32_t max_depth = 50;
  Amount min_output = 90'000'000;  // 0.9 BTC

  void validate() const;
};

struct TaintHit {
  TxId txid;
  Amount value = 0;  // tainted qualifying outputs this mixing tx consumes
  std::uint32_t depth = 0;

  friend bool operator==(const TaintHit&, const TaintHit&) = default;
};

/// An output edge the trace followed.
struct TaintEdge {
  TxId from;
  std::uint32_t vout = 0;
  TxId to;
  Amount value = 0;

  friend bool operator==(const TaintEdge&, const TaintEdge&) = default;
};

struct TaintReport {
  TxId root;
  TaintConfig config;
  std::vector<TaintHit> hits;  // graph order
  Amount total_value = 0;
  std::size_t explored = 0;  // distinct transactions reached, root included
  std::vector<TaintEdge> edges;
};

/// Breadth-first forward trace from the root's outputs. An output is followed
/// only when its value reaches min_output and its transaction sits above
/// max_depth. A spender inside `mixing_set` is a hit and is not expanded; its
/// value sums every qualifying tainted output it consumes. Every transaction
/// is expanded once, at its minimal depth. The root itself is never a hit.
/// Throws AnalysisError for an unknown root or mixing-set txid.
TaintReport trace_taint(const TransactionGraph& graph, const TxId& root,
                        std::span<const TxId> mixing_set, const TaintConfig& cfg);

struct ProfitReport {
  std::map<std::string, Amount> monthly;  // "YYYY-MM" (UTC) -> satoshis
  Amount total = 0;
  Amount monthly_average = 0;  // total / bucket count, floored

  friend bool operator==(const ProfitReport&, const ProfitReport&) = default;
};

/// Pay-what-you-want fee estimate. Every output paid into a mixer transaction
/// from outside the mixer set is a deposit; its fee is value mod chip_unit,
/// so deposits below one unit are counted whole. Buckets follow the deposit
/// transaction's month and span every month from the first to the last
/// deposit. Throws AnalysisError for an empty mixer set.
ProfitReport estimate_pwyw_fees(const TransactionGraph& graph, std::span<const TxId> mixer_txs,
                                Amount chip_unit = 100'000);

/// Sums outputs of `tx_set` paid to `fee_addresses`, bucketed by month over
/// the months the transactions span.
ProfitReport estimate_address_fees(const TransactionGraph& graph,
                                   std::span<const std::string> fee_addresses,
                                   std::span<const TxId> tx_set);

/// Output addresses that occur in at least `min_occurrence_fraction` of the
/// transactions (counted once per transaction), by count descending then
/// address ascending.
std::vector<std::pair<std::string, std::size_t>> common_output_addresses(
    const TransactionGraph& graph, std::span<const TxId> tx_set, double min_occurrence_fraction);

}  // namespace mixscope
