#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mixscope/address.hpp"
#include "mixscope/amount.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

struct HeuristicsConfig {
  std::size_t min_set_size = 2;
  std::size_t min_set_count = 1;
  /// Share of context transactions that must look like linked peel nodes.
  double chain_majority_fraction = 0.6;
  /// When set, only these output values may form anonymity sets.
  std::optional<std::set<Amount>> denomination_whitelist;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// A maximal group of >= min_set_size equal-valued outputs of one transaction.
struct AnonymitySet {
  TxId txid;
  Amount value = 0;
  std::vector<std::uint32_t> member_vouts;  // ascending

  friend bool operator==(const AnonymitySet&, const AnonymitySet&) = default;
};

/// Sets sorted by value ascending.
std::vector<AnonymitySet> detect_anonymity_sets(const Transaction& tx,
                                                const HeuristicsConfig& cfg);

bool generates_anonymity_sets(const Transaction& tx, const HeuristicsConfig& cfg);

/// Address-type split only: for a two-output transaction whose outputs differ
/// in kind, the output matching the strict-majority kind of the inputs.
std::optional<std::uint32_t> address_type_change(const Transaction& tx,
                                                 const TransactionGraph& graph);

/// Change output of a two-output transaction. Address-type split first, then
/// the fresh-address rule (exactly one output address unseen below the
/// transaction's height). Throws AnalysisError unless tx has two outputs.
std::optional<std::uint32_t> change_output_candidate(const Transaction& tx,
                                                     const TransactionGraph& graph);

enum class Mechanism { Swapping, Obfuscating, Unknown };

std::string_view to_string(Mechanism m) noexcept;

struct Evidence {
  TxId txid;
  std::string reason;  // "anonymity-set" or "change-chain"

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct MechanismVerdict {
  Mechanism verdict = Mechanism::Unknown;
  std::vector<Evidence> evidence;
  std::size_t context_size = 0;
  std::size_t chain_linked = 0;
};

/// Examines the context of the samples (transactions spending their outputs
/// and transactions their inputs reference). Any anonymity set among samples
/// or context is conclusive for Obfuscating; otherwise Swapping needs a
/// chain_majority_fraction share of context transactions that have two
/// outputs and link to a neighbour through their change output.
/// Throws AnalysisError for an empty sample list or unknown txids.
MechanismVerdict classify_mechanism(std::span<const TxId> samples, const TransactionGraph& graph,
                                    const HeuristicsConfig& cfg);

}  // namespace mixscope
