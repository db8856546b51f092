#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mixscope/address.hpp"
#include "mixscope/amount.hpp"

namespace mixscope {

/// 64-character lowercase hex transaction hash.
class TxId {
 public:
  TxId() = default;
  /// Throws DataError unless `hex` is exactly 64 lowercase hex characters.
  explicit TxId(std::string_view hex);

  static bool valid(std::string_view hex) noexcept;

  const std::string& str() const noexcept { return hex_; }
  /// First six characters, the usual short form ("e8b406").
  std::string_view abbrev() const noexcept { return std::string_view(hex_).substr(0, 6); }

  auto operator<=>(const TxId&) const = default;

 private:
  std::string hex_;
};

struct TxIdHash {
  std::size_t operator()(const TxId& id) const noexcept;
};

struct OutPoint {
  TxId txid;
  std::uint32_t vout = 0;

  auto operator<=>(const OutPoint&) const = default;
};

struct TxInput {
  TxId prev_txid;
  std::uint32_t prev_vout = 0;

  OutPoint outpoint() const { return {prev_txid, prev_vout}; }
  friend bool operator==(const TxInput&, const TxInput&) = default;
};

struct TxOutput {
  Address address;
  Amount value = 0;

  friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

struct Transaction {
  TxId txid;
  std::uint64_t block_height = 0;
  std::int64_t timestamp = 0;
  std::vector<TxInput> inputs;    // empty: coinbase-style money source
  std::vector<TxOutput> outputs;  // never empty

  bool is_coinbase() const noexcept { return inputs.empty(); }
  Amount output_total() const noexcept;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Dense position of a transaction inside a graph. Graph order is
/// (block_height, txid), so indices are identical for any ingestion order.
using TxIndex = std::uint32_t;

/// Immutable, fully linked UTXO transaction graph.
///
/// Every input resolves to an existing output, every outpoint is spent at
/// most once, and every non-coinbase transaction has fee >= 0. All const
/// member functions are safe for concurrent use.
class TransactionGraph {
 public:
  TransactionGraph() = default;

  /// Validates and links `txs`. Throws DataError listing every dangling
  /// reference, duplicate txid, double spend, or negative fee found.
  static TransactionGraph build(std::vector<Transaction> txs);

  std::size_t size() const noexcept { return txs_.size(); }
  bool empty() const noexcept { return txs_.empty(); }
  std::span<const Transaction> transactions() const noexcept { return txs_; }
  const Transaction& tx(TxIndex i) const { return txs_.at(i); }

  std::optional<TxIndex> find(const TxId& id) const;
  /// Throws AnalysisError for unknown ids.
  TxIndex index_of(const TxId& id) const;
  const Transaction& get(const TxId& id) const { return txs_[index_of(id)]; }

  /// Spending transaction of output `vout` of `tx`, none for a UTXO.
  std::optional<TxIndex> spender(TxIndex tx, std::uint32_t vout) const;
  /// Transaction referenced by input `input` of `tx`.
  TxIndex source(TxIndex tx, std::size_t input) const;
  /// The output consumed by input `input` of `tx`.
  const TxOutput& spent_output(TxIndex tx, std::size_t input) const;

  /// Transactions paying to or spending from `address`, in graph order.
  std::span<const TxIndex> txs_touching(std::string_view address) const;
  std::span<const TxIndex> txs_at_height(std::uint64_t height) const;
  /// Median transaction timestamp per block height (lower median).
  const std::map<std::uint64_t, std::int64_t>& block_times() const noexcept {
    return block_times_;
  }
  /// True when some transaction below `height` pays to `address`.
  bool address_seen_before(std::string_view address, std::uint64_t height) const;

 private:
  static constexpr TxIndex kNone = static_cast<TxIndex>(-1);

  std::vector<Transaction> txs_;
  std::unordered_map<TxId, TxIndex, TxIdHash> by_id_;
  std::vector<std::size_t> out_offset_;
  std::vector<TxIndex> spender_;
  std::vector<std::size_t> in_offset_;
  std::vector<TxIndex> source_;
  std::unordered_map<std::string, std::vector<TxIndex>> by_address_;
  std::map<std::uint64_t, std::vector<TxIndex>> by_height_;
  std::map<std::uint64_t, std::int64_t> block_times_;
  std::unordered_map<std::string, std::uint64_t> first_paid_height_;
};

// NDJSON boundary -----------------------------------------------------------

/// Parses one NDJSON transaction object. Unknown keys are rejected.
Transaction parse_transaction(std::string_view line);
/// Serializes with keys in schema order: txid, block, time, inputs, outputs.
std::string transaction_to_json(const Transaction& tx);

/// Two-pass load: parse every line, then link. Blank lines are skipped.
/// Parse errors carry the 1-based line number.
TransactionGraph ingest_ndjson(std::istream& in);
/// Writes one line per transaction in graph order.
void export_ndjson(const TransactionGraph& graph, std::ostream& out);

// Queries ------------------------------------------------------------------

/// Inputs minus outputs. Throws AnalysisError for coinbase-style transactions.
Amount fee_of(const Transaction& tx, const TransactionGraph& graph);

/// Throws AnalysisError when the outpoint does not exist.
std::optional<TxId> spender_of(const TransactionGraph& graph, const TxId& txid,
                               std::uint32_t vout);

}  // namespace mixscope
