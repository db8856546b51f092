#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixscope/amount.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

/// <curIn, curOut, timestamp, value> convert record.
struct ConvertRecord {
  std::string cur_in;
  std::string cur_out;
  std::int64_t timestamp = 0;
  Amount value = 0;

  friend bool operator==(const ConvertRecord&, const ConvertRecord&) = default;
};

struct MatcherConfig {
  /// Heights examined, centered on the closest-timestamp block. Must be odd.
  std::uint32_t window_blocks = 7;
  Amount value_tolerance = 0;
  /// (blocks after, blocks before) the closest block; overrides window_blocks.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> legacy_deltas;

  void validate() const;
};

enum class Validation { Service, NotService, Unknown };

/// Address check against the service. Must tolerate concurrent calls.
using AddressValidator = std::function<Validation(std::string_view address)>;

enum class MatchStatus { Validated, Unvalidated, Rejected };

std::string_view to_string(MatchStatus s) noexcept;

struct MatchResult {
  std::size_t record_index = 0;
  std::optional<TxId> txid;
  std::size_t candidate_count = 0;
  MatchStatus status = MatchStatus::Rejected;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Per record: take the height whose median timestamp is closest to the
/// record time (lower height on ties), gather the transactions in the window
/// around it that have an output within value_tolerance of the record value,
/// rank them by (value difference, timestamp difference, txid), and accept
/// the first whose receiving address the validator confirms. When no
/// candidate is confirmed the first one the validator could not decide on is
/// reported as Unvalidated; otherwise the record is Rejected.
/// Throws AnalysisError for an empty record list or a graph without blocks.
std::vector<MatchResult> match_records(const TransactionGraph& graph,
                                       std::span<const ConvertRecord> records,
                                       const MatcherConfig& cfg,
                                       const AddressValidator& validator);

/// The same algorithm over the records converting into `target_currency`
/// (service payouts). record_index refers to positions in `records`.
std::vector<MatchResult> reverse_match(const TransactionGraph& graph,
                                       std::span<const ConvertRecord> records,
                                       std::string_view target_currency, const MatcherConfig& cfg,
                                       const AddressValidator& validator);

/// Validator that answers Unknown for everything.
AddressValidator unknown_validator();

ConvertRecord parse_record(std::string_view line);
std::string record_to_json(const ConvertRecord& record);
std::vector<ConvertRecord> read_records(std::istream& in);
std::string match_result_to_json(const MatchResult& result);

}  // namespace mixscope
