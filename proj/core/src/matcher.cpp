#include "mixscope/matcher.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "mixscope/error.hpp"

namespace mixscope {

void MatcherConfig::validate() const {
  if (window_blocks < 1 || window_blocks % 2 == 0)
    throw std::invalid_argument("window_blocks must be an odd integer >= 1");
  if (value_tolerance < 0) throw std::invalid_argument("value_tolerance must be >= 0");
}

std::string_view to_string(MatchStatus s) noexcept {
  switch (s) {
    case MatchStatus::Validated: return "Validated";
    case MatchStatus::Unvalidated: return "Unvalidated";
    case MatchStatus::Rejected: break;
  }
  return "Rejected";
}

AddressValidator unknown_validator() {
  return [](std::string_view) { return Validation::Unknown; };
}

namespace {

class BlockClock {
 public:
  explicit BlockClock(const TransactionGraph& graph) {
    for (const auto& [height, time] : graph.block_times()) by_time_.emplace_back(time, height);
    std::sort(by_time_.begin(), by_time_.end());
  }

  std::uint64_t closest_height(std::int64_t ts) const {
    const auto after = std::lower_bound(by_time_.begin(), by_time_.end(),
                                        std::pair<std::int64_t, std::uint64_t>{ts, 0});
    std::optional<std::pair<std::int64_t, std::uint64_t>> best;  // (diff, height)
    auto consider = [&](std::int64_t diff, std::uint64_t height) {
      if (!best || std::pair{diff, height} < *best) best = std::pair{diff, height};
    };
    if (after != by_time_.end()) consider(after->first - ts, after->second);
    if (after != by_time_.begin()) {
      const auto before_time = std::prev(after)->first;
      const auto run = std::lower_bound(by_time_.begin(), after,
                                        std::pair<std::int64_t, std::uint64_t>{before_time, 0});
      consider(ts - before_time, run->second);
    }
    return best->second;
  }

 private:
  std::vector<std::pair<std::int64_t, std::uint64_t>> by_time_;
};

struct Candidate {
  Amount value_diff;
  std::int64_t time_diff;
  TxIndex tx;
  std::uint32_t vout;
  const TxId* txid;

  bool operator<(const Candidate& o) const {
    return std::tie(value_diff, time_diff, *txid) < std::tie(o.value_diff, o.time_diff, *o.txid);
  }
};

Amount abs_diff(Amount a, Amount b) { return a > b ? a - b : b - a; }

MatchResult match_one(const TransactionGraph& graph, const BlockClock& clock,
                      const ConvertRecord& record, std::size_t index, const MatcherConfig& cfg,
                      const AddressValidator& validator) {
  const auto center = clock.closest_height(record.timestamp);
  std::uint64_t before = (cfg.window_blocks - 1) / 2;
  std::uint64_t after = before;
  if (cfg.legacy_deltas) std::tie(after, before) = *cfg.legacy_deltas;
  const auto lo = center >= before ? center - before : 0;
  const auto hi = center + after;

  std::vector<Candidate> candidates;
  for (auto h = lo; h <= hi; ++h) {
    for (const auto t : graph.txs_at_height(h)) {
      const auto& tx = graph.tx(t);
      std::optional<Candidate> best;
      for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
        const auto diff = abs_diff(tx.outputs[v].value, record.value);
        if (diff > cfg.value_tolerance) continue;
        if (!best || diff < best->value_diff)
          best = Candidate{diff, std::abs(tx.timestamp - record.timestamp), t, v, &tx.txid};
      }
      if (best) candidates.push_back(*best);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  MatchResult result;
  result.record_index = index;
  result.candidate_count = candidates.size();
  const Candidate* undecided = nullptr;
  for (const auto& c : candidates) {
    const auto verdict = validator(graph.tx(c.tx).outputs[c.vout].address.text);
    if (verdict == Validation::Service) {
      result.txid = *c.txid;
      result.status = MatchStatus::Validated;
      return result;
    }
    if (verdict == Validation::Unknown && !undecided) undecided = &c;
  }
  if (undecided) {
    result.txid = *undecided->txid;
    result.status = MatchStatus::Unvalidated;
  }
  return result;
}

std::vector<MatchResult> match_indexed(const TransactionGraph& graph,
                                       std::span<const ConvertRecord> records,
                                       std::span<const std::size_t> indices,
                                       const MatcherConfig& cfg,
                                       const AddressValidator& validator) {
  cfg.validate();
  if (indices.empty()) throw AnalysisError("no convert records to match");
  if (graph.block_times().empty()) throw AnalysisError("graph has no block index");
  const BlockClock clock(graph);
  std::vector<MatchResult> results;
  results.reserve(indices.size());
  for (auto i : indices) results.push_back(match_one(graph, clock, records[i], i, cfg, validator));
  return results;
}

}  // namespace

std::vector<MatchResult> match_records(const TransactionGraph& graph,
                                       std::span<const ConvertRecord> records,
                                       const MatcherConfig& cfg,
                                       const AddressValidator& validator) {
  std::vector<std::size_t> all(records.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return match_indexed(graph, records, all, cfg, validator);
}

std::vector<MatchResult> reverse_match(const TransactionGraph& graph,
                                       std::span<const ConvertRecord> records,
                                       std::string_view target_currency, const MatcherConfig& cfg,
                                       const AddressValidator& validator) {
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].cur_out == target_currency) selected.push_back(i);
  return match_indexed(graph, records, selected, cfg, validator);
}

ConvertRecord parse_record(std::string_view line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("convert record must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (key != "curIn" && key != "curOut" && key != "time" && key != "value_sat")
      throw DataError("unknown key '" + key + "' in convert record");

  auto text = [&](const char* key) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty())
      throw DataError(std::string("convert record needs a non-empty string '") + key + "'");
    return obj[key].get<std::string>();
  };
  auto number = [&](const char* key) {
    if (!obj.contains(key) || !obj[key].is_number_unsigned())
      throw DataError(std::string("convert record needs a non-negative integer '") + key + "'");
    const auto v = obj[key].get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw DataError(std::string("convert record '") + key + "' out of range");
    return static_cast<std::int64_t>(v);
  };

  ConvertRecord r{text("curIn"), text("curOut"), number("time"), number("value_sat")};
  if (r.value <= 0) throw DataError("convert record value must be positive");
  return r;
}

std::string record_to_json(const ConvertRecord& record) {
  nlohmann::ordered_json obj;
  obj["curIn"] = record.cur_in;
  obj["curOut"] = record.cur_out;
  obj["time"] = static_cast<std::uint64_t>(record.timestamp);
  obj["value_sat"] = static_cast<std::uint64_t>(record.value);
  return obj.dump();
}

std::vector<ConvertRecord> read_records(std::istream& in) {
  std::vector<ConvertRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      records.push_back(parse_record(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::string match_result_to_json(const MatchResult& result) {
  nlohmann::ordered_json obj;
  obj["record"] = result.record_index;
  obj["txid"] = result.txid ? nlohmann::ordered_json(result.txid->str()) : nlohmann::ordered_json(nullptr);
  obj["candidates"] = result.candidate_count;
  obj["status"] = std::string(to_string(result.status));
  return obj.dump();
}

}  // namespace mixscope
