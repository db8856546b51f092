#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "mixscope/error.hpp"
#include "mixscope/taint.hpp"

namespace mixscope {

namespace {

// Buckets for every month between the first and last observed month.
ProfitReport bucketize(const std::vector<std::pair<std::int64_t, Amount>>& contributions) {
  ProfitReport report;
  if (contributions.empty()) return report;

  auto [lo, hi] = std::minmax_element(contributions.begin(), contributions.end());
  auto parse = [](const std::string& key) {
    return std::pair{std::stoi(key.substr(0, 4)), std::stoi(key.substr(5, 2))};
  };
  auto [y, m] = parse(month_key(lo->first));
  const auto [y_end, m_end] = parse(month_key(hi->first));
  while (y < y_end || (y == y_end && m <= m_end)) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", y, m);
    report.monthly[buf] = 0;
    if (++m > 12) m = 1, ++y;
  }
  for (const auto& [time, value] : contributions) {
    report.monthly[month_key(time)] += value;
    report.total += value;
  }
  report.monthly_average = report.total / static_cast<Amount>(report.monthly.size());
  return report;
}

}  // namespace

ProfitReport estimate_pwyw_fees(const TransactionGraph& graph, std::span<const TxId> mixer_txs,
                                Amount chip_unit) {
  if (mixer_txs.empty()) throw AnalysisError("mixer transaction set is empty");
  if (chip_unit <= 0) throw std::invalid_argument("chip_unit must be positive");

  std::vector<bool> in_mixer(graph.size(), false);
  std::vector<TxIndex> mixers;
  for (const auto& id : mixer_txs) {
    const auto idx = graph.index_of(id);
    if (!in_mixer[idx]) mixers.push_back(idx);
    in_mixer[idx] = true;
  }
  std::sort(mixers.begin(), mixers.end());

  std::vector<std::pair<std::int64_t, Amount>> fees;
  for (const auto m : mixers) {
    const auto& mix = graph.tx(m);
    for (std::size_t i = 0; i < mix.inputs.size(); ++i) {
      const auto funder = graph.source(m, i);
      if (in_mixer[funder]) continue;
      const auto value = graph.spent_output(m, i).value;
      fees.emplace_back(graph.tx(funder).timestamp, value % chip_unit);
    }
  }
  return bucketize(fees);
}

ProfitReport estimate_address_fees(const TransactionGraph& graph,
                                   std::span<const std::string> fee_addresses,
                                   std::span<const TxId> tx_set) {
  std::vector<TxIndex> txs;
  for (const auto& id : tx_set) txs.push_back(graph.index_of(id));
  std::sort(txs.begin(), txs.end());
  txs.erase(std::unique(txs.begin(), txs.end()), txs.end());

  std::vector<std::pair<std::int64_t, Amount>> paid;
  for (const auto t : txs) {
    const auto& tx = graph.tx(t);
    Amount sum = 0;
    for (const auto& out : tx.outputs)
      if (std::find(fee_addresses.begin(), fee_addresses.end(), out.address.text) !=
          fee_addresses.end())
        sum += out.value;
    paid.emplace_back(tx.timestamp, sum);
  }
  return bucketize(paid);
}

std::vector<std::pair<std::string, std::size_t>> common_output_addresses(
    const TransactionGraph& graph, std::span<const TxId> tx_set, double min_occurrence_fraction) {
  std::vector<TxIndex> txs;
  for (const auto& id : tx_set) txs.push_back(graph.index_of(id));
  std::sort(txs.begin(), txs.end());
  txs.erase(std::unique(txs.begin(), txs.end()), txs.end());
  if (txs.empty()) return {};

  std::map<std::string, std::size_t> counts;
  for (const auto t : txs) {
    std::vector<std::string_view> seen;
    for (const auto& out : graph.tx(t).outputs) seen.push_back(out.address.text);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto a : seen) ++counts[std::string(a)];
  }

  const double needed = min_occurrence_fraction * static_cast<double>(txs.size());
  std::vector<std::pair<std::string, std::size_t>> common;
  for (auto& [addr, count] : counts)
    if (static_cast<double>(count) >= needed) common.emplace_back(addr, count);
  std::stable_sort(common.begin(), common.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return common;
}

}  // namespace mixscope
