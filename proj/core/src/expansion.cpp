#include "mixscope/expansion.hpp"

#include <algorithm>
#include <cstdint>

#include "mixscope/error.hpp"

namespace mixscope {

bool ExpansionResult::contains(const TxId& id) const {
  return std::find(members.begin(), members.end(), id) != members.end();
}

namespace {

// Memoized anonymity-set check; a single expansion run asks about the same
// transaction many times.
class SetOracle {
 public:
  SetOracle(const TransactionGraph& graph, const HeuristicsConfig& cfg)
      : graph_(graph), cfg_(cfg), memo_(graph.size(), kUnknown) {}

  bool operator()(TxIndex idx) {
    auto& slot = memo_[idx];
    if (slot == kUnknown) slot = generates_anonymity_sets(graph_.tx(idx), cfg_) ? kYes : kNo;
    return slot == kYes;
  }

 private:
  static constexpr std::int8_t kUnknown = -1, kNo = 0, kYes = 1;
  const TransactionGraph& graph_;
  const HeuristicsConfig& cfg_;
  std::vector<std::int8_t> memo_;
};

}  // namespace

ExpansionResult seed_expand(const TransactionGraph& graph, std::span<const TxId> seeds,
                            const HeuristicsConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) throw AnalysisError("seed set is empty");

  enum : std::uint8_t { kFresh = 0, kQueued = 1, kMember = 2 };
  std::vector<std::uint8_t> state(graph.size(), kFresh);
  SetOracle has_sets(graph, cfg);

  ExpansionResult result;
  std::vector<TxIndex> layer;
  for (const auto& seed : seeds) {
    const auto idx = graph.find(seed);
    if (!idx) throw AnalysisError("seed " + seed.str() + " is not in the graph");
    if (!has_sets(*idx))
      throw AnalysisError("seed " + seed.str() + " does not generate anonymity sets");
    if (state[*idx] == kFresh) {
      state[*idx] = kQueued;
      layer.push_back(*idx);
    }
  }
  result.stats.seeds = layer.size();

  std::vector<TxIndex> member_idx;
  while (!layer.empty()) {
    std::sort(layer.begin(), layer.end());
    std::vector<TxIndex> next;
    for (const auto t : layer) {
      state[t] = kMember;
      member_idx.push_back(t);
      ++result.stats.dequeued;

      const auto& tx = graph.tx(t);
      for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
        const auto spender = graph.spender(t, v);
        if (!spender) {
          ++result.stats.unspent_skipped;
          continue;
        }
        const auto& spending = graph.tx(*spender);
        for (std::size_t i = 0; i < spending.inputs.size(); ++i) {
          const auto candidate = graph.source(*spender, i);
          ++result.stats.candidates_examined;
          if (state[candidate] != kFresh) continue;
          if (!has_sets(candidate)) {
            ++result.stats.rejected;
            continue;
          }
          state[candidate] = kQueued;
          next.push_back(candidate);
          result.frontier_log.push_back(
              {graph.tx(candidate).txid, OutPoint{tx.txid, v}, spending.inputs[i].outpoint()});
        }
      }
    }
    layer = std::move(next);
  }

  std::sort(member_idx.begin(), member_idx.end());
  result.members.reserve(member_idx.size());
  for (auto i : member_idx) result.members.push_back(graph.tx(i).txid);
  return result;
}

ColorTraceResult color_trace(const TransactionGraph& graph, std::span<const OutPoint> seed_inputs,
                             const HeuristicsConfig& cfg) {
  cfg.validate();
  SetOracle has_sets(graph, cfg);
  std::vector<bool> colored_tx(graph.size(), false);
  std::vector<TxIndex> work;

  for (const auto& seed : seed_inputs) {
    const auto idx = graph.index_of(seed.txid);
    if (seed.vout >= graph.tx(idx).outputs.size())
      throw AnalysisError("unknown outpoint " + seed.txid.str() + ":" + std::to_string(seed.vout));
    const auto spender = graph.spender(idx, seed.vout);
    if (spender && !colored_tx[*spender] && has_sets(*spender)) {
      colored_tx[*spender] = true;
      work.push_back(*spender);
    }
  }

  ColorTraceResult result;
  std::set<std::string> dropped;
  while (!work.empty()) {
    const auto m = work.back();
    work.pop_back();
    const auto& mix = graph.tx(m);

    // Step I: the anonymity-set members themselves.
    for (const auto& set : detect_anonymity_sets(mix, cfg))
      for (auto v : set.member_vouts) result.colored_addresses.insert(mix.outputs[v].address.text);

    // Step II: inputs co-spent with any output of this transaction.
    for (std::uint32_t v = 0; v < mix.outputs.size(); ++v) {
      const auto spender = graph.spender(m, v);
      if (!spender) continue;
      const auto& spending = graph.tx(*spender);
      for (std::size_t i = 0; i < spending.inputs.size(); ++i) {
        const auto funder = graph.source(*spender, i);
        if (funder == m) continue;
        const auto& sibling = graph.spent_output(*spender, i).address.text;
        if (colored_tx[funder]) {
          result.colored_addresses.insert(sibling);
        } else if (has_sets(funder)) {
          colored_tx[funder] = true;
          work.push_back(funder);
          result.colored_addresses.insert(sibling);
        } else {
          dropped.insert(sibling);
        }
      }
    }
  }

  for (const auto& addr : dropped)
    if (!result.colored_addresses.contains(addr)) result.uncolored_addresses.insert(addr);
  for (TxIndex i = 0; i < graph.size(); ++i)
    if (colored_tx[i]) result.mixing_txs.push_back(graph.tx(i).txid);
  return result;
}

}  // namespace mixscope
