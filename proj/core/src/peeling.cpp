#include "mixscope/peeling.hpp"

#include <stdexcept>

#include "mixscope/error.hpp"
#include "mixscope/heuristics.hpp"

namespace mixscope {

void PeelingConfig::validate() const {
  if (many_inputs_threshold < 2) throw std::invalid_argument("many_inputs_threshold must be >= 2");
  if (max_chain_length < 1) throw std::invalid_argument("max_chain_length must be >= 1");
  if (dust_floor < 0) throw std::invalid_argument("dust_floor must be >= 0");
}

std::string_view to_string(ChainStop stop) noexcept {
  switch (stop) {
    case ChainStop::UnspentChange: return "unspent-change";
    case ChainStop::Collector: return "collector";
    case ChainStop::MergedSpender: return "merged-spender";
    case ChainStop::NonChainSpender: return "non-chain-spender";
    case ChainStop::FinalPayout: return "final-payout";
    case ChainStop::Ambiguous: return "ambiguous";
    case ChainStop::ChangeUndetermined: return "change-undetermined";
    case ChainStop::NoEntry: return "no-entry";
    case ChainStop::MaxLength: return "max-length";
  }
  return "unknown";
}

namespace {

bool peel_shaped(const Transaction& tx) { return tx.inputs.size() == 1 && tx.outputs.size() == 2; }

// The output's spender could carry the chain on: another node or a collector.
bool continues(const TransactionGraph& graph, TxIndex idx, std::uint32_t vout,
               const PeelingConfig& cfg) {
  const auto sp = graph.spender(idx, vout);
  if (!sp) return false;
  const auto& next = graph.tx(*sp);
  return peel_shaped(next) || next.inputs.size() >= cfg.many_inputs_threshold;
}

}  // namespace

TxId find_starting_point(const TransactionGraph& graph, const TxId& txid_in_chain,
                         const PeelingConfig& cfg) {
  cfg.validate();
  auto cur = graph.index_of(txid_in_chain);
  std::optional<std::uint32_t> via;
  for (std::size_t steps = 0;; ++steps) {
    if (steps > cfg.max_chain_length)
      throw AnalysisError("unbounded chain while searching the starting point of " +
                          txid_in_chain.str());
    const auto& tx = graph.tx(cur);
    if (tx.inputs.size() != 1) return tx.txid;
    if (via && tx.outputs.size() == 2) {
      if (auto split = address_type_change(tx, graph); split && *split != *via) return tx.txid;
    }
    if (tx.outputs.size() != 2) return tx.txid;
    via = tx.inputs[0].prev_vout;
    cur = graph.source(cur, 0);
  }
}

PeelingChain extend_chain(const TransactionGraph& graph, const TxId& start,
                          const PeelingConfig& cfg) {
  cfg.validate();
  const auto s = graph.index_of(start);
  const auto& head = graph.tx(s);

  PeelingChain chain;
  chain.start = start;

  std::optional<std::uint32_t> entry;
  if (head.outputs.size() == 2) {
    if (auto change = change_output_candidate(head, graph)) {
      const std::uint32_t deposit = 1 - *change;
      if (auto sp = graph.spender(s, deposit); sp && graph.tx(*sp).inputs.size() == 1)
        entry = deposit;
    }
  }
  if (!entry) {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t v = 0; v < head.outputs.size(); ++v)
      if (auto sp = graph.spender(s, v); sp && peel_shaped(graph.tx(*sp))) candidates.push_back(v);
    if (candidates.size() != 1) {
      chain.stop = candidates.empty() ? ChainStop::NoEntry : ChainStop::Ambiguous;
      return chain;
    }
    entry = candidates.front();
  }

  auto cur = *graph.spender(s, *entry);
  for (;;) {
    const auto& tx = graph.tx(cur);
    if (tx.inputs.size() >= cfg.many_inputs_threshold) {
      chain.end = tx.txid;
      chain.stop = ChainStop::Collector;
      break;
    }
    if (tx.inputs.size() != 1) {
      chain.stop = ChainStop::MergedSpender;
      break;
    }
    if (chain.nodes.size() >= cfg.max_chain_length) {
      chain.stop = ChainStop::MaxLength;
      break;
    }
    if (tx.outputs.size() == 1) {
      chain.nodes.push_back({tx.txid, 0, std::nullopt});
      chain.stop = ChainStop::FinalPayout;
      break;
    }
    if (tx.outputs.size() != 2) {
      chain.stop = ChainStop::NonChainSpender;
      break;
    }

    auto change = change_output_candidate(tx, graph);
    if (!change) {
      const bool c0 = continues(graph, cur, 0, cfg);
      const bool c1 = continues(graph, cur, 1, cfg);
      if (c0 == c1) {
        chain.stop = c0 ? ChainStop::Ambiguous : ChainStop::ChangeUndetermined;
        break;
      }
      change = c0 ? 0u : 1u;
    }
    chain.nodes.push_back({tx.txid, 1 - *change, *change});

    const auto next = graph.spender(cur, *change);
    if (!next) {
      chain.stop = ChainStop::UnspentChange;
      break;
    }
    cur = *next;
  }

  if (!chain.nodes.empty() && chain.nodes.back().change_vout) {
    const auto& last = graph.get(chain.nodes.back().txid);
    chain.trailing_dust = last.outputs[*chain.nodes.back().change_vout].value < cfg.dust_floor;
  }
  return chain;
}

std::map<std::size_t, TxId> find_ending_points(const TransactionGraph& graph,
                                               std::span<const PeelingChain> chains,
                                               const PeelingConfig& cfg) {
  cfg.validate();
  std::map<std::size_t, TxId> ends;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto& chain = chains[i];
    if (chain.nodes.empty() || !chain.nodes.back().change_vout) continue;
    const auto last = graph.index_of(chain.nodes.back().txid);
    const auto sp = graph.spender(last, *chain.nodes.back().change_vout);
    if (sp && graph.tx(*sp).inputs.size() >= cfg.many_inputs_threshold)
      ends.emplace(i, graph.tx(*sp).txid);
  }
  return ends;
}

std::map<TxId, std::vector<std::size_t>> group_by_collector(
    const std::map<std::size_t, TxId>& ending_points) {
  std::map<TxId, std::vector<std::size_t>> groups;
  for (const auto& [chain, collector] : ending_points) groups[collector].push_back(chain);
  return groups;
}

}  // namespace mixscope
