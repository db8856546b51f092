#include "mixscope/taint.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "mixscope/error.hpp"

namespace mixscope {

void TaintConfig::validate() const {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (min_output < 0) throw std::invalid_argument("min_output must be >= 0");
}

TaintReport trace_taint(const TransactionGraph& graph, const TxId& root,
                        std::span<const TxId> mixing_set, const TaintConfig& cfg) {
  cfg.validate();
  const auto root_idx = graph.index_of(root);

  std::vector<bool> in_mixer(graph.size(), false);
  for (const auto& id : mixing_set) in_mixer[graph.index_of(id)] = true;
  in_mixer[root_idx] = false;

  constexpr auto kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> depth(graph.size(), kUnseen);
  std::vector<Amount> hit_value(graph.size(), 0);

  TaintReport report;
  report.root = root;
  report.config = cfg;

  std::vector<TxIndex> layer{root_idx};
  depth[root_idx] = 0;
  std::vector<TxIndex> hits;
  for (std::uint32_t d = 0; !layer.empty() && d < cfg.max_depth; ++d) {
    std::sort(layer.begin(), layer.end());
    std::vector<TxIndex> next;
    for (const auto t : layer) {
      const auto& tx = graph.tx(t);
      for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
        const auto value = tx.outputs[v].value;
        if (value < cfg.min_output) continue;
        const auto sp = graph.spender(t, v);
        if (!sp) continue;
        report.edges.push_back({tx.txid, v, graph.tx(*sp).txid, value});
        if (depth[*sp] == kUnseen) {
          depth[*sp] = d + 1;
          if (in_mixer[*sp])
            hits.push_back(*sp);
          else
            next.push_back(*sp);
        }
        if (in_mixer[*sp]) hit_value[*sp] += value;
      }
    }
    layer = std::move(next);
  }

  std::sort(hits.begin(), hits.end());
  for (auto h : hits) {
    report.hits.push_back({graph.tx(h).txid, hit_value[h], depth[h]});
    report.total_value += hit_value[h];
  }
  report.explored = static_cast<std::size_t>(
      std::count_if(depth.begin(), depth.end(), [](auto d) { return d != kUnseen; }));
  return report;
}

}  // namespace mixscope
