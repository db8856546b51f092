#include "mixscope/dot.hpp"

#include <set>
#include <sstream>

#include "mixscope/amount.hpp"

namespace mixscope {

namespace {

std::string node(const TxId& id) { return "\"" + id.str() + "\""; }

std::string label(const TxId& id) { return "label=\"" + std::string(id.abbrev()) + "\""; }

}  // namespace

std::string taint_to_dot(const TaintReport& report) {
  std::set<TxId> hits;
  for (const auto& h : report.hits) hits.insert(h.txid);
  std::set<TxId> nodes{report.root};
  for (const auto& e : report.edges) {
    nodes.insert(e.from);
    nodes.insert(e.to);
  }
  std::ostringstream out;
  out << "digraph taint {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (const auto& id : nodes) {
    out << "  " << node(id) << " [" << label(id);
    if (id == report.root) out << ", shape=box";
    if (hits.count(id)) out << ", style=filled, fillcolor=blue, fontcolor=white";
    out << "];\n";
  }
  for (const auto& e : report.edges)
    out << "  " << node(e.from) << " -> " << node(e.to) << " [label=\"" << e.vout << ": "
        << format_btc(e.value) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string chain_to_dot(const TransactionGraph& graph, const PeelingChain& chain) {
  std::ostringstream out;
  out << "digraph chain {\n  rankdir=LR;\n  node [shape=box];\n";
  out << "  " << node(chain.start) << " [" << label(chain.start) << "];\n";
  TxId prev = chain.start;
  for (const auto& n : chain.nodes) {
    out << "  " << node(n.txid) << " [" << label(n.txid) << "];\n";
    out << "  " << node(prev) << " -> " << node(n.txid) << ";\n";
    const auto& out_ = graph.get(n.txid).outputs[n.user_vout];
    out << "  \"" << n.txid.str() << ':' << n.user_vout << "\" [shape=plaintext, label=\""
        << out_.address.text << "\\n" << format_btc(out_.value) << "\"];\n";
    out << "  " << node(n.txid) << " -> \"" << n.txid.str() << ':' << n.user_vout
        << "\" [style=dashed];\n";
    prev = n.txid;
  }
  if (chain.end) {
    out << "  " << node(*chain.end) << " [" << label(*chain.end) << ", shape=doubleoctagon];\n";
    out << "  " << node(prev) << " -> " << node(*chain.end) << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string members_to_dot(const TransactionGraph& graph, std::span<const TxId> members) {
  std::set<TxIndex> in_set;
  for (const auto& id : members) in_set.insert(graph.index_of(id));
  std::set<std::pair<TxIndex, TxIndex>> edges;
  for (auto m : in_set) {
    const auto& tx = graph.tx(m);
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
      const auto spender = graph.spender(m, v);
      if (!spender) continue;
      for (std::size_t i = 0; i < graph.tx(*spender).inputs.size(); ++i) {
        const auto src = graph.source(*spender, i);
        if (src != m && in_set.count(src)) edges.emplace(std::min(m, src), std::max(m, src));
      }
    }
  }
  std::ostringstream out;
  out << "graph members {\n  node [shape=ellipse];\n";
  for (auto m : in_set) out << "  " << node(graph.tx(m).txid) << " [" << label(graph.tx(m).txid) << "];\n";
  for (const auto& [a, b] : edges)
    out << "  " << node(graph.tx(a).txid) << " -- " << node(graph.tx(b).txid) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace mixscope
