#include "mixscope/heuristics.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

#include "mixscope/error.hpp"

namespace mixscope {

void HeuristicsConfig::validate() const {
  if (min_set_size < 2) throw std::invalid_argument("min_set_size must be >= 2");
  if (min_set_count < 1) throw std::invalid_argument("min_set_count must be >= 1");
  if (!(chain_majority_fraction > 0.0 && chain_majority_fraction <= 1.0))
    throw std::invalid_argument("chain_majority_fraction must lie in (0, 1]");
}

namespace {

bool allowed_value(Amount value, const HeuristicsConfig& cfg) {
  return !cfg.denomination_whitelist || cfg.denomination_whitelist->contains(value);
}

}  // namespace

std::vector<AnonymitySet> detect_anonymity_sets(const Transaction& tx,
                                                const HeuristicsConfig& cfg) {
  std::vector<std::pair<Amount, std::uint32_t>> by_value;
  by_value.reserve(tx.outputs.size());
  for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) by_value.emplace_back(tx.outputs[i].value, i);
  std::sort(by_value.begin(), by_value.end());

  std::vector<AnonymitySet> sets;
  for (std::size_t lo = 0; lo < by_value.size();) {
    std::size_t hi = lo;
    while (hi < by_value.size() && by_value[hi].first == by_value[lo].first) ++hi;
    if (hi - lo >= cfg.min_set_size && allowed_value(by_value[lo].first, cfg)) {
      AnonymitySet set{tx.txid, by_value[lo].first, {}};
      for (auto k = lo; k < hi; ++k) set.member_vouts.push_back(by_value[k].second);
      sets.push_back(std::move(set));
    }
    lo = hi;
  }
  return sets;
}

bool generates_anonymity_sets(const Transaction& tx, const HeuristicsConfig& cfg) {
  if (tx.outputs.size() < cfg.min_set_size) return false;
  // Count-only variant of detect_anonymity_sets: the expansion loop calls
  // this for every candidate, so avoid building the member lists.
  std::vector<Amount> values;
  values.reserve(tx.outputs.size());
  for (const auto& out : tx.outputs) values.push_back(out.value);
  std::sort(values.begin(), values.end());
  std::size_t count = 0;
  for (std::size_t lo = 0; lo < values.size();) {
    std::size_t hi = lo;
    while (hi < values.size() && values[hi] == values[lo]) ++hi;
    if (hi - lo >= cfg.min_set_size && allowed_value(values[lo], cfg) &&
        ++count >= cfg.min_set_count)
      return true;
    lo = hi;
  }
  return false;
}

std::optional<std::uint32_t> address_type_change(const Transaction& tx,
                                                 const TransactionGraph& graph) {
  if (tx.outputs.size() != 2 || tx.is_coinbase()) return std::nullopt;
  const auto k0 = tx.outputs[0].address.kind;
  const auto k1 = tx.outputs[1].address.kind;
  if (k0 == k1) return std::nullopt;

  const auto idx = graph.index_of(tx.txid);
  std::array<std::size_t, 4> counts{};
  for (std::size_t i = 0; i < tx.inputs.size(); ++i)
    ++counts[static_cast<std::size_t>(graph.spent_output(idx, i).address.kind)];
  const auto top = std::max_element(counts.begin(), counts.end());
  if (*top * 2 <= tx.inputs.size()) return std::nullopt;
  const auto majority = static_cast<AddressKind>(top - counts.begin());
  if (majority == AddressKind::Unknown) return std::nullopt;

  if (k0 == majority) return 0u;
  if (k1 == majority) return 1u;
  return std::nullopt;
}

std::optional<std::uint32_t> change_output_candidate(const Transaction& tx,
                                                     const TransactionGraph& graph) {
  if (tx.outputs.size() != 2)
    throw AnalysisError("change heuristic needs exactly 2 outputs, " + tx.txid.str() + " has " +
                        std::to_string(tx.outputs.size()));
  if (auto by_type = address_type_change(tx, graph)) return by_type;

  const bool seen0 = graph.address_seen_before(tx.outputs[0].address.text, tx.block_height);
  const bool seen1 = graph.address_seen_before(tx.outputs[1].address.text, tx.block_height);
  if (seen0 != seen1) return seen0 ? 1u : 0u;
  return std::nullopt;
}

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::Swapping: return "Swapping";
    case Mechanism::Obfuscating: return "Obfuscating";
    case Mechanism::Unknown: break;
  }
  return "Unknown";
}

namespace {

// A two-output transaction linked to a neighbour through a change output,
// either forward (its change funds another two-output tx) or backward (it
// spends the change output of a two-output funder).
bool chain_linked(TxIndex idx, const TransactionGraph& graph) {
  const auto& tx = graph.tx(idx);
  if (tx.outputs.size() != 2) return false;

  if (auto change = change_output_candidate(tx, graph)) {
    if (auto next = graph.spender(idx, *change); next && graph.tx(*next).outputs.size() == 2)
      return true;
  }
  if (tx.inputs.size() == 1) {
    const auto funder = graph.source(idx, 0);
    const auto& f = graph.tx(funder);
    if (f.outputs.size() == 2) {
      if (auto change = change_output_candidate(f, graph); change && *change == tx.inputs[0].prev_vout)
        return true;
    }
  }
  return false;
}

}  // namespace

MechanismVerdict classify_mechanism(std::span<const TxId> samples, const TransactionGraph& graph,
                                    const HeuristicsConfig& cfg) {
  if (samples.empty()) throw AnalysisError("mechanism classification needs at least one sample");

  std::set<TxIndex> sample_idx;
  for (const auto& id : samples) sample_idx.insert(graph.index_of(id));

  std::set<TxIndex> context;
  for (auto s : sample_idx) {
    const auto& tx = graph.tx(s);
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v)
      if (auto sp = graph.spender(s, v)) context.insert(*sp);
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) context.insert(graph.source(s, i));
  }

  MechanismVerdict verdict;
  verdict.context_size = context.size();

  std::set<TxIndex> examined = sample_idx;
  examined.insert(context.begin(), context.end());
  for (auto t : examined)
    if (generates_anonymity_sets(graph.tx(t), cfg))
      verdict.evidence.push_back({graph.tx(t).txid, "anonymity-set"});
  if (!verdict.evidence.empty()) {
    verdict.verdict = Mechanism::Obfuscating;
    return verdict;
  }

  std::vector<Evidence> chain;
  for (auto t : context)
    if (chain_linked(t, graph)) chain.push_back({graph.tx(t).txid, "change-chain"});
  verdict.chain_linked = chain.size();
  if (!context.empty() && !chain.empty() &&
      static_cast<double>(chain.size()) >=
          cfg.chain_majority_fraction * static_cast<double>(context.size())) {
    verdict.verdict = Mechanism::Swapping;
    verdict.evidence = std::move(chain);
  }
  return verdict;
}

}  // namespace mixscope
