#include "mixscope/txgraph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "mixscope/error.hpp"

namespace mixscope {

TxId::TxId(std::string_view hex) {
  if (!valid(hex))
    throw DataError("invalid txid '" + std::string(hex) + "': expected 64 lowercase hex characters");
  hex_ = hex;
}

bool TxId::valid(std::string_view hex) noexcept {
  if (hex.size() != 64) return false;
  return std::all_of(hex.begin(), hex.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

std::size_t TxIdHash::operator()(const TxId& id) const noexcept {
  return std::hash<std::string>{}(id.str());
}

Amount Transaction::output_total() const noexcept {
  Amount total = 0;
  for (const auto& out : outputs) total += out.value;
  return total;
}

namespace {

std::string describe(const OutPoint& p) { return p.txid.str() + ":" + std::to_string(p.vout); }

void validate_shape(const Transaction& tx) {
  if (!TxId::valid(tx.txid.str())) throw DataError("transaction with invalid txid");
  if (tx.outputs.empty()) throw DataError("transaction " + tx.txid.str() + " has no outputs");
  for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
    const auto& out = tx.outputs[i];
    if (out.value <= 0)
      throw DataError("transaction " + tx.txid.str() + " output " + std::to_string(i) +
                      " has non-positive value");
    if (out.address.text.empty())
      throw DataError("transaction " + tx.txid.str() + " output " + std::to_string(i) +
                      " has an empty address");
  }
}

}  // namespace

TransactionGraph TransactionGraph::build(std::vector<Transaction> txs) {
  for (const auto& tx : txs) validate_shape(tx);

  std::sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    return std::tie(a.block_height, a.txid) < std::tie(b.block_height, b.txid);
  });

  TransactionGraph g;
  g.txs_ = std::move(txs);
  const auto n = g.txs_.size();
  g.by_id_.reserve(n);

  for (TxIndex i = 0; i < n; ++i) {
    auto [it, inserted] = g.by_id_.emplace(g.txs_[i].txid, i);
    if (!inserted) throw DataError("duplicate txid " + g.txs_[i].txid.str());
  }

  g.out_offset_.resize(n + 1, 0);
  g.in_offset_.resize(n + 1, 0);
  for (TxIndex i = 0; i < n; ++i) {
    g.out_offset_[i + 1] = g.out_offset_[i] + g.txs_[i].outputs.size();
    g.in_offset_[i + 1] = g.in_offset_[i] + g.txs_[i].inputs.size();
  }
  g.spender_.assign(g.out_offset_[n], kNone);
  g.source_.assign(g.in_offset_[n], kNone);

  std::vector<std::string> dangling;
  std::vector<std::string> double_spent;
  for (TxIndex i = 0; i < n; ++i) {
    const auto& tx = g.txs_[i];
    for (std::size_t k = 0; k < tx.inputs.size(); ++k) {
      const auto& in = tx.inputs[k];
      auto it = g.by_id_.find(in.prev_txid);
      if (it == g.by_id_.end() || it->second == i ||
          in.prev_vout >= g.txs_[it->second].outputs.size()) {
        dangling.push_back(tx.txid.str() + "[" + std::to_string(k) + "] -> " +
                           describe(in.outpoint()));
        continue;
      }
      auto& slot = g.spender_[g.out_offset_[it->second] + in.prev_vout];
      if (slot != kNone) {
        double_spent.push_back(describe(in.outpoint()) + " spent by " +
                               g.txs_[slot].txid.str() + " and " + tx.txid.str());
        continue;
      }
      slot = i;
      g.source_[g.in_offset_[i] + k] = it->second;
    }
  }

  auto join = [](const std::vector<std::string>& items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
    return os.str();
  };
  if (!dangling.empty())
    throw DataError(std::to_string(dangling.size()) + " dangling input reference(s): " +
                    join(dangling));
  if (!double_spent.empty())
    throw DataError("double-spent outpoint(s): " + join(double_spent));

  for (TxIndex i = 0; i < n; ++i) {
    const auto& tx = g.txs_[i];
    if (tx.is_coinbase()) continue;
    Amount in_total = 0;
    for (std::size_t k = 0; k < tx.inputs.size(); ++k) in_total += g.spent_output(i, k).value;
    if (in_total < tx.output_total())
      throw DataError("transaction " + tx.txid.str() + " spends " + std::to_string(in_total) +
                      " sat but creates " + std::to_string(tx.output_total()) + " sat");
  }

  for (TxIndex i = 0; i < n; ++i) {
    const auto& tx = g.txs_[i];
    g.by_height_[tx.block_height].push_back(i);
    for (const auto& out : tx.outputs) {
      g.by_address_[out.address.text].push_back(i);
      auto [it, inserted] = g.first_paid_height_.emplace(out.address.text, tx.block_height);
      if (!inserted) it->second = std::min(it->second, tx.block_height);
    }
    for (std::size_t k = 0; k < tx.inputs.size(); ++k)
      g.by_address_[g.spent_output(i, k).address.text].push_back(i);
  }
  for (auto& [addr, list] : g.by_address_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (const auto& [height, list] : g.by_height_) {
    std::vector<std::int64_t> times;
    times.reserve(list.size());
    for (auto i : list) times.push_back(g.txs_[i].timestamp);
    std::sort(times.begin(), times.end());
    g.block_times_[height] = times[(times.size() - 1) / 2];
  }
  return g;
}

std::optional<TxIndex> TransactionGraph::find(const TxId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

TxIndex TransactionGraph::index_of(const TxId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw AnalysisError("unknown transaction " + id.str());
  return it->second;
}

std::optional<TxIndex> TransactionGraph::spender(TxIndex tx, std::uint32_t vout) const {
  if (tx >= txs_.size() || vout >= txs_[tx].outputs.size())
    throw AnalysisError("unknown outpoint");
  const auto s = spender_[out_offset_[tx] + vout];
  if (s == kNone) return std::nullopt;
  return s;
}

TxIndex TransactionGraph::source(TxIndex tx, std::size_t input) const {
  return source_.at(in_offset_.at(tx) + input);
}

const TxOutput& TransactionGraph::spent_output(TxIndex tx, std::size_t input) const {
  const auto& in = txs_.at(tx).inputs.at(input);
  return txs_[source(tx, input)].outputs[in.prev_vout];
}

std::span<const TxIndex> TransactionGraph::txs_touching(std::string_view address) const {
  auto it = by_address_.find(std::string(address));
  if (it == by_address_.end()) return {};
  return it->second;
}

std::span<const TxIndex> TransactionGraph::txs_at_height(std::uint64_t height) const {
  auto it = by_height_.find(height);
  if (it == by_height_.end()) return {};
  return it->second;
}

bool TransactionGraph::address_seen_before(std::string_view address, std::uint64_t height) const {
  auto it = first_paid_height_.find(std::string(address));
  return it != first_paid_height_.end() && it->second < height;
}

Amount fee_of(const Transaction& tx, const TransactionGraph& graph) {
  if (tx.is_coinbase()) throw AnalysisError("fee undefined for coinbase-style transaction " +
                                            tx.txid.str());
  const auto idx = graph.index_of(tx.txid);
  Amount in_total = 0;
  for (std::size_t k = 0; k < tx.inputs.size(); ++k) in_total += graph.spent_output(idx, k).value;
  return in_total - tx.output_total();
}

std::optional<TxId> spender_of(const TransactionGraph& graph, const TxId& txid,
                               std::uint32_t vout) {
  const auto idx = graph.index_of(txid);
  if (vout >= graph.tx(idx).outputs.size())
    throw AnalysisError("unknown outpoint " + txid.str() + ":" + std::to_string(vout));
  if (auto s = graph.spender(idx, vout)) return graph.tx(*s).txid;
  return std::nullopt;
}

}  // namespace mixscope
