#include "mixscope/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>
#include <stdexcept>
#include <unordered_set>

namespace mixscope {

namespace {

constexpr double kSpan = 1000.0;  // logical timeline length
constexpr Amount kMinChange = 10'000;
constexpr Amount kMaxChange = 5'000'000;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_fraction(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::vector<Amount> SimConfig::default_chip_denominations() {
  std::vector<Amount> out;
  for (int k = 0; k <= 13; ++k) out.push_back(Amount{100'000} << k);
  return out;
}

void SimConfig::validate() const {
  require(chip_unit > 0, "chip_unit must be positive");
  require(!chip_denominations.empty(), "chip_denominations must not be empty");
  for (auto d : chip_denominations) require(d > 0, "chip denominations must be positive");
  require(deposits_per_mix.first >= 1 && deposits_per_mix.first <= deposits_per_mix.second,
          "deposits_per_mix must satisfy 1 <= min <= max");
  for (const auto& plan : scripted_deposits) {
    require(!plan.empty(), "scripted deposit lists must not be empty");
    for (auto v : plan) require(v > 0, "scripted deposits must be positive");
  }
  require(hack_targets <= chip_mixes, "hack_targets exceeds chip_mixes");
  require(hack_targets == 0 || hack_amount / Amount(hack_targets) >= 100'000'000 + 10 * network_fee,
          "hack_amount leaves less than 1 BTC per target");
  require(max_chips_per_mix >= 2, "max_chips_per_mix must be >= 2");
  require(is_fraction(isolated_fraction), "isolated_fraction must be in [0, 1]");
  require(is_fraction(unspent_chip_fraction), "unspent_chip_fraction must be in [0, 1]");
  require(is_fraction(donation_fraction), "donation_fraction must be in [0, 1]");
  require(!coinjoin_denominations.empty(), "coinjoin_denominations must not be empty");
  for (auto d : coinjoin_denominations) require(d > 0, "coinjoin denominations must be positive");
  require(coinjoin_participants.first >= 2 &&
              coinjoin_participants.first <= coinjoin_participants.second,
          "coinjoin_participants must satisfy 2 <= min <= max");
  require(coordinator_fee >= 0, "coordinator_fee must be >= 0");
  require(is_fraction(coordinator_switch), "coordinator_switch must be in [0, 1]");
  require(is_fraction(remix_fraction), "remix_fraction must be in [0, 1]");
  require(chain_length.first >= 1 && chain_length.first <= chain_length.second,
          "chain_length must satisfy 1 <= min <= max");
  require(is_fraction(payout_reuse), "payout_reuse must be in [0, 1]");
  require(is_fraction(payout_spend_fraction), "payout_spend_fraction must be in [0, 1]");
  require(is_fraction(unspent_end_fraction), "unspent_end_fraction must be in [0, 1]");
  require(collector_min_inputs >= 2, "collector_min_inputs must be >= 2");
  require(mean_block_interval > 0.0, "mean_block_interval must be positive");
  require(txs_per_block >= 1, "txs_per_block must be >= 1");
  require(record_jitter >= 0, "record_jitter must be >= 0");
  require(network_fee >= 0, "network_fee must be >= 0");
}

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::ChipMix: return "ChipMix";
    case Label::CoinJoin: return "CoinJoin";
    case Label::PeelNode: return "PeelNode";
    case Label::PeelStart: return "PeelStart";
    case Label::PeelEnd: return "PeelEnd";
    case Label::Deposit: return "Deposit";
    case Label::Payout: return "Payout";
    case Label::Background: break;
  }
  return "Background";
}

Label label_from_string(std::string_view text) {
  for (auto l : {Label::ChipMix, Label::CoinJoin, Label::PeelNode, Label::PeelStart,
                 Label::PeelEnd, Label::Deposit, Label::Payout, Label::Background})
    if (to_string(l) == text) return l;
  throw std::invalid_argument("unknown label '" + std::string(text) + "'");
}

std::vector<TxId> GroundTruth::with_label(Label label) const {
  std::vector<TxId> out;
  for (const auto& [txid, l] : labels)
    if (l == label) out.push_back(txid);
  return out;
}

namespace {

struct Utxo {
  TxId txid;
  std::uint32_t vout = 0;
  Amount value = 0;
  std::string address;
  double t = 0.0;
};

struct Pending {
  double t;
  std::uint64_t seq;
  Transaction tx;
};

struct Out {
  std::string address;
  Amount value;
};

class Builder {
 public:
  Builder(const SimConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {}

  GroundTruth truth;

  AddressKind user_kind() {
    if (!cfg_.address_type_disjoint) return AddressKind::P2PKH;
    return rng_.chance(0.5) ? AddressKind::P2PKH : AddressKind::SegWit;
  }
  AddressKind service_kind() const {
    return cfg_.address_type_disjoint ? AddressKind::P2SH : AddressKind::P2PKH;
  }

  std::string fresh_address(AddressKind kind) {
    for (;;) {
      std::string a;
      switch (kind) {
        case AddressKind::P2SH: a = "3" + rng_.hex(33); break;
        case AddressKind::SegWit: a = "bc1q" + rng_.hex(38); break;
        default: a = "1" + rng_.hex(33); break;
      }
      if (addresses_.insert(a).second) return a;
    }
  }

  /// Coinbase-style source at height 0 paying `address`.
  Utxo fund(const std::string& address, Amount value) {
    const auto txid = emit(0.0, {}, {{address, value}}, Label::Background);
    return {txid, 0, value, address, 0.0};
  }

  /// Address already paid at height 0, so seen before any later block.
  std::string seen_address(AddressKind kind) {
    auto a = fresh_address(kind);
    fund(a, rng_.between(kMinChange, kMaxChange));
    return a;
  }

  TxId emit(double t, const std::vector<Utxo>& inputs, const std::vector<Out>& outputs,
            Label label) {
    Amount in = 0, out = 0;
    Transaction tx;
    tx.txid = fresh_txid();
    for (const auto& u : inputs) {
      if (u.t >= t) throw std::logic_error("simulator spent an output before it existed");
      tx.inputs.push_back({u.txid, u.vout});
      in += u.value;
    }
    for (const auto& o : outputs) {
      if (o.value <= 0) throw std::logic_error("simulator produced a non-positive output");
      tx.outputs.push_back({Address(o.address), o.value});
      out += o.value;
    }
    if (!inputs.empty() && out > in) throw std::logic_error("simulator created money");
    const auto txid = tx.txid;
    truth.labels[txid] = label;
    pending_.push_back({t, seq_++, std::move(tx)});
    return txid;
  }

  Utxo output_of(const TxId& txid, std::uint32_t vout, double t) const {
    const auto& tx = find(txid);
    return {txid, vout, tx.outputs[vout].value, tx.outputs[vout].address.text, t};
  }

  /// Emits a two-output tx with the outputs in random order. Returns the
  /// vout of `first`.
  std::uint32_t emit_pair(double t, const std::vector<Utxo>& inputs, Out first, Out second,
                          Label label, TxId& txid) {
    const bool swap = rng_.chance(0.5);
    txid = swap ? emit(t, inputs, {second, first}, label) : emit(t, inputs, {first, second}, label);
    return swap ? 1 : 0;
  }

  std::vector<Transaction> finish(std::vector<std::pair<TxId, std::size_t>>& record_slots) {
    std::sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
      return std::tie(a.t, a.seq) < std::tie(b.t, b.seq);
    });
    std::int64_t clock = cfg_.start_time;
    std::uint64_t height = 0;
    std::size_t in_block = 0, block_size = 0;
    bool genesis = true;
    for (auto& p : pending_) {
      if (p.t == 0.0) {
        p.tx.block_height = 0;
        p.tx.timestamp = cfg_.start_time;
        continue;
      }
      if (genesis || in_block == block_size) {
        genesis = false;
        ++height;
        in_block = 0;
        block_size = static_cast<std::size_t>(
            rng_.between(1, 2 * static_cast<std::int64_t>(cfg_.txs_per_block) - 1));
        clock += std::max<std::int64_t>(
            1, std::llround(rng_.exponential(cfg_.mean_block_interval)));
      }
      ++in_block;
      p.tx.block_height = height;
      p.tx.timestamp = clock;
    }
    std::unordered_map<TxId, std::int64_t, TxIdHash> times;
    std::vector<Transaction> txs;
    txs.reserve(pending_.size());
    for (auto& p : pending_) {
      times[p.tx.txid] = p.tx.timestamp;
      txs.push_back(std::move(p.tx));
    }
    for (auto& [txid, slot] : record_slots) truth.records[slot].record.timestamp = times.at(txid);
    std::sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
      return std::tie(a.block_height, a.txid) < std::tie(b.block_height, b.txid);
    });
    return txs;
  }

 private:
  TxId fresh_txid() {
    for (;;) {
      TxId id(rng_.hex(64));
      if (txids_.insert(id).second) return id;
    }
  }

  const Transaction& find(const TxId& txid) const {
    for (auto it = pending_.rbegin(); it != pending_.rend(); ++it)
      if (it->tx.txid == txid) return it->tx;
    throw std::logic_error("simulator lost a transaction");
  }

  const SimConfig& cfg_;
  Rng& rng_;
  std::vector<Pending> pending_;
  std::uint64_t seq_ = 0;
  std::unordered_set<std::string> addresses_;
  std::set<TxId> txids_;
};

/// Keeps `b` different from `a` by shifting it down (or up when tiny).
Amount distinct_from(Amount a, Amount b) {
  if (a != b) return b;
  return b > 1 ? b - 1 : b + 1;
}

class Scenario {
 public:
  Scenario(const SimConfig& cfg, Rng& rng, Builder& b) : cfg_(cfg), rng_(rng), b_(b) {}

  void record(const TxId& txid, std::uint32_t vout, std::string cur_in, std::string cur_out,
              Amount value) {
    slots_.emplace_back(txid, b_.truth.records.size());
    b_.truth.records.push_back({ConvertRecord{std::move(cur_in), std::move(cur_out), 0, value},
                                txid, vout});
  }

  std::string other_currency() {
    static const char* kCoins[] = {"ETH", "LTC", "XMR", "ZEC"};
    return kCoins[rng_.below(4)];
  }

  std::vector<std::pair<TxId, std::size_t>>& slots() { return slots_; }

  /// User deposit tx paying `value` to a fresh service address. Returns the
  /// deposit output.
  Utxo user_deposit(double t, Amount value, Label label, std::size_t user_inputs = 1) {
    const auto kind = b_.user_kind();
    auto change = distinct_from(value, rng_.between(kMinChange, kMaxChange));
    const auto needed = value + change + cfg_.network_fee;
    std::vector<Utxo> funds;
    Amount left = needed;
    for (std::size_t i = 0; i < user_inputs; ++i) {
      const Amount part = i + 1 == user_inputs ? left : std::max<Amount>(1, left / 2);
      funds.push_back(b_.fund(b_.fresh_address(kind), part));
      left -= part;
    }
    TxId txid;
    const auto vout = b_.emit_pair(t, funds, {b_.fresh_address(b_.service_kind()), value},
                                   {b_.fresh_address(kind), change}, label, txid);
    return b_.output_of(txid, vout, t);
  }

  void chip_mixes() {
    const auto n = cfg_.chip_mixes;
    if (n == 0) return;
    std::vector<bool> isolated(n, false);
    if (n > 1) {
      std::vector<std::size_t> order(n - 1);
      std::iota(order.begin(), order.end(), 1);
      rng_.shuffle(order);
      const auto m = std::min<std::size_t>(
          n - 1, static_cast<std::size_t>(std::llround(cfg_.isolated_fraction * double(n))));
      for (std::size_t i = 0; i < m; ++i) isolated[order[i]] = true;
    }
    const double spacing = kSpan / double(n);
    const auto hacked = hack_leaves();
    std::optional<Utxo> carry;
    std::vector<std::pair<Utxo, std::size_t>> pool;  // (chip, mix index)
    bool any_connected = false;

    for (std::size_t k = 0; k < n; ++k) {
      const double tk = 1.0 + double(k) * spacing;
      std::vector<Utxo> inputs;
      Amount total = carry ? carry->value : 0;
      auto add_deposit = [&](std::optional<Amount> fixed) {
        const double td = tk - spacing * 0.4 * (0.1 + 0.9 * rng_.unit()) - 1e-6;
        Amount v;
        if (fixed) {
          v = *fixed;
        } else if (rng_.chance(cfg_.donation_fraction)) {
          v = rng_.between(1, cfg_.chip_unit - 1);
        } else {
          v = cfg_.chip_unit * rng_.between(1, 2000);
          if (rng_.chance(0.5)) v += rng_.between(1, cfg_.chip_unit - 1);
        }
        auto d = user_deposit(std::max(td, 1e-3), v, Label::Deposit);
        b_.truth.fees[d.txid] = v % cfg_.chip_unit;
        record(d.txid, d.vout, "BTC", other_currency(), v);
        total += v;
        inputs.push_back(d);
      };
      if (k < cfg_.scripted_deposits.size()) {
        for (auto v : cfg_.scripted_deposits[k]) add_deposit(v);
      } else {
        const auto deposits =
            rng_.between(static_cast<std::int64_t>(cfg_.deposits_per_mix.first),
                         static_cast<std::int64_t>(cfg_.deposits_per_mix.second));
        for (std::int64_t i = 0; i < deposits; ++i) add_deposit(std::nullopt);
      }
      if (const auto h = hacked.find(k); h != hacked.end()) {
        inputs.push_back(h->second);
        total += h->second.value;
        b_.truth.fees[h->second.txid] = h->second.value % cfg_.chip_unit;
      }
      while (total - cfg_.network_fee < 2 * smallest_chip()) add_deposit(std::nullopt);
      if (carry) inputs.push_back(*carry);
      rng_.shuffle(inputs);

      const Amount avail = total - cfg_.network_fee;
      std::vector<Amount> feasible;
      for (auto d : cfg_.chip_denominations) {
        const auto c = avail / d;
        if (c >= 2 && static_cast<std::size_t>(c) <= cfg_.max_chips_per_mix) feasible.push_back(d);
      }
      Amount denom;
      if (!feasible.empty()) {
        denom = feasible[rng_.below(feasible.size())];
      } else {
        denom = 0;
        for (auto d : cfg_.chip_denominations)
          if (avail / d >= 2) denom = std::max(denom, d);
      }
      const auto chips = avail / denom;
      const auto rest = avail - chips * denom;
      std::vector<Out> outs;
      for (Amount i = 0; i < chips; ++i) outs.push_back({b_.fresh_address(b_.service_kind()), denom});
      if (rest > 0) outs.push_back({b_.fresh_address(b_.service_kind()), rest});
      const auto mix = b_.emit(tk, inputs, outs, Label::ChipMix);
      if (const auto h = hacked.find(k); h != hacked.end()) b_.truth.hack_hits[mix] = h->second.value;
      carry.reset();
      if (rest > 0) carry = b_.output_of(mix, static_cast<std::uint32_t>(chips), tk);
      if (isolated[k]) b_.truth.isolated_mixes.push_back(mix);

      std::vector<Utxo> own;
      for (Amount i = 0; i < chips; ++i) own.push_back(b_.output_of(mix, static_cast<std::uint32_t>(i), tk));
      rng_.shuffle(own);

      if (isolated[k]) {
        for (const auto& chip : own) {
          if (rng_.chance(cfg_.unspent_chip_fraction)) continue;
          withdraw({chip}, chip.t + rng_.exponential(spacing * 2) + 1e-6);
        }
        continue;
      }
      std::size_t first_free = 0;
      if (cfg_.connected_mixes && any_connected && !pool.empty()) {
        const auto window = std::min<std::size_t>(pool.size(), 32);
        const auto pick = pool.size() - 1 - rng_.below(window);
        const auto other = pool[pick].first;
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        withdraw({own[0], other}, tk + spacing * 0.1 * rng_.unit() + 1e-6);
        first_free = 1;
      }
      any_connected = true;
      for (std::size_t i = first_free; i < own.size(); ++i) pool.emplace_back(own[i], k);
    }

    // Remaining chips: withdrawn singly or in small same-mix groups.
    std::stable_sort(pool.begin(), pool.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    std::size_t i = 0;
    while (i < pool.size()) {
      std::size_t j = i + 1;
      const auto group = static_cast<std::size_t>(rng_.between(1, 3));
      while (j < pool.size() && j - i < group && pool[j].second == pool[i].second) ++j;
      if (!rng_.chance(cfg_.unspent_chip_fraction)) {
        std::vector<Utxo> in;
        double t = 0;
        for (auto x = i; x < j; ++x) {
          in.push_back(pool[x].first);
          t = std::max(t, pool[x].first.t);
        }
        withdraw(in, t + rng_.exponential(spacing * 2) + 1e-6);
      }
      i = j;
    }
  }

  void coinjoin_rounds() {
    const auto r = cfg_.coinjoin_rounds;
    if (r == 0) return;
    const std::string coord[2] = {b_.fresh_address(AddressKind::SegWit),
                                  b_.fresh_address(AddressKind::SegWit)};
    b_.truth.coordinator_addresses = {coord[0], coord[1]};
    const auto switch_at =
        static_cast<std::size_t>(std::llround(cfg_.coordinator_switch * double(r)));
    const double spacing = kSpan / double(r);
    std::vector<Utxo> pool;
    const auto& denoms = cfg_.coinjoin_denominations;

    for (std::size_t j = 0; j < r; ++j) {
      const double tj = 1.0 + double(j) * spacing + spacing * 0.5 * rng_.unit();
      const auto p = static_cast<std::size_t>(
          rng_.between(static_cast<std::int64_t>(cfg_.coinjoin_participants.first),
                       static_cast<std::int64_t>(cfg_.coinjoin_participants.second)));
      std::vector<std::size_t> pick(p);
      for (std::size_t i = 0; i < p; ++i)
        pick[i] = p >= 2 * denoms.size() && i < 2 * denoms.size() ? i / 2 : rng_.below(denoms.size());
      for (;;) {
        std::vector<std::size_t> count(denoms.size(), 0);
        for (auto x : pick) ++count[x];
        const auto top = static_cast<std::size_t>(
            std::max_element(count.begin(), count.end()) - count.begin());
        bool changed = false;
        for (auto& x : pick)
          if (count[x] == 1 && x != top) {
            x = top;
            changed = true;
            break;
          }
        if (!changed) break;
      }

      std::set<Amount> used;
      for (auto x : pick) used.insert(denoms[x]);
      const Amount coord_fee = cfg_.coordinator_fee;
      if (coord_fee > 0) used.insert(coord_fee);
      std::size_t payer = 0;
      std::vector<Utxo> inputs;
      std::vector<Out> outs;
      for (auto x : pick) {
        const auto d = denoms[x];
        const auto share = coord_fee / Amount(p);
        const auto fee = payer++ == 0 ? coord_fee - share * Amount(p - 1) : share;
        const auto kind = b_.user_kind();
        Amount remix = 0;
        if (!pool.empty() && rng_.chance(cfg_.remix_fraction)) {
          const auto at = rng_.below(pool.size());
          inputs.push_back(pool[at]);
          remix = pool[at].value;
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
        }
        Amount change = rng_.between(kMinChange, kMaxChange);
        while (used.count(change + remix)) ++change;
        used.insert(change + remix);
        inputs.push_back(b_.fund(b_.fresh_address(kind), d + fee + cfg_.network_fee + change));
        outs.push_back({b_.fresh_address(kind), d});
        outs.push_back({b_.fresh_address(kind), change + remix});
      }
      if (coord_fee > 0) outs.push_back({coord[j < switch_at ? 0 : 1], coord_fee});
      rng_.shuffle(inputs);
      rng_.shuffle(outs);
      double t = tj;
      for (const auto& u : inputs) t = std::max(t, u.t + 1e-6);
      const auto round = b_.emit(t, inputs, outs, Label::CoinJoin);
      if (coord_fee > 0) b_.truth.fees[round] = coord_fee;
      for (std::uint32_t v = 0; v < outs.size(); ++v)
        if (outs[v].address != coord[0] && outs[v].address != coord[1] && rng_.chance(0.3))
          pool.push_back(b_.output_of(round, v, t));
    }
  }

  void peeling_chains() {
    const auto c = cfg_.peeling_chains;
    if (c == 0) return;
    const double spacing = kSpan / double(c);
    std::vector<std::pair<Utxo, std::size_t>> trailing;  // (change, chain index)
    for (std::size_t q = 0; q < c; ++q) {
      const double tq = 1.0 + double(q) * spacing + spacing * 0.3 * rng_.unit();
      const Amount deposit = rng_.between(50'000'000, 2'000'000'000);
      auto cur = user_deposit(tq, deposit, Label::PeelStart, rng_.chance(0.5) ? 2 : 1);
      PeelingChain chain;
      chain.start = cur.txid;
      chain.stop = ChainStop::UnspentChange;
      const auto len = rng_.between(static_cast<std::int64_t>(cfg_.chain_length.first),
                                    static_cast<std::int64_t>(cfg_.chain_length.second));
      double t = tq;
      for (std::int64_t i = 0; i < len; ++i) {
        t += spacing * 0.5 / double(len + 1) * (0.2 + rng_.unit());
        const Amount in = cur.value;
        if (in < 4 * (kMinChange + cfg_.network_fee)) break;
        Amount payout = static_cast<Amount>(double(in) * (0.05 + 0.3 * rng_.unit()));
        payout = std::max<Amount>(payout, kMinChange);
        Amount change = in - payout - cfg_.network_fee;
        if (change == payout) {
          --payout;
          ++change;
        }
        const auto kind = b_.user_kind();
        const auto payee =
            rng_.chance(cfg_.payout_reuse) ? b_.seen_address(kind) : b_.fresh_address(kind);
        TxId txid;
        const auto uv = b_.emit_pair(t, {cur}, {payee, payout},
                                     {b_.fresh_address(b_.service_kind()), change},
                                     Label::PeelNode, txid);
        chain.nodes.push_back({txid, uv, 1 - uv});
        if (rng_.chance(cfg_.payout_spend_fraction)) {
          const auto paid = b_.output_of(txid, uv, t);
          spend_payout(paid, t + rng_.exponential(spacing) + 1e-6);
        }
        cur = b_.output_of(txid, 1 - uv, t);
      }
      const auto idx = b_.truth.chains.size();
      b_.truth.chains.push_back(std::move(chain));
      if (b_.truth.chains[idx].nodes.empty()) continue;
      if (!rng_.chance(cfg_.unspent_end_fraction)) trailing.emplace_back(cur, idx);
    }

    std::size_t i = 0;
    while (i < trailing.size()) {
      const auto group = static_cast<std::size_t>(rng_.between(1, 4));
      const auto j = std::min(trailing.size(), i + group);
      std::vector<Utxo> in;
      double t = 0;
      for (auto x = i; x < j; ++x) {
        in.push_back(trailing[x].first);
        t = std::max(t, trailing[x].first.t);
      }
      const auto want = cfg_.collector_min_inputs + static_cast<std::size_t>(rng_.below(5));
      while (in.size() < want)
        in.push_back(b_.fund(b_.fresh_address(b_.service_kind()), rng_.between(kMinChange, kMaxChange)));
      rng_.shuffle(in);
      Amount total = 0;
      for (const auto& u : in) total += u.value;
      const auto end = b_.emit(t + 1e-3 + rng_.unit(), in,
                               {{b_.fresh_address(b_.service_kind()), total - cfg_.network_fee}},
                               Label::PeelEnd);
      for (auto x = i; x < j; ++x) b_.truth.chains[trailing[x].second].end = end;
      i = j;
    }
    for (auto& chain : b_.truth.chains)
      if (chain.end) chain.stop = ChainStop::Collector;
  }

  void background() {
    std::vector<Utxo> pool;
    for (std::size_t i = 0; i < cfg_.background_txs; ++i) {
      double t = 1.0 + kSpan * rng_.unit();
      const auto kind = b_.user_kind();
      std::vector<Utxo> in;
      if (!pool.empty() && rng_.chance(0.3)) {
        const auto at = rng_.below(pool.size());
        in.push_back(pool[at]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
        t = std::max(t, in.back().t + 1e-6);
      } else {
        const auto inputs = rng_.chance(0.3) ? 2 : 1;
        for (int k = 0; k < inputs; ++k)
          in.push_back(b_.fund(b_.fresh_address(kind), rng_.between(200'000, 500'000'000)));
      }
      Amount total = 0;
      for (const auto& u : in) total += u.value;
      const auto avail = total - cfg_.network_fee;
      if (avail <= 2) continue;
      const auto payee = rng_.chance(0.5) ? b_.seen_address(user_kind_any())
                                          : b_.fresh_address(user_kind_any());
      if (rng_.chance(0.2)) {
        const auto txid = b_.emit(t, in, {{payee, avail}}, Label::Background);
        pool.push_back(b_.output_of(txid, 0, t));
        continue;
      }
      Amount pay = std::max<Amount>(1, static_cast<Amount>(double(avail) * (0.1 + 0.8 * rng_.unit())));
      if (pay >= avail) pay = avail - 1;
      Amount change = avail - pay;
      if (change == pay) {
        --pay;
        ++change;
      }
      TxId txid;
      b_.emit_pair(t, in, {payee, pay}, {b_.fresh_address(kind), change}, Label::Background, txid);
      pool.push_back(b_.output_of(txid, 0, t));
      pool.push_back(b_.output_of(txid, 1, t));
    }
  }

  void converter() {
    for (std::size_t i = 0; i < cfg_.converter_deposits; ++i) {
      const double t = 1.0 + kSpan * rng_.unit();
      const Amount v = rng_.between(100'000, 1'000'000'000);
      const auto d = user_deposit(t, v, Label::Deposit);
      record(d.txid, d.vout, "BTC", other_currency(), v);
    }
    for (std::size_t i = 0; i < cfg_.converter_payouts; ++i) {
      const double t = 1.0 + kSpan * rng_.unit();
      const Amount p = rng_.between(100'000, 1'000'000'000);
      auto change = distinct_from(p, rng_.between(kMinChange, kMaxChange * 100));
      const auto hot = b_.fund(b_.fresh_address(b_.service_kind()), p + change + cfg_.network_fee);
      TxId txid;
      const auto vout = b_.emit_pair(t, {hot}, {b_.fresh_address(b_.user_kind()), p},
                                     {b_.fresh_address(b_.service_kind()), change},
                                     Label::Payout, txid);
      record(txid, vout, "LTC", "BTC", p);
    }
  }

 private:
  Amount smallest_chip() const {
    return *std::min_element(cfg_.chip_denominations.begin(), cfg_.chip_denominations.end());
  }

  AddressKind user_kind_any() { return b_.user_kind(); }

  /// Splits `total` into `parts` distinct positive values.
  static std::vector<Amount> split(Amount total, const std::vector<std::size_t>& weights) {
    std::size_t sum = 0;
    for (auto w : weights) sum += w;
    std::vector<Amount> out;
    Amount used = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      out.push_back(total / Amount(sum) * Amount(weights[i]) - Amount(i + 1) * 1000);
      used += out.back();
    }
    out.push_back(total - used);
    return out;
  }

  /// Builds the hack fan-out: root, one split per group, one deposit per
  /// target mix. Returns the deposit outputs keyed by target mix index.
  std::map<std::size_t, Utxo> hack_leaves() {
    std::map<std::size_t, Utxo> leaves;
    const auto targets = cfg_.hack_targets;
    if (targets == 0) return leaves;
    std::vector<std::size_t> order(cfg_.chip_mixes);
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order);
    order.resize(targets);
    std::sort(order.begin(), order.end());

    const auto groups = std::min<std::size_t>(targets, 3);
    std::vector<std::size_t> per_group(groups, targets / groups);
    for (std::size_t g = 0; g < targets % groups; ++g) ++per_group[g];

    const auto kind = b_.user_kind();
    const auto source = b_.fund(b_.fresh_address(kind), cfg_.hack_amount);
    std::vector<Out> root_outs;
    for (auto v : split(cfg_.hack_amount - cfg_.network_fee, per_group))
      root_outs.push_back({b_.fresh_address(kind), v});
    const double t0 = 1e-4;
    const auto root = b_.emit(t0, {source}, root_outs, Label::Background);
    b_.truth.hack_root = root;

    std::size_t next = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      const auto in = b_.output_of(root, static_cast<std::uint32_t>(g), t0);
      std::vector<Out> outs;
      for (auto v : split(in.value - cfg_.network_fee, std::vector<std::size_t>(per_group[g], 1)))
        outs.push_back({b_.fresh_address(kind), v});
      const auto layer = b_.emit(2 * t0, {in}, outs, Label::Background);
      for (std::uint32_t v = 0; v < outs.size(); ++v) {
        const auto hop = b_.output_of(layer, v, 2 * t0);
        const auto deposit = b_.emit(3 * t0, {hop},
                                     {{b_.fresh_address(b_.service_kind()), hop.value - cfg_.network_fee}},
                                     Label::Deposit);
        leaves[order[next++]] = b_.output_of(deposit, 0, 3 * t0);
      }
    }
    return leaves;
  }

  /// User withdrawal of chips to one fresh user address, sometimes merged
  /// with the user's own coins.
  void withdraw(std::vector<Utxo> in, double t) {
    if (rng_.chance(0.2))
      in.push_back(b_.fund(b_.fresh_address(b_.user_kind()), rng_.between(kMinChange, kMaxChange)));
    Amount total = 0;
    for (const auto& u : in) total += u.value;
    const auto fee = std::min(cfg_.network_fee, total - 1);
    b_.emit(t, in, {{b_.fresh_address(b_.user_kind()), total - fee}}, Label::Background);
  }

  void spend_payout(const Utxo& paid, double t) {
    const auto avail = paid.value - cfg_.network_fee;
    if (avail < 3) return;
    Amount pay = std::max<Amount>(1, avail / 3 + rng_.between(0, avail / 3));
    Amount change = avail - pay;
    if (change == pay) {
      --pay;
      ++change;
    }
    TxId txid;
    b_.emit_pair(t, {paid}, {b_.fresh_address(b_.user_kind()), pay},
                 {b_.fresh_address(b_.user_kind()), change}, Label::Background, txid);
  }

  const SimConfig& cfg_;
  Rng& rng_;
  Builder& b_;
  std::vector<std::pair<TxId, std::size_t>> slots_;
};

}  // namespace

Simulation simulate(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  Builder builder(cfg, rng);
  Scenario scenario(cfg, rng, builder);
  scenario.chip_mixes();
  scenario.coinjoin_rounds();
  scenario.peeling_chains();
  scenario.background();
  scenario.converter();
  Simulation sim;
  sim.transactions = builder.finish(scenario.slots());
  sim.truth = std::move(builder.truth);
  std::stable_sort(sim.truth.records.begin(), sim.truth.records.end(),
                   [](const RecordTruth& a, const RecordTruth& b) {
                     return std::tie(a.record.timestamp, a.txid) < std::tie(b.record.timestamp, b.txid);
                   });
  return sim;
}

void write_ndjson(const Simulation& sim, std::ostream& out) {
  for (const auto& tx : sim.transactions) out << transaction_to_json(tx) << '\n';
}

std::vector<ConvertRecord> emit_convert_records(const GroundTruth& truth, std::int64_t jitter,
                                                Rng& rng) {
  if (jitter < 0) throw std::invalid_argument("jitter must be >= 0");
  std::vector<ConvertRecord> out;
  out.reserve(truth.records.size());
  for (const auto& r : truth.records) {
    auto rec = r.record;
    if (jitter > 0) rec.timestamp += rng.between(-jitter, jitter);
    out.push_back(rec);
  }
  return out;
}

}  // namespace mixscope
