#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "mixscope/error.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  std::string_view what) {
  if (!obj.is_object()) throw DataError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw DataError("unknown key '" + key + "' in " + std::string(what));
  }
  for (auto a : allowed)
    if (!obj.contains(a))
      throw DataError("missing key '" + std::string(a) + "' in " + std::string(what));
}

std::uint64_t get_u64(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw DataError(std::string("key '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw DataError(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Transaction parse_transaction(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  require_keys(obj, {"txid", "block", "time", "inputs", "outputs"}, "transaction");

  Transaction tx;
  tx.txid = TxId(get_string(obj, "txid"));
  tx.block_height = get_u64(obj, "block");
  const auto time = get_u64(obj, "time");
  if (time > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    throw DataError("key 'time' out of range");
  tx.timestamp = static_cast<std::int64_t>(time);

  const auto& inputs = obj.at("inputs");
  if (!inputs.is_array()) throw DataError("key 'inputs' must be an array");
  for (const auto& in : inputs) {
    require_keys(in, {"txid", "vout"}, "input");
    const auto vout = get_u64(in, "vout");
    if (vout > std::numeric_limits<std::uint32_t>::max()) throw DataError("input vout out of range");
    tx.inputs.push_back({TxId(get_string(in, "txid")), static_cast<std::uint32_t>(vout)});
  }

  const auto& outputs = obj.at("outputs");
  if (!outputs.is_array()) throw DataError("key 'outputs' must be an array");
  if (outputs.empty()) throw DataError("transaction " + tx.txid.str() + " has no outputs");
  for (const auto& out : outputs) {
    require_keys(out, {"addr", "value_sat"}, "output");
    auto addr = get_string(out, "addr");
    if (addr.empty()) throw DataError("output address must be non-empty");
    const auto value = get_u64(out, "value_sat");
    if (value == 0) throw DataError("output value must be positive");
    if (value > static_cast<std::uint64_t>(std::numeric_limits<Amount>::max()))
      throw DataError("output value out of range");
    tx.outputs.push_back({Address(std::move(addr)), static_cast<Amount>(value)});
  }
  return tx;
}

std::string transaction_to_json(const Transaction& tx) {
  nlohmann::ordered_json obj;
  obj["txid"] = tx.txid.str();
  obj["block"] = tx.block_height;
  obj["time"] = static_cast<std::uint64_t>(tx.timestamp);
  auto& inputs = obj["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : tx.inputs) {
    nlohmann::ordered_json o;
    o["txid"] = in.prev_txid.str();
    o["vout"] = in.prev_vout;
    inputs.push_back(std::move(o));
  }
  auto& outputs = obj["outputs"] = nlohmann::ordered_json::array();
  for (const auto& out : tx.outputs) {
    nlohmann::ordered_json o;
    o["addr"] = out.address.text;
    o["value_sat"] = static_cast<std::uint64_t>(out.value);
    outputs.push_back(std::move(o));
  }
  return obj.dump();
}

TransactionGraph ingest_ndjson(std::istream& in) {
  std::vector<Transaction> txs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      txs.push_back(parse_transaction(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return TransactionGraph::build(std::move(txs));
}

void export_ndjson(const TransactionGraph& graph, std::ostream& out) {
  for (const auto& tx : graph.transactions()) out << transaction_to_json(tx) << '\n';
}

}  // namespace mixscope
