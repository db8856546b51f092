#include "mixscope/serialize.hpp"

#include "mixscope/error.hpp"

namespace mixscope {

namespace {

Json outpoint_json(const OutPoint& op) { return Json{{"txid", op.txid.str()}, {"vout", op.vout}}; }

Json txid_list(const std::vector<TxId>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

Json hack_json(const GroundTruth& truth) {
  if (!truth.hack_root) return Json(nullptr);
  Json hits = Json::object();
  for (const auto& [txid, value] : truth.hack_hits) hits[txid.str()] = value;
  return Json{{"root", truth.hack_root->str()}, {"hits", std::move(hits)}};
}

}  // namespace

Json to_json(const AnonymitySet& set) {
  return Json{{"txid", set.txid.str()}, {"value", set.value}, {"vouts", set.member_vouts}};
}

Json to_json(const MechanismVerdict& verdict) {
  Json evidence = Json::array();
  for (const auto& e : verdict.evidence)
    evidence.push_back(Json{{"txid", e.txid.str()}, {"reason", e.reason}});
  return Json{{"verdict", std::string(to_string(verdict.verdict))},
              {"context_size", verdict.context_size},
              {"chain_linked", verdict.chain_linked},
              {"evidence", std::move(evidence)}};
}

Json to_json(const ExpansionResult& result) {
  Json log = Json::array();
  for (const auto& f : result.frontier_log)
    log.push_back(Json{{"discovered", f.discovered.str()},
                       {"via_output", outpoint_json(f.via_output)},
                       {"via_input", outpoint_json(f.via_input)}});
  const auto& s = result.stats;
  return Json{{"members", txid_list(result.members)},
              {"stats",
               Json{{"seeds", s.seeds},
                    {"dequeued", s.dequeued},
                    {"candidates_examined", s.candidates_examined},
                    {"rejected", s.rejected},
                    {"unspent_skipped", s.unspent_skipped}}},
              {"frontier_log", std::move(log)}};
}

Json to_json(const ColorTraceResult& result) {
  return Json{{"colored", result.colored_addresses},
              {"uncolored", result.uncolored_addresses},
              {"mixing_txs", txid_list(result.mixing_txs)}};
}

Json to_json(const PeelingChain& chain) {
  Json nodes = Json::array();
  for (const auto& n : chain.nodes) {
    Json node{{"txid", n.txid.str()}, {"user_vout", n.user_vout}};
    node["change_vout"] = n.change_vout ? Json(*n.change_vout) : Json(nullptr);
    nodes.push_back(std::move(node));
  }
  Json out{{"start", chain.start.str()}, {"nodes", std::move(nodes)}};
  out["end"] = chain.end ? Json(chain.end->str()) : Json(nullptr);
  out["stop"] = std::string(to_string(chain.stop));
  out["trailing_dust"] = chain.trailing_dust;
  return out;
}

Json to_json(const TaintReport& report) {
  Json hits = Json::array();
  for (const auto& h : report.hits)
    hits.push_back(Json{{"txid", h.txid.str()}, {"value", h.value}, {"depth", h.depth}});
  Json edges = Json::array();
  for (const auto& e : report.edges)
    edges.push_back(
        Json{{"from", e.from.str()}, {"vout", e.vout}, {"to", e.to.str()}, {"value", e.value}});
  return Json{{"root", report.root.str()},
              {"max_depth", report.config.max_depth},
              {"min_output", report.config.min_output},
              {"hits", std::move(hits)},
              {"total_value", report.total_value},
              {"explored", report.explored},
              {"edges", std::move(edges)}};
}

Json to_json(const ProfitReport& report) {
  Json monthly = Json::object();
  for (const auto& [month, value] : report.monthly) monthly[month] = value;
  return Json{{"monthly", std::move(monthly)},
              {"total", report.total},
              {"monthly_average", report.monthly_average}};
}

Json to_json(const GroundTruth& truth) {
  Json labels = Json::object();
  for (const auto& [txid, label] : truth.labels) labels[txid.str()] = std::string(to_string(label));
  Json fees = Json::object();
  for (const auto& [txid, fee] : truth.fees) fees[txid.str()] = fee;
  Json chains = Json::array();
  for (const auto& c : truth.chains) chains.push_back(to_json(c));
  Json records = Json::array();
  for (const auto& r : truth.records)
    records.push_back(Json{{"curIn", r.record.cur_in},
                           {"curOut", r.record.cur_out},
                           {"time", r.record.timestamp},
                           {"value_sat", r.record.value},
                           {"txid", r.txid.str()},
                           {"vout", r.vout}});
  return Json{{"labels", std::move(labels)},
              {"fees", std::move(fees)},
              {"chains", std::move(chains)},
              {"records", std::move(records)},
              {"isolated_mixes", txid_list(truth.isolated_mixes)},
              {"coordinator_addresses", truth.coordinator_addresses},
              {"hack", hack_json(truth)}};
}

TaintReport taint_report_from_json(const nlohmann::json& doc) {
  try {
    TaintReport r;
    r.root = TxId(doc.at("root").get<std::string>());
    r.config.max_depth = doc.at("max_depth").get<std::uint32_t>();
    r.config.min_output = doc.at("min_output").get<Amount>();
    for (const auto& h : doc.at("hits"))
      r.hits.push_back({TxId(h.at("txid").get<std::string>()), h.at("value").get<Amount>(),
                        h.at("depth").get<std::uint32_t>()});
    r.total_value = doc.at("total_value").get<Amount>();
    r.explored = doc.at("explored").get<std::size_t>();
    for (const auto& e : doc.at("edges"))
      r.edges.push_back({TxId(e.at("from").get<std::string>()), e.at("vout").get<std::uint32_t>(),
                         TxId(e.at("to").get<std::string>()), e.at("value").get<Amount>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed taint report: ") + e.what());
  }
}

GroundTruth ground_truth_from_json(const nlohmann::json& doc) {
  try {
    GroundTruth truth;
    for (const auto& [txid, label] : doc.at("labels").items())
      truth.labels[TxId(txid)] = label_from_string(label.get<std::string>());
    for (const auto& [txid, fee] : doc.at("fees").items()) truth.fees[TxId(txid)] = fee.get<Amount>();
    for (const auto& c : doc.at("chains")) {
      PeelingChain chain;
      chain.start = TxId(c.at("start").get<std::string>());
      for (const auto& n : c.at("nodes")) {
        ChainNode node{TxId(n.at("txid").get<std::string>()), n.at("user_vout").get<std::uint32_t>(),
                       std::nullopt};
        if (!n.at("change_vout").is_null()) node.change_vout = n.at("change_vout").get<std::uint32_t>();
        chain.nodes.push_back(std::move(node));
      }
      if (!c.at("end").is_null()) chain.end = TxId(c.at("end").get<std::string>());
      chain.stop = chain.end ? ChainStop::Collector : ChainStop::UnspentChange;
      chain.trailing_dust = c.at("trailing_dust").get<bool>();
      truth.chains.push_back(std::move(chain));
    }
    for (const auto& r : doc.at("records"))
      truth.records.push_back({ConvertRecord{r.at("curIn").get<std::string>(),
                                             r.at("curOut").get<std::string>(),
                                             r.at("time").get<std::int64_t>(),
                                             r.at("value_sat").get<Amount>()},
                               TxId(r.at("txid").get<std::string>()),
                               r.at("vout").get<std::uint32_t>()});
    for (const auto& id : doc.at("isolated_mixes"))
      truth.isolated_mixes.emplace_back(id.get<std::string>());
    truth.coordinator_addresses = doc.at("coordinator_addresses").get<std::vector<std::string>>();
    if (const auto& hack = doc.at("hack"); !hack.is_null()) {
      truth.hack_root = TxId(hack.at("root").get<std::string>());
      for (const auto& [txid, value] : hack.at("hits").items())
        truth.hack_hits[TxId(txid)] = value.get<Amount>();
    }
    return truth;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ground truth: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed ground truth: ") + e.what());
  }
}

}  // namespace mixscope
