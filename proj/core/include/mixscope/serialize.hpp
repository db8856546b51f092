#pragma once

#include <nlohmann/json.hpp>

#include "mixscope/expansion.hpp"
#include "mixscope/heuristics.hpp"
#include "mixscope/peeling.hpp"
#include "mixscope/simulator.hpp"
#include "mixscope/taint.hpp"

namespace mixscope {

using Json = nlohmann::ordered_json;

Json to_json(const AnonymitySet& set);
Json to_json(const MechanismVerdict& verdict);
Json to_json(const ExpansionResult& result);
Json to_json(const ColorTraceResult& result);
Json to_json(const PeelingChain& chain);
Json to_json(const TaintReport& report);
Json to_json(const ProfitReport& report);
Json to_json(const GroundTruth& truth);

/// Both throw DataError on a malformed document.
TaintReport taint_report_from_json(const nlohmann::json& doc);
GroundTruth ground_truth_from_json(const nlohmann::json& doc);

}  // namespace mixscope
