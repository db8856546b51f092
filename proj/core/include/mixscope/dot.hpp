#pragma once

#include <span>
#include <string>

#include "mixscope/peeling.hpp"
#include "mixscope/taint.hpp"
#include "mixscope/txgraph.hpp"

namespace mixscope {

/// Taint subgraph: every recorded edge, hit nodes filled blue, root boxed.
std::string taint_to_dot(const TaintReport& report);

/// Chain as a path of change edges with each user output as a leaf edge.
std::string chain_to_dot(const TransactionGraph& graph, const PeelingChain& chain);

/// Members and the co-spend edges between them.
std::string members_to_dot(const TransactionGraph& graph, std::span<const TxId> members);

}  // namespace mixscope
