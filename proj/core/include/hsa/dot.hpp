#pragma once

#include "hsa/graph.hpp"

#include <map>
#include <string>

namespace hsa {

/// Graphviz rendering of an incidence graph: variables as ellipses,
/// equations as boxes. With a matching, matched edges are drawn bold;
/// with a partition, nodes are color-filled by part (over / under /
/// well). Both extras are optional.
std::string to_dot(const BipartiteGraph& g, const Matching* m = nullptr,
                   const DmPartition* part = nullptr);

/// Plain-text table of differentiation counts, one "id<TAB>count" line
/// per equation that was differentiated, sorted by id.
std::string diff_log_table(const std::map<std::string, int>& diff_log);

} // namespace hsa
