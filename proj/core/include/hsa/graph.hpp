#pragma once

#include "hsa/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hsa {

/// Bipartite incidence graph between variable references and equations.
/// Node identity is positional; `var_nodes[i]` / `eq_ids[j]` give the
/// domain names back. Adjacency lists are sorted and duplicate-free.
struct BipartiteGraph {
    std::vector<VarRef> var_nodes;
    std::vector<std::string> eq_ids;
    std::vector<std::vector<int>> var_adj; // var index -> eq indices
    std::vector<std::vector<int>> eq_adj;  // eq index -> var indices

    int n_vars() const { return static_cast<int>(var_nodes.size()); }
    int n_eqs() const { return static_cast<int>(eq_ids.size()); }
    int n_edges() const;
    int n_nodes() const { return n_vars() + n_eqs(); }

    /// Index of a variable node, -1 if absent.
    int var_index(const VarRef& v) const;
    /// Index of an equation node, -1 if absent.
    int eq_index(const std::string& id) const;

    bool has_edge(int var, int eq) const;
};

/// Build the incidence graph of `equations` over the node set `vars`.
/// Occurrences referencing variables outside `vars` are dropped: such
/// references are treated as known quantities, not nodes. Node order
/// follows the input order (duplicate vars are collapsed).
BipartiteGraph build_graph(const std::vector<Equation>& equations,
                           const std::vector<VarRef>& vars);
BipartiteGraph build_graph(const std::vector<Equation>& equations,
                           const std::set<VarRef>& vars);

/// A matching as two partner maps; -1 marks an exposed (uncovered) node.
struct Matching {
    std::vector<int> var_to_eq;
    std::vector<int> eq_to_var;

    int cardinality = 0;

    bool var_exposed(int v) const { return var_to_eq[v] < 0; }
    bool eq_exposed(int e) const { return eq_to_var[e] < 0; }
    std::vector<int> exposed_vars() const;
    std::vector<int> exposed_eqs() const;
    std::vector<std::pair<int, int>> pairs() const; // (var, eq), var-ordered

    static Matching empty_for(const BipartiteGraph& g);
};

enum class MatchAlgo {
    HopcroftKarp, ///< O(sqrt(n) * m) phase algorithm; the default.
    Augmenting,   ///< plain per-equation augmenting DFS; cross-check fallback
};

/// Maximum matching. Deterministic for a fixed graph; `shuffle_seed`
/// permutes the traversal order to sample a different (equally maximum)
/// matching. `warm_start` seeds the search with an existing matching.
Matching max_matching(const BipartiteGraph& g,
                      std::optional<std::uint64_t> shuffle_seed = {},
                      MatchAlgo algo = MatchAlgo::HopcroftKarp,
                      const Matching* warm_start = nullptr);

/// A node handle for path queries.
struct NodeRef {
    enum Side { Var, Eq };
    Side side = Var;
    int index = 0;
    auto operator<=>(const NodeRef&) const = default;
};

/// Search for an augmenting path starting at the exposed node `from`:
/// a path alternating unmatched/matched edges that ends at an exposed
/// node of the other side. Returns the node sequence, or nullopt when
/// none exists (always, once the matching is maximum) or when `from`
/// is not exposed.
std::optional<std::vector<NodeRef>> find_augmenting_path(const BipartiteGraph& g,
                                                         const Matching& m,
                                                         NodeRef from);

/// All length-2 feasible path steps from variable `a`: triples
/// (a, r, a') where (a, r) is an unmatched edge and (r, a') the matched
/// edge of r. Costs O(deg(a)).
std::vector<std::array<int, 3>> feasible_paths_len2(const BipartiteGraph& g,
                                                    const Matching& m, int a);

/// The decomposition into over-constrained (reachable from exposed
/// equations), under-constrained (reachable from exposed variables) and
/// well-constrained (the rest) parts. Unique: independent of which
/// maximum matching the reachability used.
struct DmPartition {
    std::set<VarRef> over_vars, under_vars, well_vars;
    std::set<std::string> over_eqs, under_eqs, well_eqs;

    bool operator==(const DmPartition&) const = default;
};

/// Decompose using a fresh maximum matching (seeded variant provided for
/// uniqueness testing).
DmPartition dm_decompose(const BipartiteGraph& g,
                         std::optional<std::uint64_t> shuffle_seed = {});

/// Decompose against a caller-supplied maximum matching.
DmPartition dm_partition_with(const BipartiteGraph& g, const Matching& m);

/// Test oracle: every maximum matching of `g`, found by exhaustive
/// backtracking (independent of max_matching). Throws OracleBoundError
/// when the graph exceeds `max_nodes` nodes or more than `max_count`
/// matchings exist.
std::vector<Matching> enumerate_max_matchings(const BipartiteGraph& g,
                                              int max_nodes = 24,
                                              long max_count = 200000);

} // namespace hsa
