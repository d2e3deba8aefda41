#include "hsa/graph.hpp"
#include "hsa/errors.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

namespace hsa {

namespace {

struct VarRefHash {
    std::size_t operator()(const VarRef& v) const {
        return std::hash<std::string>{}(v.base) * 31u +
               static_cast<std::size_t>(v.order);
    }
};

} // namespace

// ============================================================ BipartiteGraph

int BipartiteGraph::n_edges() const {
    int total = 0;
    for (const auto& adj : var_adj) total += static_cast<int>(adj.size());
    return total;
}

int BipartiteGraph::var_index(const VarRef& v) const {
    for (int i = 0; i < n_vars(); ++i)
        if (var_nodes[i] == v) return i;
    return -1;
}

int BipartiteGraph::eq_index(const std::string& id) const {
    for (int i = 0; i < n_eqs(); ++i)
        if (eq_ids[i] == id) return i;
    return -1;
}

bool BipartiteGraph::has_edge(int var, int eq) const {
    const auto& adj = var_adj[var];
    return std::binary_search(adj.begin(), adj.end(), eq);
}

BipartiteGraph build_graph(const std::vector<Equation>& equations,
                           const std::vector<VarRef>& vars) {
    BipartiteGraph g;
    std::unordered_map<VarRef, int, VarRefHash> index;
    index.reserve(vars.size());
    for (const VarRef& v : vars) {
        if (!index.emplace(v, g.n_vars()).second) continue;
        g.var_nodes.push_back(v);
    }
    g.var_adj.resize(g.var_nodes.size());
    g.eq_ids.reserve(equations.size());
    g.eq_adj.reserve(equations.size());
    for (const Equation& e : equations) {
        int ei = g.n_eqs();
        g.eq_ids.push_back(e.id);
        g.eq_adj.emplace_back();
        for (const Occurrence& o : e.occurrences) {
            auto it = index.find(o.var);
            if (it == index.end()) continue; // outside the node set: known quantity
            g.eq_adj[ei].push_back(it->second);
            g.var_adj[it->second].push_back(ei);
        }
        std::sort(g.eq_adj[ei].begin(), g.eq_adj[ei].end());
        g.eq_adj[ei].erase(std::unique(g.eq_adj[ei].begin(), g.eq_adj[ei].end()),
                           g.eq_adj[ei].end());
    }
    for (auto& adj : g.var_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return g;
}

BipartiteGraph build_graph(const std::vector<Equation>& equations,
                           const std::set<VarRef>& vars) {
    return build_graph(equations, std::vector<VarRef>(vars.begin(), vars.end()));
}

// ============================================================ Matching

std::vector<int> Matching::exposed_vars() const {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(var_to_eq.size()); ++v)
        if (var_to_eq[v] < 0) out.push_back(v);
    return out;
}

std::vector<int> Matching::exposed_eqs() const {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(eq_to_var.size()); ++e)
        if (eq_to_var[e] < 0) out.push_back(e);
    return out;
}

std::vector<std::pair<int, int>> Matching::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < static_cast<int>(var_to_eq.size()); ++v)
        if (var_to_eq[v] >= 0) out.emplace_back(v, var_to_eq[v]);
    return out;
}

Matching Matching::empty_for(const BipartiteGraph& g) {
    Matching m;
    m.var_to_eq.assign(g.n_vars(), -1);
    m.eq_to_var.assign(g.n_eqs(), -1);
    m.cardinality = 0;
    return m;
}

// ============================================================ max matching

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// Hopcroft-Karp over the equation side: BFS builds level layers from the
// free equations, DFS augments along them; O(sqrt(n)) phases.
struct HopcroftKarp {
    const BipartiteGraph& g;
    const std::vector<int>& eq_order;
    const std::vector<std::vector<int>>& adj; // per-eq adjacency (maybe permuted)
    Matching& m;
    std::vector<int> dist;

    bool bfs() {
        std::deque<int> q;
        bool reachable_free_var = false;
        dist.assign(g.n_eqs(), kInf);
        for (int e : eq_order)
            if (m.eq_to_var[e] < 0) {
                dist[e] = 0;
                q.push_back(e);
            }
        while (!q.empty()) {
            int e = q.front();
            q.pop_front();
            for (int v : adj[e]) {
                int e2 = m.var_to_eq[v];
                if (e2 < 0) {
                    reachable_free_var = true;
                } else if (dist[e2] == kInf) {
                    dist[e2] = dist[e] + 1;
                    q.push_back(e2);
                }
            }
        }
        return reachable_free_var;
    }

    bool dfs(int e) {
        for (int v : adj[e]) {
            int e2 = m.var_to_eq[v];
            if (e2 < 0 || (dist[e2] == dist[e] + 1 && dfs(e2))) {
                m.var_to_eq[v] = e;
                m.eq_to_var[e] = v;
                return true;
            }
        }
        dist[e] = kInf; // dead end: prune for the rest of the phase
        return false;
    }

    void run() {
        while (bfs())
            for (int e : eq_order)
                if (m.eq_to_var[e] < 0) dfs(e);
    }
};

// Plain augmenting-path matching (Kuhn); quadratic but simple, kept as a
// cross-check implementation.
struct Augmenting {
    const BipartiteGraph& g;
    const std::vector<int>& eq_order;
    const std::vector<std::vector<int>>& adj;
    Matching& m;
    std::vector<char> seen;

    bool try_eq(int e) {
        for (int v : adj[e]) {
            if (seen[v]) continue;
            seen[v] = 1;
            if (m.var_to_eq[v] < 0 || try_eq(m.var_to_eq[v])) {
                m.var_to_eq[v] = e;
                m.eq_to_var[e] = v;
                return true;
            }
        }
        return false;
    }

    void run() {
        for (int e : eq_order) {
            if (m.eq_to_var[e] >= 0) continue;
            seen.assign(g.n_vars(), 0);
            try_eq(e);
        }
    }
};

} // namespace

Matching max_matching(const BipartiteGraph& g, std::optional<std::uint64_t> shuffle_seed,
                      MatchAlgo algo, const Matching* warm_start) {
    Matching m = warm_start ? *warm_start : Matching::empty_for(g);
    assert(static_cast<int>(m.var_to_eq.size()) == g.n_vars());
    assert(static_cast<int>(m.eq_to_var.size()) == g.n_eqs());

    std::vector<int> eq_order(g.n_eqs());
    std::iota(eq_order.begin(), eq_order.end(), 0);
    const std::vector<std::vector<int>>* adj = &g.eq_adj;
    std::vector<std::vector<int>> permuted;
    if (shuffle_seed) {
        std::mt19937_64 rng(*shuffle_seed);
        std::shuffle(eq_order.begin(), eq_order.end(), rng);
        permuted = g.eq_adj;
        for (auto& a : permuted) std::shuffle(a.begin(), a.end(), rng);
        adj = &permuted;
    }

    if (algo == MatchAlgo::HopcroftKarp) {
        HopcroftKarp hk{g, eq_order, *adj, m, {}};
        hk.run();
    } else {
        Augmenting aug{g, eq_order, *adj, m, {}};
        aug.run();
    }

    m.cardinality = 0;
    for (int v = 0; v < g.n_vars(); ++v)
        if (m.var_to_eq[v] >= 0) ++m.cardinality;
    return m;
}

// ============================================================ path queries

std::optional<std::vector<NodeRef>> find_augmenting_path(const BipartiteGraph& g,
                                                         const Matching& m, NodeRef from) {
    if (from.side == NodeRef::Var ? !m.var_exposed(from.index) : !m.eq_exposed(from.index))
        return std::nullopt;

    // Alternating DFS. From a variable we may only leave via unmatched
    // edges and arrive at equations via their matched edge onwards; the
    // path is augmenting when it reaches an exposed node of the far side.
    std::vector<char> seen_var(g.n_vars(), 0), seen_eq(g.n_eqs(), 0);
    std::vector<NodeRef> path;

    // dfs from a variable node: next edge must be unmatched.
    std::function<bool(int)> from_var = [&](int v) -> bool {
        seen_var[v] = 1;
        path.push_back({NodeRef::Var, v});
        for (int e : g.var_adj[v]) {
            if (seen_eq[e] || m.var_to_eq[v] == e) continue;
            int v2 = m.eq_to_var[e];
            if (v2 < 0) {
                path.push_back({NodeRef::Eq, e});
                return true; // exposed equation reached
            }
            if (!seen_var[v2]) {
                seen_eq[e] = 1;
                path.push_back({NodeRef::Eq, e});
                if (from_var(v2)) return true;
                path.pop_back();
            }
        }
        path.pop_back();
        return false;
    };
    // dfs from an equation node: next edge must be unmatched.
    std::function<bool(int)> from_eq = [&](int e) -> bool {
        seen_eq[e] = 1;
        path.push_back({NodeRef::Eq, e});
        for (int v : g.eq_adj[e]) {
            if (seen_var[v] || m.eq_to_var[e] == v) continue;
            int e2 = m.var_to_eq[v];
            if (e2 < 0) {
                path.push_back({NodeRef::Var, v});
                return true; // exposed variable reached
            }
            if (!seen_eq[e2]) {
                seen_var[v] = 1;
                path.push_back({NodeRef::Var, v});
                if (from_eq(e2)) return true;
                path.pop_back();
            }
        }
        path.pop_back();
        return false;
    };

    bool found = from.side == NodeRef::Var ? from_var(from.index) : from_eq(from.index);
    if (!found) return std::nullopt;
    return path;
}

std::vector<std::array<int, 3>> feasible_paths_len2(const BipartiteGraph& g, const Matching& m,
                                                    int a) {
    std::vector<std::array<int, 3>> out;
    for (int r : g.var_adj[a]) {
        if (m.var_to_eq[a] == r) continue; // must leave via an unmatched edge
        int a2 = m.eq_to_var[r];
        if (a2 >= 0 && a2 != a) out.push_back({a, r, a2});
    }
    return out;
}

// ============================================================ decomposition

DmPartition dm_partition_with(const BipartiteGraph& g, const Matching& m) {
    std::vector<char> over_var(g.n_vars(), 0), over_eq(g.n_eqs(), 0);
    std::vector<char> under_var(g.n_vars(), 0), under_eq(g.n_eqs(), 0);

    // Over part: feasible-path closure from exposed equations. Each step
    // leaves an equation via an unmatched edge and continues through the
    // reached variable's matched equation.
    {
        std::deque<int> q;
        for (int e = 0; e < g.n_eqs(); ++e)
            if (m.eq_exposed(e)) {
                over_eq[e] = 1;
                q.push_back(e);
            }
        while (!q.empty()) {
            int e = q.front();
            q.pop_front();
            for (int v : g.eq_adj[e]) {
                if (m.eq_to_var[e] == v || over_var[v]) continue;
                over_var[v] = 1;
                int e2 = m.var_to_eq[v];
                // v must be matched: otherwise an augmenting path would
                // exist and the matching would not be maximum.
                assert(e2 >= 0);
                if (e2 >= 0 && !over_eq[e2]) {
                    over_eq[e2] = 1;
                    q.push_back(e2);
                }
            }
        }
    }

    // Under part: symmetric closure from exposed variables.
    {
        std::deque<int> q;
        for (int v = 0; v < g.n_vars(); ++v)
            if (m.var_exposed(v)) {
                under_var[v] = 1;
                q.push_back(v);
            }
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int e : g.var_adj[v]) {
                if (m.var_to_eq[v] == e || under_eq[e]) continue;
                under_eq[e] = 1;
                int v2 = m.eq_to_var[e];
                assert(v2 >= 0);
                if (v2 >= 0 && !under_var[v2]) {
                    under_var[v2] = 1;
                    q.push_back(v2);
                }
            }
        }
    }

    DmPartition p;
    for (int v = 0; v < g.n_vars(); ++v) {
        assert(!(over_var[v] && under_var[v]));
        if (over_var[v])
            p.over_vars.insert(g.var_nodes[v]);
        else if (under_var[v])
            p.under_vars.insert(g.var_nodes[v]);
        else
            p.well_vars.insert(g.var_nodes[v]);
    }
    for (int e = 0; e < g.n_eqs(); ++e) {
        assert(!(over_eq[e] && under_eq[e]));
        if (over_eq[e])
            p.over_eqs.insert(g.eq_ids[e]);
        else if (under_eq[e])
            p.under_eqs.insert(g.eq_ids[e]);
        else
            p.well_eqs.insert(g.eq_ids[e]);
    }
    return p;
}

DmPartition dm_decompose(const BipartiteGraph& g, std::optional<std::uint64_t> shuffle_seed) {
    Matching m = max_matching(g, shuffle_seed);
    return dm_partition_with(g, m);
}

// ============================================================ enumeration oracle

namespace {

// Exhaustive maximum-cardinality search, deliberately independent of the
// Hopcroft-Karp path: plain branch and bound over equations.
int oracle_max_cardinality(const BipartiteGraph& g, int e, std::vector<char>& used, int card) {
    if (e == g.n_eqs()) return card;
    // Upper bound: everything left could match.
    int best = oracle_max_cardinality(g, e + 1, used, card); // skip e
    for (int v : g.eq_adj[e]) {
        if (used[v]) continue;
        used[v] = 1;
        best = std::max(best, oracle_max_cardinality(g, e + 1, used, card + 1));
        used[v] = 0;
    }
    return best;
}

void oracle_enumerate(const BipartiteGraph& g, int e, std::vector<char>& used,
                      std::vector<int>& eq_to_var, int card, int target, long max_count,
                      std::vector<Matching>& out) {
    int remaining = g.n_eqs() - e;
    if (card + remaining < target) return; // cannot reach maximum any more
    if (e == g.n_eqs()) {
        if (card != target) return;
        if (static_cast<long>(out.size()) >= max_count)
            throw OracleBoundError("enumerate_max_matchings: matching count bound exceeded");
        Matching m;
        m.var_to_eq.assign(g.n_vars(), -1);
        m.eq_to_var = eq_to_var;
        m.cardinality = card;
        for (int i = 0; i < g.n_eqs(); ++i)
            if (eq_to_var[i] >= 0) m.var_to_eq[eq_to_var[i]] = i;
        out.push_back(std::move(m));
        return;
    }
    // Leave equation e exposed.
    oracle_enumerate(g, e + 1, used, eq_to_var, card, target, max_count, out);
    for (int v : g.eq_adj[e]) {
        if (used[v]) continue;
        used[v] = 1;
        eq_to_var[e] = v;
        oracle_enumerate(g, e + 1, used, eq_to_var, card + 1, target, max_count, out);
        eq_to_var[e] = -1;
        used[v] = 0;
    }
}

} // namespace

std::vector<Matching> enumerate_max_matchings(const BipartiteGraph& g, int max_nodes,
                                              long max_count) {
    if (g.n_nodes() > max_nodes)
        throw OracleBoundError("enumerate_max_matchings: graph has " +
                               std::to_string(g.n_nodes()) + " nodes, bound is " +
                               std::to_string(max_nodes));
    std::vector<char> used(g.n_vars(), 0);
    int target = oracle_max_cardinality(g, 0, used, 0);
    std::vector<Matching> out;
    std::vector<int> eq_to_var(g.n_eqs(), -1);
    oracle_enumerate(g, 0, used, eq_to_var, 0, target, max_count, out);
    return out;
}

} // namespace hsa
