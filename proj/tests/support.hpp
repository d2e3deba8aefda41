#pragma once

// Shared test support: fixture access, terse builders, and brute-force
// reference oracles. The oracles are deliberately implemented from scratch
// (plain backtracking over equation assignments) so that they share no code
// path with the library algorithms they check.

#include "hsa/graph.hpp"
#include "hsa/model.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hsa::test {

// ==== fixtures ===============================================================

inline std::string fixture_path(const std::string& name) {
    return std::string(HSA_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ==== builders ===============================================================

/// Occurrence shorthand for builders: base, derivative order, linear-TI flag.
struct Ref {
    std::string base;
    int order = 0;
    bool lti = false;
};

inline Equation mk_eq(const std::string& id, const std::vector<Ref>& refs) {
    Equation e;
    e.id = id;
    for (const Ref& r : refs) e.occurrences.push_back({VarRef{r.base, r.order}, r.lti});
    e.normalize();
    return e;
}

inline std::set<VarRef> var_set(const std::vector<Ref>& refs) {
    std::set<VarRef> out;
    for (const Ref& r : refs) out.insert(VarRef{r.base, r.order});
    return out;
}

/// Build a matching on `g` from explicit (variable, equation-id) pairs.
inline Matching mk_matching(const BipartiteGraph& g,
                            const std::vector<std::pair<VarRef, std::string>>& pairs) {
    Matching m = Matching::empty_for(g);
    for (const auto& [v, id] : pairs) {
        const int vi = g.var_index(v);
        const int ei = g.eq_index(id);
        if (vi < 0 || ei < 0) throw std::runtime_error("mk_matching: unknown node " + id);
        if (!g.has_edge(vi, ei)) throw std::runtime_error("mk_matching: no edge for " + id);
        m.var_to_eq[vi] = ei;
        m.eq_to_var[ei] = vi;
        ++m.cardinality;
    }
    return m;
}

// ==== random graphs ==========================================================

/// Random bipartite graph over nv variable nodes and ne equations; each
/// potential edge is present with probability p. Variable nodes with no
/// edges are kept in the node set.
inline BipartiteGraph random_graph(std::mt19937_64& rng, int nv, int ne, double p) {
    std::bernoulli_distribution edge(p);
    std::vector<VarRef> vars;
    vars.reserve(nv);
    for (int i = 0; i < nv; ++i) vars.push_back(VarRef{"v" + std::to_string(i), 0});
    std::vector<Equation> eqs;
    eqs.reserve(ne);
    for (int j = 0; j < ne; ++j) {
        Equation e;
        e.id = "e" + std::to_string(j);
        for (int i = 0; i < nv; ++i)
            if (edge(rng)) e.occurrences.push_back({vars[i], false});
        e.normalize();
        eqs.push_back(std::move(e));
    }
    return build_graph(eqs, vars);
}

// ==== brute-force oracles ====================================================

namespace detail {

/// Backtracking enumeration: equation `e` either stays exposed or takes one
/// unused adjacent variable. Every assignment function is visited once, so
/// each maximum matching appears exactly once in `out`.
inline void collect(const BipartiteGraph& g, int e, std::vector<int>& eq_to_var,
                    std::vector<char>& var_used, int matched, int& best,
                    std::vector<std::vector<int>>* out) {
    if (matched + (g.n_eqs() - e) < best) return; // cannot reach the best anymore
    if (e == g.n_eqs()) {
        if (matched > best) {
            best = matched;
            if (out) out->clear();
        }
        if (out && matched == best) out->push_back(eq_to_var);
        return;
    }
    collect(g, e + 1, eq_to_var, var_used, matched, best, out);
    for (int v : g.eq_adj[e]) {
        if (var_used[v]) continue;
        var_used[v] = 1;
        eq_to_var[e] = v;
        collect(g, e + 1, eq_to_var, var_used, matched + 1, best, out);
        var_used[v] = 0;
        eq_to_var[e] = -1;
    }
}

} // namespace detail

/// Maximum-matching cardinality by exhaustive backtracking.
inline int oracle_max_cardinality(const BipartiteGraph& g) {
    std::vector<int> eq_to_var(g.n_eqs(), -1);
    std::vector<char> var_used(g.n_vars(), 0);
    int best = 0;
    detail::collect(g, 0, eq_to_var, var_used, 0, best, nullptr);
    return best;
}

/// Every maximum matching, as eq -> var assignment vectors.
inline std::vector<std::vector<int>> oracle_all_max_matchings(const BipartiteGraph& g) {
    std::vector<int> eq_to_var(g.n_eqs(), -1);
    std::vector<char> var_used(g.n_vars(), 0);
    int best = 0;
    std::vector<std::vector<int>> out;
    detail::collect(g, 0, eq_to_var, var_used, 0, best, &out);
    return out;
}

/// Reference decomposition from first principles: a variable is
/// under-constrained iff some maximum matching leaves it exposed, and the
/// under-constrained equations are exactly their neighbours; dually, an
/// equation is over-constrained iff some maximum matching leaves it
/// exposed, with the over-constrained variables their neighbours. The
/// well-constrained part is everything else.
inline DmPartition oracle_dm(const BipartiteGraph& g) {
    const auto all = oracle_all_max_matchings(g);
    std::vector<char> var_exposable(g.n_vars(), 0), eq_exposable(g.n_eqs(), 0);
    for (const auto& m : all) {
        std::vector<char> var_hit(g.n_vars(), 0);
        for (int e = 0; e < g.n_eqs(); ++e) {
            if (m[e] >= 0) var_hit[m[e]] = 1;
            else eq_exposable[e] = 1;
        }
        for (int v = 0; v < g.n_vars(); ++v)
            if (!var_hit[v]) var_exposable[v] = 1;
    }

    std::vector<char> under_eq(g.n_eqs(), 0), over_var(g.n_vars(), 0);
    for (int v = 0; v < g.n_vars(); ++v)
        if (var_exposable[v])
            for (int e : g.var_adj[v]) under_eq[e] = 1;
    for (int e = 0; e < g.n_eqs(); ++e)
        if (eq_exposable[e])
            for (int v : g.eq_adj[e]) over_var[v] = 1;

    DmPartition p;
    for (int v = 0; v < g.n_vars(); ++v) {
        if (var_exposable[v]) p.under_vars.insert(g.var_nodes[v]);
        else if (over_var[v]) p.over_vars.insert(g.var_nodes[v]);
        else p.well_vars.insert(g.var_nodes[v]);
    }
    for (int e = 0; e < g.n_eqs(); ++e) {
        if (eq_exposable[e]) p.over_eqs.insert(g.eq_ids[e]);
        else if (under_eq[e]) p.under_eqs.insert(g.eq_ids[e]);
        else p.well_eqs.insert(g.eq_ids[e]);
    }
    return p;
}

} // namespace hsa::test
