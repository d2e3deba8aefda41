#include "hsa/index_reduction.hpp"
#include "hsa/errors.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace hsa {

namespace {

bool filtered(const KnownFilter* known, const std::string& base, int order) {
    if (!known) return false;
    auto it = known->find(base);
    return it != known->end() && order >= it->second;
}

// Equation ids ending in apostrophes are derivative copies ("e" -> "e'" ->
// "e''"); the id with every trailing apostrophe stripped names the origin
// equation of the lineage.
std::string origin_of(const std::string& id) {
    std::size_t end = id.size();
    while (end > 0 && id[end - 1] == '\'') --end;
    return id.substr(0, end);
}

} // namespace

Equation differentiate_structurally(const Equation& e, int cap, const KnownFilter* known) {
    if (e.diff_count + 1 > cap)
        throw ModelError("derivative cap (" + std::to_string(cap) +
                         ") exceeded while differentiating '" + e.id + "'");
    Equation d;
    d.id = e.id + "'";
    d.diff_count = e.diff_count + 1;
    for (const Occurrence& o : e.occurrences) {
        // d/dt of a term in v^(k) always involves v^(k+1); the coefficient
        // is time-invariant exactly when the source appearance was
        // linear-TI, so the new appearance inherits the flag.
        if (!filtered(known, o.var.base, o.var.order + 1))
            d.occurrences.push_back({{o.var.base, o.var.order + 1}, o.linear_ti});
        // A nonlinear (or time-varying) appearance of v^(k) survives
        // differentiation; a linear-TI one does not.
        if (!o.linear_ti && !filtered(known, o.var.base, o.var.order))
            d.occurrences.push_back(o);
    }
    d.normalize();
    return d;
}

int AugmentedSystem::exposed_var_count() const {
    return graph.n_vars() - matching.cardinality;
}

// ============================================================ ss_matching

namespace {

// Collapsed view: one node per variable base and one node per *origin*
// equation. Derivative copies of one origin (an imported under part may
// carry "e" alongside "e'") collapse into a single node pooling their
// bases: copies of the same origin never compete for a base, they stack
// on it at distinct derivative orders. An input set that cannot match all
// origins here cannot be fixed by differentiation either (differentiating
// never adds a fresh base), so this check is the terminating deficiency
// test.
std::vector<std::string> collapsed_deficiency(const std::vector<Equation>& eqs,
                                              const std::set<std::string>& bases) {
    std::map<std::string, Equation> groups; // origin id -> pooled collapsed eq
    for (const Equation& e : eqs) {
        Equation& c = groups[origin_of(e.id)];
        c.id = origin_of(e.id);
        for (const Occurrence& o : e.occurrences) c.occurrences.push_back({{o.var.base, 0}, false});
    }
    std::vector<Equation> collapsed;
    collapsed.reserve(groups.size());
    for (auto& [id, c] : groups) {
        c.normalize();
        collapsed.push_back(std::move(c));
    }
    std::vector<VarRef> nodes;
    nodes.reserve(bases.size());
    for (const std::string& b : bases) nodes.push_back({b, 0});
    BipartiteGraph g = build_graph(collapsed, nodes);
    Matching m = max_matching(g);
    if (m.cardinality == g.n_eqs()) return {};
    // The over part of the collapsed graph names the redundant origins.
    DmPartition p = dm_partition_with(g, m);
    return {p.over_eqs.begin(), p.over_eqs.end()};
}

struct Augmenter {
    const SsOptions& opts;
    std::set<std::string> bases; // unknown bases that actually may carry nodes

    std::vector<Equation> copies;      // all equation copies, creation order
    std::vector<int> diff_of;          // copy -> its derivative copy (-1 if none)
    std::vector<int> input_of;         // copy -> input index it descends from
    std::vector<char> assigned;        // copy -> appears in `assign`
    std::map<std::string, int> h;      // base -> highest derivative order present
    std::map<VarRef, int> assign;      // variable node -> copy matched to it

    // DFS scratch.
    std::set<VarRef> colored_vars;
    std::set<int> colored_eqs;

    bool candidate(const VarRef& v) const {
        auto it = h.find(v.base);
        return it != h.end() && v.order == it->second && v.order >= 1;
    }

    bool known_at(const std::string& base, int order) const {
        return filtered(opts.known.empty() ? nullptr : &opts.known, base, order);
    }

    // Pantelides-style alternating search restricted to candidate nodes
    // (highest-order derivatives, order >= 1). Visited nodes stay colored
    // so a failed search leaves behind the set to differentiate.
    bool try_assign(int e) {
        colored_eqs.insert(e);
        for (const Occurrence& o : copies[e].occurrences) {
            if (!candidate(o.var) || colored_vars.count(o.var)) continue;
            colored_vars.insert(o.var);
            auto it = assign.find(o.var);
            if (it == assign.end()) {
                assign.emplace(o.var, e);
                assigned[e] = 1;
                return true;
            }
            int other = it->second;
            if (!colored_eqs.count(other) && try_assign(other)) {
                assign[o.var] = e;
                assigned[e] = 1;
                return true;
            }
        }
        return false;
    }

    // Differentiate every colored equation, bump every colored variable,
    // and carry assignments over to the derivative pairs. A colored copy
    // whose derivative is already present (imported under parts arrive
    // pre-differentiated) reuses it instead of spawning a duplicate.
    void differentiate_colored() {
        for (const VarRef& v : colored_vars) h[v.base] = v.order + 1;
        for (int e : colored_eqs) {
            if (diff_of[e] >= 0) continue;
            Equation d = differentiate_structurally(copies[e], opts.deriv_cap,
                                                    opts.known.empty() ? nullptr : &opts.known);
            int idx = static_cast<int>(copies.size());
            copies.push_back(std::move(d));
            diff_of.push_back(-1);
            input_of.push_back(input_of[e]);
            assigned.push_back(0);
            diff_of[e] = idx;
            for (const Occurrence& o : copies[idx].occurrences)
                h.try_emplace(o.var.base, 0); // register bases reached by new orders
        }
        for (const VarRef& v : colored_vars) {
            // The bumped order may cross into known territory (the filter
            // dropped it from the derivative); such orders are not nodes.
            if (known_at(v.base, v.order + 1)) continue;
            auto it = assign.find(v);
            assert(it != assign.end()); // an unassigned candidate would have ended the DFS
            int e = it->second;
            assert(colored_eqs.count(e) && diff_of[e] >= 0);
            int target = diff_of[e];
            // A pre-linked derivative may hold an assignment of its own
            // already; the completion pass balances the seed later.
            if (!assigned[target]) {
                assign.emplace(VarRef{v.base, v.order + 1}, target);
                assigned[target] = 1;
            }
        }
        // Track the true maximum orders after the bump.
        for (int e : colored_eqs)
            for (const Occurrence& o : copies[diff_of[e]].occurrences)
                if (h[o.var.base] < o.var.order) h[o.var.base] = o.var.order;
    }
};

} // namespace

SsResult ss_matching(const std::vector<Equation>& equations,
                     const std::set<std::string>& unknown_bases, const SsOptions& opts) {
    SsResult res;

    // Restrict every equation to the unknown, unfiltered part of its
    // occurrence set up front; everything else is a known quantity.
    std::vector<Equation> inputs;
    inputs.reserve(equations.size());
    for (const Equation& e : equations) {
        Equation r;
        r.id = e.id;
        r.diff_count = e.diff_count;
        for (const Occurrence& o : e.occurrences) {
            if (!unknown_bases.count(o.var.base)) continue;
            if (filtered(opts.known.empty() ? nullptr : &opts.known, o.var.base, o.var.order))
                continue;
            r.occurrences.push_back(o);
        }
        r.normalize();
        inputs.push_back(std::move(r));
    }

    // Terminating deficiency test on the order-collapsed graph.
    std::vector<std::string> redundant = collapsed_deficiency(inputs, unknown_bases);
    if (!redundant.empty()) {
        res.status = SsStatus::Deficient;
        res.problem_equations = std::move(redundant);
        res.message = "equations cannot be assigned distinct variables at any derivative order";
        return res;
    }

    Augmenter aug{opts, unknown_bases, {}, {}, {}, {}, {}, {}, {}, {}};
    aug.copies = inputs;
    aug.diff_of.assign(inputs.size(), -1);
    aug.input_of.resize(inputs.size());
    aug.assigned.assign(inputs.size(), 0);
    for (int i = 0; i < static_cast<int>(inputs.size()); ++i) aug.input_of[i] = i;
    for (const std::string& b : unknown_bases) aug.h[b] = 0;
    for (const Equation& e : inputs)
        for (const Occurrence& o : e.occurrences)
            if (aug.h[o.var.base] < o.var.order) aug.h[o.var.base] = o.var.order;

    // Inputs that are derivative copies of other inputs (id plus one
    // apostrophe) arrive when a component's under part is imported; link
    // those chains up front so differentiation reuses them.
    {
        std::map<std::string, int> by_id;
        for (int i = 0; i < static_cast<int>(inputs.size()); ++i) by_id.emplace(inputs[i].id, i);
        for (int i = 0; i < static_cast<int>(inputs.size()); ++i) {
            const std::string& id = inputs[i].id;
            if (id.empty() || id.back() != '\'') continue;
            auto it = by_id.find(id.substr(0, id.size() - 1));
            if (it != by_id.end()) aug.diff_of[it->second] = i;
        }
    }

    for (int k = 0; k < static_cast<int>(inputs.size()); ++k) {
        int i = k;
        for (;;) {
            if (aug.assigned[i]) break; // pre-linked chains assign ahead of the loop
            aug.colored_vars.clear();
            aug.colored_eqs.clear();
            if (aug.try_assign(i)) break;
            // Every colored equation about to spawn a fresh derivative must
            // stay within the cap; copies with a linked derivative reuse it.
            for (int e : aug.colored_eqs) {
                if (aug.diff_of[e] < 0 && aug.copies[e].diff_count + 1 > opts.deriv_cap) {
                    res.status = SsStatus::CapExceeded;
                    for (int c : aug.colored_eqs) res.problem_equations.push_back(aug.copies[c].id);
                    std::sort(res.problem_equations.begin(), res.problem_equations.end());
                    res.message = "derivative cap (" + std::to_string(opts.deriv_cap) +
                                  ") exceeded; structural deficiency candidate";
                    return res;
                }
            }
            aug.differentiate_colored();
            i = aug.diff_of[i];
            assert(i >= 0);
        }
    }

    // Assemble the augmented graph: all copies over every derivative
    // order 0..h of each unknown base (isolated intermediate orders are
    // genuine nodes: they need initial conditions). Orders at or above a
    // known-filter boundary are determined quantities, not nodes.
    // ensure_nodes widens the span: an imported under-constrained order
    // must get its node even when no remaining occurrence reaches it.
    std::map<std::string, int> span = aug.h;
    for (const VarRef& v : opts.ensure_nodes) {
        auto it = span.find(v.base);
        if (it != span.end() && v.order > it->second) it->second = v.order;
    }
    const KnownFilter* kf = opts.known.empty() ? nullptr : &opts.known;
    std::vector<VarRef> nodes;
    for (const auto& [base, maxo] : span)
        for (int d = 0; d <= maxo; ++d)
            if (!filtered(kf, base, d)) nodes.push_back({base, d});
    AugmentedSystem sys;
    sys.graph = build_graph(aug.copies, nodes);
    sys.equations = aug.copies;

    // Seed the maximum matching with the augmentation's assignment, then
    // complete it; augmenting never unmatches a matched node, so every
    // most-differentiated copy stays covered.
    Matching seed = Matching::empty_for(sys.graph);
    for (const auto& [v, e] : aug.assign) {
        int vi = sys.graph.var_index(v);
        assert(vi >= 0);
        seed.var_to_eq[vi] = e;
        seed.eq_to_var[e] = vi;
    }
    sys.matching = max_matching(sys.graph, std::nullopt, MatchAlgo::HopcroftKarp, &seed);

    // Per input, count the copies this run created along its chain;
    // pre-linked links lead to other inputs and are not differentiations.
    const int n_inputs = static_cast<int>(inputs.size());
    for (int k = 0; k < n_inputs; ++k) {
        int depth = 0;
        for (int c = k; aug.diff_of[c] >= 0; c = aug.diff_of[c])
            if (aug.diff_of[c] >= n_inputs) ++depth;
        sys.diff_log[inputs[k].id] = depth;
    }

    res.system = std::move(sys);
    return res;
}

} // namespace hsa
