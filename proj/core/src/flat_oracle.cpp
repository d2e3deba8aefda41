#include "hsa/flat_oracle.hpp"

#include "hsa/graph.hpp"
#include "hsa/index_reduction.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace hsa {

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

/// "a, b, c, ... (+2 more)" — keeps mismatch clauses readable.
std::string sample(const std::set<std::string>& s, std::size_t limit = 5) {
    std::ostringstream out;
    std::size_t shown = 0;
    for (const std::string& x : s) {
        if (shown == limit) break;
        if (shown++) out << ", ";
        out << x;
    }
    if (s.size() > limit) out << ", ... (+" << s.size() - limit << " more)";
    if (s.empty()) out << "(none)";
    return out.str();
}

void compare_sets(EquivalenceResult& r, const std::string& what,
                  const std::vector<std::string>& hier, const std::vector<std::string>& flat) {
    std::set<std::string> hs = as_set(hier), fs = as_set(flat);
    if (hs == fs) return;
    std::set<std::string> only_h, only_f;
    std::set_difference(hs.begin(), hs.end(), fs.begin(), fs.end(),
                        std::inserter(only_h, only_h.end()));
    std::set_difference(fs.begin(), fs.end(), hs.begin(), hs.end(),
                        std::inserter(only_f, only_f.end()));
    r.equivalent = false;
    r.mismatches.push_back(what + " differ: only hierarchical has " + sample(only_h) +
                           "; only flattened has " + sample(only_f));
}

} // namespace

AnalysisReport analyze_flat(const ModelRegistry& reg, const AnalysisOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const ModelDef& root = reg.root_def();
    FlatModel flat = flatten(root, reg);

    AnalysisReport rep;
    rep.model = root.name;
    rep.mode = "flat";
    rep.kind = to_string(root.kind);

    if (root.kind == ModelKind::Nlae) {
        std::set<VarRef> vars;
        for (const std::string& v : flat.variables) vars.insert(VarRef{v, 0});
        BipartiteGraph g = build_graph(flat.equations, vars);
        Matching m = max_matching(g, opts.match_seed);
        classify_into(rep, g, m, root.kind);
    } else {
        SsOptions so;
        so.deriv_cap = opts.deriv_cap;
        SsResult res = ss_matching(flat.equations, flat.variables, so);
        if (res.ok()) {
            classify_into(rep, res.system.graph, res.system.matching, root.kind);
        } else {
            DeficiencyReport dr;
            dr.kind = res.status == SsStatus::Deficient ? "redundant-constraints"
                                                        : "derivative-cap";
            dr.equations = std::move(res.problem_equations);
            dr.message = std::move(res.message);
            rep.deficiency = std::move(dr);
            rep.singular = true;
        }
    }

    const auto t1 = clock::now();
    if (opts.collect_timings) {
        rep.timings_ms["total"] =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return rep;
}

EquivalenceResult check_equivalence(const AnalysisReport& hier, const AnalysisReport& flat) {
    EquivalenceResult r;
    auto fail = [&](std::string clause) {
        r.equivalent = false;
        r.mismatches.push_back(std::move(clause));
    };

    if (hier.kind != flat.kind)
        fail("model kind differs: hierarchical is " + hier.kind + ", flattened is " +
             flat.kind);
    if (hier.singular != flat.singular)
        fail(std::string("verdict differs: hierarchical says ") +
             (hier.singular ? "singular" : "well-posed") + ", flattened says " +
             (flat.singular ? "singular" : "well-posed"));

    // A broken component makes the hierarchical side exclude part of the
    // model, so only the verdict is meaningful to compare.
    if (!hier.component_violations.empty()) return r;

    if (hier.kind == "nlae") {
        compare_sets(r, "over-constrained equations", hier.over_equations,
                     flat.over_equations);
        compare_sets(r, "over-constrained variables", hier.over_variables,
                     flat.over_variables);
        compare_sets(r, "under-constrained variables", hier.under_variables,
                     flat.under_variables);
        compare_sets(r, "under-constrained equations", hier.under_equations,
                     flat.under_equations);
    } else {
        bool hd = hier.deficiency.has_value(), fd = flat.deficiency.has_value();
        if (hd != fd)
            fail(std::string("deficiency differs: hierarchical ") +
                 (hd ? "found one" : "found none") + ", flattened " +
                 (fd ? "found one" : "found none"));
        if (hd || fd) return r;

        if (hier.over_equations.empty() != flat.over_equations.empty())
            fail("over part differs: hierarchical has " +
                 std::to_string(hier.over_equations.size()) +
                 " over-constrained equations, flattened has " +
                 std::to_string(flat.over_equations.size()));
        if (hier.dof != flat.dof)
            fail("degrees of freedom differ: hierarchical " + std::to_string(hier.dof) +
                 ", flattened " + std::to_string(flat.dof));

        // The augmented node sets may legitimately differ, but everything
        // the hierarchical path leaves exposed must be free in the
        // flattened under part too.
        std::set<std::string> flat_under = as_set(flat.under_variables);
        std::set<std::string> missing;
        for (const std::string& v : hier.exposed_variables)
            if (!flat_under.count(v)) missing.insert(v);
        if (!missing.empty())
            fail("exposed variables outside the flattened under part: " +
                 sample(missing));
    }
    return r;
}

} // namespace hsa
