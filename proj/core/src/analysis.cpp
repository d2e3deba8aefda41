#include "hsa/analysis.hpp"

#include "hsa/errors.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

namespace hsa {

namespace {

std::string status_label(ComponentDecomposition::Status s) {
    switch (s) {
    case ComponentDecomposition::Status::OverConstrained: return "over-constrained";
    case ComponentDecomposition::Status::Deficient: return "deficient";
    case ComponentDecomposition::Status::CapExceeded: return "derivative-cap";
    case ComponentDecomposition::Status::Ok: break;
    }
    return "ok";
}

void merge_min(KnownFilter& filter, const std::string& base, int order) {
    auto [it, inserted] = filter.emplace(base, order);
    if (!inserted && order < it->second) it->second = order;
}

/// All definitions reachable from `def`, excluding `def` itself.
void collect_reachable(const ModelDef& def, const ModelRegistry& reg,
                       std::map<std::string, const ModelDef*>& out) {
    for (const ComponentInstance& ci : def.components) {
        const ModelDef& child = reg.def(ci.def_name);
        if (out.emplace(child.name, &child).second) collect_reachable(child, reg, out);
    }
}

/// Shared dummy-model assembly; `kind` selects how references into a
/// component's well-constrained part are recognized.
DummyModel assemble_dummy(const ModelDef& def, const ModelRegistry& reg,
                          DecompositionCache& cache, ModelKind kind) {
    DummyModel d;
    for (const std::string& v : def.variables) {
        d.variables.insert(VarRef{v, 0});
        d.unknown_bases.insert(v);
    }

    std::set<std::string> broken;
    std::vector<Equation> imported;
    for (const ComponentInstance& inst : def.components) {
        auto dec = cache.find(inst.def_name);
        if (!dec)
            throw ModelError("internal error: decomposition of '" + inst.def_name +
                             "' not cached while assembling '" + def.name + "'");
        if (dec->status != ComponentDecomposition::Status::Ok) {
            d.issues.push_back(
                {inst.def_name, status_label(dec->status), dec->problem_equations});
            // The verdict is singular no matter what happens above this
            // component; keep its variables as opaque unknowns so the
            // enclosing graph stays well formed.
            broken.insert(inst.instance_name);
            for (const std::string& v : reg.def(inst.def_name).variables) {
                VarRef q{inst.instance_name + "." + v, 0};
                d.variables.insert(q);
                d.unknown_bases.insert(q.base);
            }
            continue;
        }
        for (const Equation& e : dec->under_eqs) {
            Equation q = e.qualified(inst.instance_name);
            d.provenance[q.id] = inst.instance_name;
            imported.push_back(std::move(q));
        }
        for (const VarRef& v : dec->under_vars) {
            d.variables.insert(v.qualified(inst.instance_name));
            d.unknown_bases.insert(inst.instance_name + "." + v.base);
        }
        for (const auto& [base, order] : dec->known)
            merge_min(d.known, inst.instance_name + "." + base, order);
    }

    // Own equations, with references into well-constrained component parts
    // dropped: those quantities are determined inside the component.
    for (const Equation& e : def.equations) {
        Equation r;
        r.id = e.id;
        r.diff_count = e.diff_count;
        for (const Occurrence& o : e.occurrences) {
            std::size_t dot = o.var.base.find('.');
            if (dot == std::string::npos) {
                r.occurrences.push_back(o);
                continue;
            }
            std::string instance = o.var.base.substr(0, dot);
            std::string local = o.var.base.substr(dot + 1);
            if (broken.count(instance)) {
                r.occurrences.push_back(o);
                continue;
            }
            const ComponentInstance* ci = def.find_component(instance);
            if (!ci) {
                // A dotted name with no matching instance is an ordinary
                // variable of this definition; flattened definitions keep
                // their qualified names.
                r.occurrences.push_back(o);
                continue;
            }
            auto dec = cache.find(ci->def_name);
            bool known_ref = false;
            if (kind == ModelKind::Nlae) {
                known_ref = dec->under_vars.count(VarRef{local, 0}) == 0;
            } else {
                auto it = dec->known.find(local);
                known_ref = it != dec->known.end() && o.var.order >= it->second;
            }
            if (known_ref)
                d.dropped.emplace_back(e.id, instance, o.var);
            else
                r.occurrences.push_back(o);
        }
        r.normalize();
        d.provenance[r.id] = "";
        d.equations.push_back(std::move(r));
    }
    for (Equation& q : imported) d.equations.push_back(std::move(q));
    return d;
}

/// Decompose one definition on its dummy model.
ComponentDecomposition decompose_definition(const ModelDef& def, const ModelRegistry& reg,
                                            DecompositionCache& cache,
                                            const AnalysisOptions& opts, ModelKind kind) {
    if (def.components.empty()) {
        // A leaf definition is its own dummy model: decompose the equations
        // in place instead of copying them into an assembled dummy.
        if (kind == ModelKind::Nlae) {
            std::set<VarRef> vars;
            for (const std::string& v : def.variables) vars.insert(VarRef{v, 0});
            return decompose_nlae(def.equations, vars, opts.match_seed);
        }
        SsOptions so;
        so.deriv_cap = opts.deriv_cap;
        return decompose_dae(def.equations,
                             {def.variables.begin(), def.variables.end()}, so);
    }

    DummyModel dummy = assemble_dummy(def, reg, cache, kind);
    ComponentDecomposition dec;
    if (kind == ModelKind::Nlae) {
        dec = decompose_nlae(dummy.equations, dummy.variables, opts.match_seed);
    } else {
        SsOptions so;
        so.deriv_cap = opts.deriv_cap;
        so.known = dummy.known;
        so.ensure_nodes.assign(dummy.variables.begin(), dummy.variables.end());
        dec = decompose_dae(dummy.equations, dummy.unknown_bases, so);
    }
    // Orders determined by well parts deeper in the tree stay known here,
    // whether or not they resurface as well nodes of this level's graph.
    for (const auto& [base, order] : dummy.known) merge_min(dec.known, base, order);
    return dec;
}

} // namespace

// ==== DecompositionCache =================================================

std::shared_ptr<const ComponentDecomposition>
DecompositionCache::find(const std::string& def_name) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(def_name);
    return it == entries_.end() ? nullptr : it->second;
}

void DecompositionCache::insert(const std::string& def_name, ComponentDecomposition dec) {
    auto entry = std::make_shared<const ComponentDecomposition>(std::move(dec));
    std::unique_lock lock(mutex_);
    entries_[def_name] = std::move(entry);
}

void DecompositionCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

std::size_t DecompositionCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

// ==== Component decomposition ============================================

ComponentDecomposition decompose_nlae(const std::vector<Equation>& equations,
                                      const std::set<VarRef>& vars,
                                      std::optional<std::uint64_t> match_seed) {
    ComponentDecomposition dec;
    BipartiteGraph g = build_graph(equations, vars);
    Matching m = max_matching(g, match_seed);
    DmPartition part = dm_partition_with(g, m);

    dec.node_count = g.n_nodes();
    dec.under_vars = std::move(part.under_vars);
    dec.well_vars = std::move(part.well_vars);
    dec.well_eqs = std::move(part.well_eqs);
    dec.under_node_count =
        static_cast<int>(dec.under_vars.size() + part.under_eqs.size());

    if (!part.over_eqs.empty()) {
        dec.status = ComponentDecomposition::Status::OverConstrained;
        dec.problem_equations.assign(part.over_eqs.begin(), part.over_eqs.end());
    }

    // Under-constrained equations with incidence restricted to the
    // under-constrained variables; this is what an enclosing model imports.
    for (const Equation& e : equations) {
        if (!part.under_eqs.count(e.id)) continue;
        Equation r;
        r.id = e.id;
        r.diff_count = e.diff_count;
        for (const Occurrence& o : e.occurrences)
            if (dec.under_vars.count(o.var)) r.occurrences.push_back(o);
        r.normalize();
        dec.under_eqs.push_back(std::move(r));
    }

    for (const VarRef& v : dec.well_vars) merge_min(dec.known, v.base, v.order);
    return dec;
}

ComponentDecomposition decompose_dae(const std::vector<Equation>& equations,
                                     const std::set<std::string>& unknown_bases,
                                     const SsOptions& opts) {
    ComponentDecomposition dec;
    SsResult res = ss_matching(equations, unknown_bases, opts);
    if (res.status == SsStatus::Deficient) {
        dec.status = ComponentDecomposition::Status::Deficient;
        dec.problem_equations = std::move(res.problem_equations);
        return dec;
    }
    if (res.status == SsStatus::CapExceeded) {
        dec.status = ComponentDecomposition::Status::CapExceeded;
        dec.problem_equations = std::move(res.problem_equations);
        return dec;
    }

    const AugmentedSystem& sys = res.system;
    DmPartition part = dm_partition_with(sys.graph, sys.matching);

    dec.node_count = sys.graph.n_nodes();
    dec.under_vars = std::move(part.under_vars);
    dec.well_vars = std::move(part.well_vars);
    dec.well_eqs = std::move(part.well_eqs);
    dec.under_node_count =
        static_cast<int>(dec.under_vars.size() + part.under_eqs.size());
    dec.diff_log = sys.diff_log;

    // A successful augmentation matches every equation copy, so the over
    // part is empty by construction; handle the impossible defensively.
    if (!part.over_eqs.empty()) {
        dec.status = ComponentDecomposition::Status::OverConstrained;
        dec.problem_equations.assign(part.over_eqs.begin(), part.over_eqs.end());
    }

    for (const Equation& e : sys.equations) {
        if (!part.under_eqs.count(e.id)) continue;
        Equation r;
        r.id = e.id;
        r.diff_count = e.diff_count;
        for (const Occurrence& o : e.occurrences)
            if (dec.under_vars.count(o.var)) r.occurrences.push_back(o);
        r.normalize();
        dec.under_eqs.push_back(std::move(r));
    }

    for (const VarRef& v : dec.well_vars) merge_min(dec.known, v.base, v.order);
    return dec;
}

// ==== Dummy models =======================================================

DummyModel build_dummy_nlae(const ModelDef& def, const ModelRegistry& reg,
                            DecompositionCache& cache, const AnalysisOptions& opts) {
    warm_cache(def, reg, cache, opts);
    return assemble_dummy(def, reg, cache, ModelKind::Nlae);
}

DummyModel build_dummy_dae(const ModelDef& def, const ModelRegistry& reg,
                           DecompositionCache& cache, const AnalysisOptions& opts) {
    warm_cache(def, reg, cache, opts);
    return assemble_dummy(def, reg, cache, ModelKind::Dae);
}

void warm_cache(const ModelDef& def, const ModelRegistry& reg, DecompositionCache& cache,
                const AnalysisOptions& opts) {
    std::map<std::string, const ModelDef*> reach;
    collect_reachable(def, reg, reach);

    // Group by nesting depth; lower levels first, so every dummy assembly
    // finds the decompositions of its components already cached.
    std::map<int, std::vector<const ModelDef*>> by_level;
    for (const auto& [name, child] : reach)
        if (!cache.find(name)) by_level[level_of(*child, reg)].push_back(child);

    const ModelKind kind = def.kind;
    for (auto& [level, defs] : by_level) {
        if (opts.parallel_components && defs.size() > 1) {
            // Definitions of equal depth are independent of each other.
            std::vector<ComponentDecomposition> results(defs.size());
            std::vector<std::exception_ptr> errors(defs.size());
            std::vector<std::thread> pool;
            pool.reserve(defs.size());
            for (std::size_t i = 0; i < defs.size(); ++i) {
                pool.emplace_back([&, i] {
                    try {
                        results[i] = decompose_definition(*defs[i], reg, cache, opts, kind);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                });
            }
            for (std::thread& t : pool) t.join();
            for (std::size_t i = 0; i < defs.size(); ++i) {
                if (errors[i]) std::rethrow_exception(errors[i]);
                cache.insert(defs[i]->name, std::move(results[i]));
            }
        } else {
            for (const ModelDef* child : defs)
                cache.insert(child->name,
                             decompose_definition(*child, reg, cache, opts, kind));
        }
    }
}

// ==== Full analysis ======================================================

DmPartition classify_into(AnalysisReport& rep, const BipartiteGraph& g, const Matching& m,
                          ModelKind kind) {
    DmPartition part = dm_partition_with(g, m);

    rep.over_equations.assign(part.over_eqs.begin(), part.over_eqs.end());
    for (const VarRef& v : part.over_vars) rep.over_variables.push_back(v.display());
    for (const VarRef& v : part.under_vars) rep.under_variables.push_back(v.display());
    rep.under_equations.assign(part.under_eqs.begin(), part.under_eqs.end());
    rep.well_count = static_cast<int>(part.well_eqs.size());
    rep.dof = static_cast<int>(part.under_vars.size()) -
              static_cast<int>(part.under_eqs.size());

    for (int vi : m.exposed_vars()) {
        const VarRef& v = g.var_nodes[vi];
        rep.exposed_variables.push_back(v.display());
        InitSuggestion sug;
        sug.exposed = v.display();
        sug.candidates.push_back(v.display());
        for (const auto& step : feasible_paths_len2(g, m, vi)) {
            std::string cand = g.var_nodes[step[2]].display();
            if (std::find(sug.candidates.begin(), sug.candidates.end(), cand) ==
                sug.candidates.end())
                sug.candidates.push_back(std::move(cand));
        }
        rep.init_suggestions.push_back(std::move(sug));
    }

    if (kind == ModelKind::Nlae) {
        // Well-posed means a perfect matching exists: both the over and the
        // under part must be empty.
        rep.singular = !part.over_eqs.empty() || !part.under_vars.empty();
    } else {
        // Degrees of freedom are expected in a dynamic model; only an over
        // part makes it singular.
        rep.singular = !part.over_eqs.empty();
    }
    return part;
}

AnalysisReport analyze(const ModelRegistry& reg, DecompositionCache& cache,
                       const AnalysisOptions& opts) {
    using clock = std::chrono::steady_clock;
    auto elapsed_ms = [](clock::time_point from, clock::time_point to) {
        return std::chrono::duration<double, std::milli>(to - from).count();
    };

    const ModelDef& root = reg.root_def();
    AnalysisReport rep;
    rep.model = root.name;
    rep.mode = "hierarchical";
    rep.kind = to_string(root.kind);

    const auto t0 = clock::now();
    warm_cache(root, reg, cache, opts);
    const auto t1 = clock::now();

    DummyModel dummy = assemble_dummy(root, reg, cache, root.kind);
    if (opts.inject_dummy_fault) {
        // Test hook: lose one imported equation, as a faulty import would.
        for (auto it = dummy.equations.begin(); it != dummy.equations.end(); ++it) {
            auto pit = dummy.provenance.find(it->id);
            if (pit != dummy.provenance.end() && !pit->second.empty()) {
                dummy.equations.erase(it);
                break;
            }
        }
    }
    const auto t2 = clock::now();

    // Violations discovered anywhere below the root.
    std::map<std::string, const ModelDef*> reach;
    collect_reachable(root, reg, reach);
    for (const auto& [name, child] : reach) {
        auto dec = cache.find(name);
        if (dec && dec->status != ComponentDecomposition::Status::Ok)
            rep.component_violations.push_back(
                {name, status_label(dec->status), dec->problem_equations});
    }

    BipartiteGraph g;
    Matching m;
    bool have_graph = false;

    if (root.kind == ModelKind::Nlae) {
        g = build_graph(dummy.equations, dummy.variables);
        m = max_matching(g, opts.match_seed);
        have_graph = true;
    } else {
        SsOptions so;
        so.deriv_cap = opts.deriv_cap;
        so.known = dummy.known;
        so.ensure_nodes.assign(dummy.variables.begin(), dummy.variables.end());
        SsResult res = ss_matching(dummy.equations, dummy.unknown_bases, so);
        if (res.ok()) {
            g = std::move(res.system.graph);
            m = std::move(res.system.matching);
            have_graph = true;
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

    if (have_graph) {
        DmPartition part = classify_into(rep, g, m, root.kind);
        rep.singular = rep.singular || !rep.component_violations.empty();

        // Narrow a root-level over-constraint into the components it
        // touches. Dropped references tell us which determined quantities
        // the offending equations tried to constrain again.
        if (root.kind == ModelKind::Nlae && !part.over_eqs.empty()) {
            std::map<std::string, std::set<VarRef>> shared;
            for (const auto& [eq_id, instance, var] : dummy.dropped) {
                if (!part.over_eqs.count(eq_id)) continue;
                std::size_t dot = var.base.find('.');
                shared[instance].insert(VarRef{var.base.substr(dot + 1), var.order});
            }
            for (const std::string& e : part.over_eqs) {
                auto it = dummy.provenance.find(e);
                if (it != dummy.provenance.end() && !it->second.empty())
                    shared[it->second];
            }
            for (const VarRef& v : part.over_vars) {
                std::size_t dot = v.base.find('.');
                if (dot == std::string::npos) continue;
                std::string instance = v.base.substr(0, dot);
                if (root.find_component(instance))
                    shared[instance].insert(VarRef{v.base.substr(dot + 1), v.order});
            }
            for (const auto& [instance, vars] : shared) {
                const ComponentInstance* ci = root.find_component(instance);
                if (!ci) continue;
                std::vector<VarRef> pins(vars.begin(), vars.end());
                std::vector<std::string> eqs = localize_component_over(
                    reg.def(ci->def_name), reg, cache, pins, opts);
                if (!eqs.empty())
                    rep.localized_over.push_back({instance, ci->def_name, std::move(eqs)});
            }
        }
    }

    const auto t3 = clock::now();
    if (opts.collect_timings) {
        rep.timings_ms["components"] = elapsed_ms(t0, t1);
        rep.timings_ms["dummy"] = elapsed_ms(t1, t2);
        rep.timings_ms["root"] = elapsed_ms(t2, t3);
        rep.timings_ms["total"] = elapsed_ms(t0, t3);
    }
    return rep;
}

std::vector<std::string> localize_component_over(const ModelDef& comp, const ModelRegistry& reg,
                                                 DecompositionCache& cache,
                                                 const std::vector<VarRef>& shared_over_vars,
                                                 const AnalysisOptions& opts) {
    warm_cache(comp, reg, cache, opts);
    DummyModel dummy = assemble_dummy(comp, reg, cache, ModelKind::Nlae);

    std::set<std::string> synthetic;
    for (const VarRef& v : std::set<VarRef>(shared_over_vars.begin(), shared_over_vars.end())) {
        if (!dummy.variables.count(v)) continue;
        Equation pin;
        pin.id = "__assign_" + v.display();
        pin.occurrences.push_back({v, false});
        synthetic.insert(pin.id);
        dummy.equations.push_back(std::move(pin));
    }

    BipartiteGraph g = build_graph(dummy.equations, dummy.variables);
    DmPartition part = dm_decompose(g, opts.match_seed);
    std::vector<std::string> out;
    for (const std::string& e : part.over_eqs)
        if (!synthetic.count(e)) out.push_back(e);
    return out;
}

} // namespace hsa
