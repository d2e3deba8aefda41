#pragma once

#include "hsa/graph.hpp"
#include "hsa/index_reduction.hpp"
#include "hsa/model.hpp"
#include "hsa/report.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace hsa {

/// Analysis knobs shared across the engine.
struct AnalysisOptions {
    int deriv_cap = kDefaultDerivCap;
    bool parallel_components = false; ///< decompose sibling definitions concurrently
    std::optional<std::uint64_t> match_seed; ///< randomize matching traversal order
    bool collect_timings = true;
    /// Test hook: drop one imported equation from the root dummy model so
    /// equivalence checks can observe a mismatch. Never set in production.
    bool inject_dummy_fault = false;
};

/// The analysis result of one component definition, expressed in the
/// definition's own (local) names. The under-constrained part is what a
/// parent imports; the well part is summarized as a known-order filter.
struct ComponentDecomposition {
    enum class Status { Ok, OverConstrained, Deficient, CapExceeded };

    Status status = Status::Ok;
    std::set<VarRef> under_vars;
    std::vector<Equation> under_eqs; ///< incidence restricted to under_vars

    std::set<VarRef> well_vars; ///< full well-constrained variable node set
    std::set<std::string> well_eqs;

    /// base -> minimum well-constrained order. A parent reference to
    /// (base, d) with d >= known.at(base) is a known quantity.
    KnownFilter known;

    std::vector<std::string> problem_equations; ///< over part / deficiency diagnosis
    std::map<std::string, int> diff_log;        ///< DAE only

    int node_count = 0;       ///< nodes of the analyzed graph
    int under_node_count = 0; ///< nodes of its under part

    bool over_empty() const { return status != Status::OverConstrained; }
};

/// Definition-name-keyed cache of component decompositions. Safe for
/// concurrent lookups and insertions; entries are immutable once stored.
class DecompositionCache {
public:
    std::shared_ptr<const ComponentDecomposition> find(const std::string& def_name) const;
    void insert(const std::string& def_name, ComponentDecomposition dec);
    void clear();
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const ComponentDecomposition>> entries_;
};

/// Decompose an algebraic component given by `equations` over `vars`:
/// maximum matching plus the feasible-path closure of the exposed
/// variables. The component is assumed over-part-free; an exposed
/// equation flips status to OverConstrained and the over part is
/// reported in problem_equations.
ComponentDecomposition decompose_nlae(const std::vector<Equation>& equations,
                                      const std::set<VarRef>& vars,
                                      std::optional<std::uint64_t> match_seed = {});

/// Decompose a dynamic component: augment with ss_matching, then apply
/// the same closure to the augmented graph. Derivatives of
/// well-constrained variables are known quantities (opts.known).
ComponentDecomposition decompose_dae(const std::vector<Equation>& equations,
                                     const std::set<std::string>& unknown_bases,
                                     const SsOptions& opts = {});

/// A model with its components replaced by their under-constrained
/// parts: same structural singularity as the flattened model, far fewer
/// nodes when components are mostly well-constrained.
struct DummyModel {
    std::set<VarRef> variables;          ///< node set (NLAE) / informational (DAE)
    std::set<std::string> unknown_bases; ///< DAE unknowns
    KnownFilter known;                   ///< DAE: merged component filters
    std::vector<Equation> equations;     ///< own equations + imported under parts
    std::map<std::string, std::string> provenance; ///< equation id -> instance path ("" = own)
    /// Own-equation references dropped because the component determines
    /// them: (own equation id, instance name, referenced var). Feeds
    /// over-constraint localization.
    std::vector<std::tuple<std::string, std::string, VarRef>> dropped;
    std::vector<ComponentViolation> issues; ///< skipped (broken) components
};

/// Assemble the dummy model of `def`, computing (and caching) component
/// decompositions recursively, deepest definitions first.
DummyModel build_dummy_nlae(const ModelDef& def, const ModelRegistry& reg,
                            DecompositionCache& cache, const AnalysisOptions& opts = {});
DummyModel build_dummy_dae(const ModelDef& def, const ModelRegistry& reg,
                           DecompositionCache& cache, const AnalysisOptions& opts = {});

/// Ensure `cache` holds a decomposition for every definition reachable
/// from `def` (excluding `def` itself). With opts.parallel_components,
/// definitions of equal depth are decomposed concurrently.
void warm_cache(const ModelDef& def, const ModelRegistry& reg, DecompositionCache& cache,
                const AnalysisOptions& opts = {});

/// Classify a prepared root graph/matching pair into `rep`: partition,
/// degrees of freedom, exposed variables with initialization suggestions,
/// and the singularity verdict. Shared by the hierarchical and flattened
/// analysis paths so both apply identical rules. Returns the partition
/// for callers that need the node sets beyond the rendered report.
DmPartition classify_into(AnalysisReport& rep, const BipartiteGraph& g, const Matching& m,
                          ModelKind kind);

/// Full hierarchical analysis of the registry's root model: component
/// decomposition bottom-up, dummy-model assembly, root decomposition,
/// classification and diagnosis.
AnalysisReport analyze(const ModelRegistry& reg, DecompositionCache& cache,
                       const AnalysisOptions& opts = {});

/// Narrow a root-level over-constraint into a component: pin each shared
/// variable with a synthetic assignment equation, decompose the
/// component's graph, and return the component-internal over-part
/// equations (local names, synthetic assignments excluded).
std::vector<std::string> localize_component_over(const ModelDef& comp, const ModelRegistry& reg,
                                                 DecompositionCache& cache,
                                                 const std::vector<VarRef>& shared_over_vars,
                                                 const AnalysisOptions& opts = {});

} // namespace hsa
