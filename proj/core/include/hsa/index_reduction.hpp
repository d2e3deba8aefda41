#pragma once

#include "hsa/graph.hpp"
#include "hsa/model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace hsa {

/// Default bound on how many times one equation may be differentiated
/// during augmentation before the run is abandoned and reported as a
/// structural deficiency candidate.
inline constexpr int kDefaultDerivCap = 20;

/// Minimum known derivative order per variable base: an occurrence
/// (base, d) with d >= filter[base] refers to a quantity determined
/// elsewhere and is dropped. Bases absent from the map are unknown at
/// every order.
using KnownFilter = std::map<std::string, int>;

/// Structural time differentiation of one equation. Every occurrence
/// (v, d) contributes (v, d+1); it additionally keeps (v, d) unless the
/// appearance is linear with a time-invariant coefficient. The id gains
/// one apostrophe and diff_count increments. Occurrences filtered by
/// `known` are dropped from the result. Throws ModelError when the
/// result's diff_count would exceed `cap`.
Equation differentiate_structurally(const Equation& e, int cap = kDefaultDerivCap,
                                    const KnownFilter* known = nullptr);

struct SsOptions {
    int deriv_cap = kDefaultDerivCap;
    KnownFilter known;
    /// Variable nodes the augmented graph must contain even when no
    /// occurrence reaches their order. An enclosing model imports a
    /// component's under-constrained part as plain quantities; an isolated
    /// derivative order in that part (an initial-condition node with no
    /// incident equation) would otherwise vanish from the rebuilt graph
    /// and distort the degree-of-freedom count. Bases outside the unknown
    /// set are ignored; the known filter still applies.
    std::vector<VarRef> ensure_nodes;
};

/// Result of the matching-driven augmentation: the augmented graph over
/// all equation copies and all derivative orders of each unknown base,
/// with a maximum matching, plus a log of how often each input equation
/// was differentiated.
struct AugmentedSystem {
    BipartiteGraph graph;                 // augmented graph
    Matching matching;                    // maximum matching on `graph`
    std::vector<Equation> equations;      // all copies, inputs first, then derivatives
    std::map<std::string, int> diff_log;  // input equation id -> differentiation count

    int exposed_var_count() const;
};

enum class SsStatus {
    Ok,
    Deficient,   ///< no augmentation can match every equation (redundant constraints)
    CapExceeded, ///< derivative cap hit; reported as a deficiency candidate
};

struct SsResult {
    SsStatus status = SsStatus::Ok;
    AugmentedSystem system; // fully populated when Ok; diagnostic graph otherwise
    std::vector<std::string> problem_equations; // offending equations when not Ok
    std::string message;

    bool ok() const { return status == SsStatus::Ok; }
};

/// Matching-driven index reduction. Differentiates equations until every
/// (most-differentiated) equation copy is matched to a distinct
/// highest-order derivative node of order >= 1, i.e. until the system
/// determines the first derivative of every unknown. Occurrences whose
/// base is outside `unknown_bases`, or filtered by opts.known, are
/// treated as known quantities throughout, including in derivatives
/// created along the way.
///
/// Deterministic given the equation order. On structurally deficient
/// input (some equations cannot be assigned distinct variables at any
/// derivative order) returns Deficient with the offending equations;
/// if the derivative cap is hit first, CapExceeded.
SsResult ss_matching(const std::vector<Equation>& equations,
                     const std::set<std::string>& unknown_bases,
                     const SsOptions& opts = {});

} // namespace hsa
