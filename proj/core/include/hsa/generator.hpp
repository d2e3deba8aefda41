#pragma once

#include "hsa/model.hpp"

#include <cstdint>

namespace hsa {

/// Parameters of the random hierarchical model generator.
struct GenParams {
    int n_per_component = 100; ///< node budget (variables + equations) per definition
    int k = 4;                 ///< component instances directly under the root
    double r = 0.1;            ///< target under-constrained node ratio u/n per definition
    double c0 = 6.0;           ///< target average number of edges per equation
    int levels = 2;            ///< hierarchy depth; 1 generates a primary model
    ModelKind kind = ModelKind::Nlae;
    std::uint64_t seed = 1;
};

/// Generate a random hierarchical model, deterministic in `seed`.
///
/// Every definition is built as a square well-constrained core (one
/// equation per core variable, wired by a random permutation) plus an
/// appended variable chain that forms its under-constrained part, sized
/// so that roughly r of the definition's nodes are under-constrained.
/// Extra random edges raise the mean equation size towards c0, drawn
/// only from pools that provably leave the core well-constrained and
/// the chain under-constrained (no edge ever runs from a core equation
/// to a chain variable). Components therefore have empty over parts by
/// construction, and every enclosing definition pins the exposed chain
/// head of each of its components with a coupling equation, so the
/// model as a whole is well-posed.
///
/// For levels > 2 each branch below the root is a chain of definitions
/// of the given depth. The DAE kind additionally assigns random
/// derivative orders (at most 2) to occurrences, which leaves the
/// order-collapsed structure — and hence the partition guarantees —
/// unchanged.
///
/// The registry's meta records the parameters and the achieved
/// under-constrained ratio. Throws ModelError on unsatisfiable
/// parameters.
ModelRegistry generate_model(const GenParams& p);

} // namespace hsa
