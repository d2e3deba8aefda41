#pragma once

#include "hsa/analysis.hpp"
#include "hsa/model.hpp"
#include "hsa/report.hpp"

#include <string>
#include <vector>

namespace hsa {

/// Analyze the flattened (component-free) expansion of the registry's
/// root model, skipping the hierarchical machinery entirely. This is the
/// reference path the component-wise analysis is checked against.
AnalysisReport analyze_flat(const ModelRegistry& reg, const AnalysisOptions& opts = {});

/// Outcome of comparing the hierarchical analysis against the flattened
/// reference. Each mismatch is one self-contained clause naming the
/// disagreeing quantity and both values.
struct EquivalenceResult {
    bool equivalent = true;
    std::vector<std::string> mismatches;
};

/// Compare the two analysis paths on the same model.
///
/// Algebraic models must agree exactly: verdict, over-constrained
/// equation and variable sets, and under-constrained node sets. Dynamic
/// models must agree on verdict, deficiency, presence of an over part,
/// and degrees of freedom, and every hierarchically exposed variable must
/// lie in the flattened under part (the augmented node sets themselves
/// may differ by differentiation route). When the hierarchical side
/// excluded a broken component, only the verdict is comparable.
EquivalenceResult check_equivalence(const AnalysisReport& hier, const AnalysisReport& flat);

} // namespace hsa
