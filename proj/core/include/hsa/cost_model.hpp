#pragma once

#include <string>
#include <vector>

namespace hsa {

/// Closed-form operation-count estimates for the analysis paths, in
/// abstract node-visit units. `c` is the average number of edges per
/// node; all evaluators are monotone nondecreasing in every size input.

/// One component decomposition over n nodes: maximum matching plus the
/// feasible-path sweep, n^{5/2} + (2c+3)n.
double cost_component(double n, double c);

/// Dynamic-model component decomposition: augmentation dominates,
/// n^3 + (2c+3)n.
double cost_component_dae(double n, double c);

/// Size statistics of one hierarchical model, the inputs the estimates
/// are evaluated on.
struct CostStats {
    std::vector<double> n_i; ///< node count per component
    std::vector<double> u_i; ///< under-constrained node count per component
    double n0 = 0.0;         ///< the root's own node count
    double c = 6.0;          ///< average edges per node
};

enum class CostKind {
    Component, ///< sum of per-component decompositions
    Total,     ///< cold hierarchical run: components + dummy-model analysis
    Reuse,     ///< warm hierarchical run: dummy-model analysis only
    Flattened, ///< the flattened reference path
};

/// Evaluate one estimate:
///   Component  sum_i [ n_i^{5/2} + (2c+3) n_i ]
///   Total      sum_i n_i^{5/2} + c * sum_i n_i + (n0 + sum_i u_i)^{5/2}
///   Reuse      (n0 + sum_i u_i)^{5/2} + c * sum_i u_i
///   Flattened  (n0 + sum_i n_i)^{5/2} + (n0 + sum_i n_i)
double predict_cost(const CostStats& s, CostKind which);

/// One point of the analytic comparison curves.
struct CurvePoint {
    double n = 0, k = 0, r = 0;
    double c_total = 0, c_reuse = 0, c_flattened = 0;
};

/// Evaluate the three estimates over a (n, k, r) grid with fixed c0,
/// mapping each grid point to k+1 equal blocks: n_i = n0 = n/(k+1),
/// u_i = r * n_i.
std::vector<CurvePoint> cost_curves(const std::vector<double>& ns = {100, 1000, 10000},
                                    const std::vector<double>& ks = {2, 10, 50},
                                    const std::vector<double>& rs = {0.01, 0.1, 0.3},
                                    double c0 = 6.0);

/// Render curve points as CSV with header "n,k,r,c_total,c_reuse,c_flattened".
std::string curves_to_csv(const std::vector<CurvePoint>& points);

} // namespace hsa
