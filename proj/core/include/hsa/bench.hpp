#pragma once

#include "hsa/generator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hsa {

/// Wall-clock comparison of the three analysis paths at one grid point;
/// times are medians over the configured repeats.
struct BenchRow {
    std::uint64_t seed = 0;
    int n_total = 0; ///< flattened node count of the generated model
    int k = 0;
    double r = 0.0;
    std::string kind;
    double t_flat_ms = 0.0;
    double t_hier_cold_ms = 0.0;
    double t_hier_warm_ms = 0.0;
    double achieved_r = 0.0;
};

struct BenchConfig {
    std::vector<GenParams> grid;
    int repeats = 5;
};

/// Generate and time each grid point. Per repeat: the flattened path
/// (flattening included, parsing excluded — the model is already in
/// memory), the hierarchical path on a cold cache, and the hierarchical
/// path again on the cache the cold run filled. Grid points run
/// sequentially for stable timing.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

/// CSV rendering with the mandatory header row
/// "seed,n_total,k,r,kind,t_flat_ms,t_hier_cold_ms,t_hier_warm_ms,achieved_r".
std::string bench_to_csv(const std::vector<BenchRow>& rows);

} // namespace hsa
