#include "hsa/bench.hpp"

#include "hsa/analysis.hpp"
#include "hsa/flat_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace hsa {

namespace {

using clock_type = std::chrono::steady_clock;

double median(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    if (xs.size() % 2 == 1) return xs[mid];
    return (xs[mid - 1] + xs[mid]) / 2.0;
}

template <typename F> double time_ms(F&& body) {
    const auto t0 = clock_type::now();
    body();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double meta_achieved_r(const ModelRegistry& reg) {
    if (reg.meta_json.empty()) return 0.0;
    auto meta = nlohmann::json::parse(reg.meta_json, nullptr, false);
    if (meta.is_discarded()) return 0.0;
    return meta.value("generator", nlohmann::json::object()).value("achieved_r", 0.0);
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    rows.reserve(cfg.grid.size());
    const int repeats = std::max(1, cfg.repeats);

    for (const GenParams& p : cfg.grid) {
        ModelRegistry reg = generate_model(p);
        FlatModel flat = flatten(reg.root_def(), reg);

        BenchRow row;
        row.seed = p.seed;
        row.n_total = static_cast<int>(flat.variables.size() + flat.equations.size());
        row.k = p.k;
        row.r = p.r;
        row.kind = to_string(p.kind);
        row.achieved_r = meta_achieved_r(reg);

        AnalysisOptions opts;
        opts.collect_timings = false;

        std::vector<double> t_flat, t_cold, t_warm;
        for (int rep = 0; rep < repeats; ++rep) {
            t_flat.push_back(time_ms([&] { analyze_flat(reg, opts); }));

            DecompositionCache cache;
            t_cold.push_back(time_ms([&] { analyze(reg, cache, opts); }));
            // Same cache again: every definition is now precomputed.
            t_warm.push_back(time_ms([&] { analyze(reg, cache, opts); }));
        }
        row.t_flat_ms = median(std::move(t_flat));
        row.t_hier_cold_ms = median(std::move(t_cold));
        row.t_hier_warm_ms = median(std::move(t_warm));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    auto fixed6 = [](double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", x);
        return std::string(buf);
    };
    std::ostringstream out;
    out.precision(6);
    out << "seed,n_total,k,r,kind,t_flat_ms,t_hier_cold_ms,t_hier_warm_ms,achieved_r\n";
    for (const BenchRow& r : rows) {
        out << r.seed << ',' << r.n_total << ',' << r.k << ',' << r.r << ',' << r.kind << ','
            << fixed6(r.t_flat_ms) << ',' << fixed6(r.t_hier_cold_ms) << ','
            << fixed6(r.t_hier_warm_ms) << ',' << fixed6(r.achieved_r) << '\n';
    }
    return out.str();
}

} // namespace hsa
