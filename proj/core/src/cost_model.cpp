#include "hsa/cost_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace hsa {

namespace {

double pow52(double n) { return std::pow(n, 2.5); }

double sum(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0);
}

} // namespace

double cost_component(double n, double c) { return pow52(n) + (2.0 * c + 3.0) * n; }

double cost_component_dae(double n, double c) { return n * n * n + (2.0 * c + 3.0) * n; }

double predict_cost(const CostStats& s, CostKind which) {
    const double sum_n = sum(s.n_i);
    const double sum_u = sum(s.u_i);
    const double dummy_nodes = s.n0 + sum_u;
    switch (which) {
    case CostKind::Component: {
        double total = 0.0;
        for (double n : s.n_i) total += cost_component(n, s.c);
        return total;
    }
    case CostKind::Total: {
        double total = 0.0;
        for (double n : s.n_i) total += pow52(n);
        return total + s.c * sum_n + pow52(dummy_nodes);
    }
    case CostKind::Reuse:
        return pow52(dummy_nodes) + s.c * sum_u;
    case CostKind::Flattened: {
        const double n_total = s.n0 + sum_n;
        return pow52(n_total) + n_total;
    }
    }
    return 0.0;
}

std::vector<CurvePoint> cost_curves(const std::vector<double>& ns, const std::vector<double>& ks,
                                    const std::vector<double>& rs, double c0) {
    std::vector<CurvePoint> points;
    for (double n : ns) {
        for (double k : ks) {
            for (double r : rs) {
                const double block = n / (k + 1.0);
                CostStats s;
                s.n_i.assign(static_cast<std::size_t>(k), block);
                s.u_i.assign(static_cast<std::size_t>(k), r * block);
                s.n0 = block;
                s.c = c0;

                CurvePoint pt;
                pt.n = n;
                pt.k = k;
                pt.r = r;
                pt.c_total = predict_cost(s, CostKind::Total);
                pt.c_reuse = predict_cost(s, CostKind::Reuse);
                pt.c_flattened = predict_cost(s, CostKind::Flattened);
                points.push_back(pt);
            }
        }
    }
    return points;
}

std::string curves_to_csv(const std::vector<CurvePoint>& points) {
    std::ostringstream out;
    out.precision(10);
    out << "n,k,r,c_total,c_reuse,c_flattened\n";
    for (const CurvePoint& p : points) {
        out << p.n << ',' << p.k << ',' << p.r << ',' << p.c_total << ',' << p.c_reuse << ','
            << p.c_flattened << '\n';
    }
    return out.str();
}

} // namespace hsa
