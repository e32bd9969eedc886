#include "gencourant/sampling.hpp"

#include <cmath>

namespace gencourant {

Worst worst(std::span<const Expr> exprs, const std::vector<std::vector<double>>& points) {
    Worst w;
    if (exprs.empty()) return w;
    Evaluator ev(exprs);
    std::vector<double> out;
    for (std::size_t p = 0; p < points.size(); ++p) {
        ev.run(points[p], out);
        for (double v : out) {
            double a = std::isnan(v) ? INFINITY : std::fabs(v);
            if (w.point_index < 0 || a > w.max_abs) {
                w.max_abs = a;
                w.point_index = static_cast<int>(p);
                w.point = points[p];
            }
        }
    }
    return w;
}

Worst worst(std::span<const Expr> exprs, const Chart& chart) { return worst(exprs, chart.sample_points()); }

Worst worst(const Expr& e, const Chart& chart) { return worst(std::span<const Expr>(&e, 1), chart); }

std::vector<std::vector<double>> sample(std::span<const Expr> exprs, const Chart& chart) {
    Evaluator ev(exprs);
    std::vector<std::vector<double>> r;
    for (const auto& p : chart.sample_points()) {
        std::vector<double> out;
        ev.run(p, out);
        r.push_back(std::move(out));
    }
    return r;
}

}  // namespace gencourant
