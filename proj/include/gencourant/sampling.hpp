#pragma once

#include <span>
#include <string>
#include <vector>

#include "gencourant/chart.hpp"
#include "gencourant/expr.hpp"

namespace gencourant {

struct Worst {
    double max_abs = 0.0;
    int point_index = -1;
    std::vector<double> point;
};

// Largest absolute value of any expression over the chart's sample points.
Worst worst(std::span<const Expr> exprs, const Chart& chart);
Worst worst(std::span<const Expr> exprs, const std::vector<std::vector<double>>& points);
Worst worst(const Expr& e, const Chart& chart);

// Values of each expression at each sample point: result[p][i].
std::vector<std::vector<double>> sample(std::span<const Expr> exprs, const Chart& chart);

}  // namespace gencourant
