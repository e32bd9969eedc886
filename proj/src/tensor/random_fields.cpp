#include "gencourant/random.hpp"

namespace gencourant {

TensorField random_metric(Rng& rng, ChartPtr chart, double strength) {
    int n = chart->dim();
    // Number of monomials of degree <= 2 in n variables.
    double monomials = 1.0 + n + n * (n + 1) / 2.0;
    double scale = strength * 0.9 / (n * monomials);
    TensorField g = TensorField::uniform(chart, 2, Variance::Down);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Expr e = random_polynomial(rng, n, 2, scale);
            if (i == j) e = e + 1.0;
            g(i, j) = e;
            g(j, i) = e;
        }
    return g;
}

TensorField random_field(Rng& rng, ChartPtr chart, std::vector<Variance> slots, int degree, double scale) {
    int n = chart->dim();
    TensorField t(chart, std::move(slots));
    for (auto& e : t.components()) e = random_polynomial(rng, n, degree, scale);
    return t;
}

TensorField random_form(Rng& rng, ChartPtr chart, int p, int degree, double scale) {
    TensorField t = random_field(rng, chart, std::vector<Variance>(static_cast<std::size_t>(p), Variance::Down),
                                 degree, scale);
    return antisymmetrize(t);
}

}  // namespace gencourant
