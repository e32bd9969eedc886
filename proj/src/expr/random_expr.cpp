#include <vector>

#include "gencourant/random.hpp"

namespace gencourant {

Expr random_safe_expr(Rng& rng, int dim, int depth) {
    if (depth <= 0 || rng.uniform() < 0.2) {
        if (rng.uniform() < 0.35) return Expr(rng.uniform(-2.0, 2.0));
        return Expr::symbol(rng.integer(0, dim - 1));
    }
    switch (rng.integer(0, 7)) {
        case 0: return neg(random_safe_expr(rng, dim, depth - 1));
        case 1:
        case 2: return add({random_safe_expr(rng, dim, depth - 1), random_safe_expr(rng, dim, depth - 1)});
        case 3:
        case 4: return mul({random_safe_expr(rng, dim, depth - 1), random_safe_expr(rng, dim, depth - 1)});
        case 5: return pow(random_safe_expr(rng, dim, depth - 1), rng.integer(2, 3));
        case 6: return rng.uniform() < 0.5 ? sin(random_safe_expr(rng, dim, depth - 1))
                                            : cos(random_safe_expr(rng, dim, depth - 1));
        default: return exp(mul({Expr(0.5), random_safe_expr(rng, dim, depth - 1)}));
    }
}

namespace {

void monomials(int dim, int degree, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    out.push_back(cur);
    if (static_cast<int>(cur.size()) == degree) return;
    for (int k = start; k < dim; ++k) {
        cur.push_back(k);
        monomials(dim, degree, k, cur, out);
        cur.pop_back();
    }
}

}  // namespace

Expr random_polynomial(Rng& rng, int dim, int degree, double scale) {
    std::vector<std::vector<int>> mons;
    std::vector<int> cur;
    monomials(dim, degree, 0, cur, mons);
    std::vector<Expr> terms;
    for (const auto& m : mons) {
        std::vector<Expr> f{Expr(rng.uniform(-scale, scale))};
        for (int k : m) f.push_back(Expr::symbol(k));
        terms.push_back(mul(std::move(f)));
    }
    return add(std::move(terms));
}

}  // namespace gencourant
