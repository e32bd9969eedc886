#include <cmath>
#include <vector>

#include "doctest.h"
#include "gencourant/errors.hpp"
#include "gencourant/matrix.hpp"
#include "gencourant/random.hpp"
#include "gencourant/sampling.hpp"
#include "gencourant/tensor.hpp"

using namespace gencourant;
using V = Variance;

namespace {

double max_diff(const TensorField& a, const TensorField& b) {
    std::vector<Expr> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a.components()[i] - b.components()[i]);
    return worst(d, *a.chart()).max_abs;
}

double max_abs(const TensorField& a) { return worst(a.components(), *a.chart()).max_abs; }

TensorField rand_field(Rng& rng, ChartPtr c, std::vector<V> slots) {
    TensorField t(c, std::move(slots));
    for (auto& e : t.components()) e = random_polynomial(rng, c->dim(), 2, 1.0);
    return t;
}

TensorField metric_diag(ChartPtr c, std::vector<const char*> d) {
    TensorField g = TensorField::uniform(c, 2, V::Down);
    for (int i = 0; i < c->dim(); ++i) g(i, i) = parse_expr(d[static_cast<std::size_t>(i)], *c);
    return g;
}

}  // namespace

TEST_CASE("tensor_product") {
    auto c1 = make_chart(1);
    TensorField dx = TensorField::covector(c1, {Expr(1.0)});
    TensorField p = tensor_product(dx, dx);
    CHECK(p.rank() == 2);
    CHECK(p(0, 0).is_one());

    auto c = make_chart(2);
    Rng rng(1);
    TensorField b = rand_field(rng, c, {V::Down, V::Up});
    TensorField z(c, {V::Up});
    CHECK(max_abs(tensor_product(z, b)) == 0.0);
    TensorField g = metric_diag(c, {"1 + x1^2", "2"});
    TensorField two_g = tensor_product(TensorField::scalar(c, Expr(2.0)), g);
    CHECK(max_diff(two_g, 2.0 * g) == 0.0);
    CHECK_THROWS_AS(tensor_product(g, TensorField::scalar(make_chart(3), Expr(1.0))), ChartMismatch);
}

TEST_CASE("contract") {
    auto c = make_chart(3);
    TensorField id(c, {V::Up, V::Down});
    for (int i = 0; i < 3; ++i) id(i, i) = Expr(1.0);
    TensorField tr = contract(id, 0, 1);
    CHECK(tr.rank() == 0);
    CHECK(evaluate(tr.value(), std::vector<double>{0, 0, 0}) == 3.0);

    Rng rng(2);
    TensorField v = rand_field(rng, c, {V::Up});
    TensorField xi = rand_field(rng, c, {V::Down});
    Expr direct = v(0) * xi(0) + v(1) * xi(1) + v(2) * xi(2);
    CHECK(worst(contract(tensor_product(v, xi), 0, 1).value() - direct, *c).max_abs < 1e-14);
    CHECK(max_abs(contract(TensorField(c, {V::Up, V::Down}), 0, 1)) == 0.0);
    CHECK_THROWS_AS(contract(id, 1, 0), SlotError);
    CHECK_THROWS_AS(contract(id, 0, 2), SlotError);
}

TEST_CASE("property: double contraction is order independent") {
    auto c = make_chart(2, 9);
    Rng rng(3);
    for (int t = 0; t < 5; ++t) {
        TensorField r4 = rand_field(rng, c, {V::Up, V::Down, V::Up, V::Down});
        TensorField a = contract(contract(r4, 0, 1), 0, 1);
        TensorField b = contract(contract(r4, 2, 3), 0, 1);
        CHECK(max_diff(a, b) < 1e-12);
        TensorField x = contract(contract(r4, 0, 3), 1, 0);
        TensorField y = contract(contract(r4, 2, 1), 0, 1);
        CHECK(max_diff(x, y) < 1e-12);
    }
}

TEST_CASE("raise and lower") {
    auto c = make_chart(2);
    TensorField flat = metric_diag(c, {"1", "1"});
    TensorField xi = TensorField::covector(c, {parse_expr("x1*x2", *c), parse_expr("sin(x1)", *c)});
    CHECK(max_diff(raise_index(xi, inverse_metric(flat), 0), TensorField::vector(c, xi.components())) == 0.0);

    TensorField g = metric_diag(c, {"2", "1"});
    TensorField dx1 = TensorField::covector(c, {Expr(1.0), Expr()});
    TensorField v = raise_index(dx1, inverse_metric(g), 0);
    CHECK(v.variance(0) == V::Up);
    CHECK(evaluate(v(0), std::vector<double>{0.1, 0.2}) == doctest::Approx(0.5));
    CHECK(evaluate(v(1), std::vector<double>{0.1, 0.2}) == 0.0);

    TensorField sing = metric_diag(c, {"1", "0"});
    CHECK_THROWS_AS(inverse_metric(sing), SingularMetric);
    CHECK_THROWS_AS(raise_index(xi, TensorField(c, {V::Up, V::Up}), 0), SingularMetric);
    CHECK_THROWS_AS(raise_index(v, inverse_metric(g), 0), SlotError);
}

TEST_CASE("property: lower then raise is the identity") {
    auto c = make_chart(3, 4);
    Rng rng(4);
    TensorField g = TensorField::uniform(c, 2, V::Down);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Expr e = random_polynomial(rng, 3, 2, 0.05);
            if (i == j) e = e + 1.0;
            g(i, j) = e;
            g(j, i) = e;
        }
    TensorField gi = inverse_metric(g);
    for (int t = 0; t < 3; ++t) {
        TensorField f = rand_field(rng, c, {V::Down, V::Up, V::Down});
        CHECK(max_diff(raise_index(lower_index(f, g, 1), gi, 1), f) < 1e-12);
        CHECK(max_diff(lower_index(raise_index(f, gi, 2), g, 2), f) < 1e-12);
    }
}

TEST_CASE("antisymmetrize and symmetrize") {
    auto c = make_chart(2);
    TensorField dx = TensorField::covector(c, {Expr(1.0), Expr()});
    TensorField dy = TensorField::covector(c, {Expr(), Expr(1.0)});
    TensorField w = tensor_product(dx, dy) - tensor_product(dy, dx);
    CHECK(max_diff(antisymmetrize(w), w) == 0.0);

    Rng rng(5);
    TensorField s = rand_field(rng, c, {V::Down, V::Down});
    s = symmetrize(s);
    CHECK(max_abs(antisymmetrize(s)) < 1e-15);
    TensorField r = rand_field(rng, c, {V::Up, V::Up, V::Up});
    CHECK(max_diff(symmetrize(symmetrize(r)), symmetrize(r)) < 1e-14);
    CHECK(max_diff(antisymmetrize(antisymmetrize(r)), antisymmetrize(r)) < 1e-14);
    CHECK_THROWS_AS(antisymmetrize(TensorField(c, {V::Up, V::Down})), SlotError);
}

TEST_CASE("property: antisymmetrized fields flip sign under transpositions") {
    auto c = make_chart(3, 2);
    Rng rng(6);
    for (int t = 0; t < 3; ++t) {
        TensorField a = antisymmetrize(rand_field(rng, c, {V::Down, V::Down, V::Down}));
        CHECK(max_diff(permute(a, {1, 0, 2}), -1.0 * a) < 1e-12);
        CHECK(max_diff(permute(a, {0, 2, 1}), -1.0 * a) < 1e-12);
        CHECK(max_diff(permute(a, {2, 1, 0}), -1.0 * a) < 1e-12);
        CHECK_NOTHROW(check_antisymmetric(a));
    }
    CHECK_THROWS_AS(check_antisymmetric(rand_field(rng, c, {V::Down, V::Down})), NotAntisymmetric);
}

TEST_CASE("coordinate_gradient") {
    auto c1 = make_chart(1);
    TensorField k = TensorField::scalar(c1, Expr(3.0));
    CHECK(max_abs(coordinate_gradient(k)) == 0.0);
    TensorField s = TensorField::scalar(c1, parse_expr("x1^2", *c1));
    TensorField ds = coordinate_gradient(s);
    CHECK_FALSE(ds.tensorial());
    CHECK(ds.variance(0) == V::Down);
    CHECK(evaluate(ds(0), std::vector<double>{0.75}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(contract(ds, 0, 0), SlotError);

    auto c = make_chart(2);
    TensorField f = TensorField::scalar(c, parse_expr("sin(x1*x2)*exp(x2)", *c));
    TensorField dd = coordinate_gradient(coordinate_gradient(f));
    CHECK(worst(dd(0, 1) - dd(1, 0), *c).max_abs < 1e-14);
}

TEST_CASE("exterior derivative squares to zero") {
    auto c = make_chart(3, 1);
    Rng rng(8);
    TensorField a = TensorField::uniform(c, 1, V::Down);
    for (auto& e : a.components()) e = random_safe_expr(rng, 3, 3);
    TensorField da = exterior_derivative(a);
    CHECK_NOTHROW(check_antisymmetric(da));
    CHECK(max_abs(exterior_derivative(da)) < 1e-12);
}

TEST_CASE("symbolic inverse") {
    auto c = make_chart(3, 5);
    Rng rng(9);
    ExprMatrix m(3, 3);
    for (auto& e : m.a) e = random_polynomial(rng, 3, 1, 1.0);
    for (int i = 0; i < 3; ++i) m(i, i) = m(i, i) + 4.0;
    ExprMatrix p = m * inverse(m);
    std::vector<Expr> res;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) res.push_back(p(i, j) - (i == j ? 1.0 : 0.0));
    CHECK(worst(res, *c).max_abs < 1e-13);
}
