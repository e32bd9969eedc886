#include <doctest.h>

#include "gencourant/errors.hpp"
#include "gencourant/gconn.hpp"
#include "gencourant/qla.hpp"
#include "gencourant/random.hpp"
#include "gencourant/sampling.hpp"
#include "support.hpp"

using namespace gencourant;

namespace {

double max_abs(const std::vector<Expr>& e, const Chart& c) { return worst(e, c).max_abs; }

double max_diff(const TensorField& a, const TensorField& b) { return max_abs((a - b).components(), *a.chart()); }

double max_diff(const FrameTensor& a, const FrameTensor& b) { return max_abs((a - b).components(), *a.chart()); }

double max_abs(const FrameTensor& t) { return max_abs(t.components(), *t.chart()); }

// Random (3,0) or (0,3) field skew in its last two slots with J_a = 0.
TensorField rand_param(Rng& rng, ChartPtr chart, Variance v, int degree = 1, double scale = 0.4) {
    auto t = random_field(rng, chart, {v, v, v}, degree, scale);
    const int last_two[] = {1, 2};
    auto s = antisymmetrize(t, last_two);
    return s - antisymmetrize(s);
}

ConnParams rand_params(Rng& rng, ChartPtr chart, int degree = 1) {
    return validate_params(rand_param(rng, chart, Variance::Up, degree), rand_param(rng, chart, Variance::Down, degree));
}

TensorField rand_three_form(Rng& rng, ChartPtr chart) {
    // Closed: on n = 3 every 3-form is; otherwise take d of a 2-form.
    if (chart->dim() == 3) return random_form(rng, chart, 3, 1, 0.7);
    return exterior_derivative(random_form(rng, chart, 2, 2, 0.5));
}

// Frame matrix of tau(X, xi) = (g^-1 xi, g X): column B holds tau(e_B).
ExprMatrix tau_matrix(const Metric& m) {
    int n = m.dim();
    ExprMatrix t(2 * n, 2 * n);
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            t(n + c, b) = m.g()(b, c);
            t(c, n + b) = m.inv()(b, c);
        }
    return t;
}

Expr contract3(const FrameTensor& T, const std::vector<Expr>& a, const std::vector<Expr>& b, const std::vector<Expr>& c) {
    int N = T.frame_rank();
    std::vector<Expr> t;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) t.push_back(T(A, B, C) * a[A] * b[B] * c[C]);
    return add(std::move(t));
}

Expr contract4(const FrameTensor& T, const std::vector<std::vector<Expr>>& v) {
    int N = T.frame_rank();
    std::vector<Expr> t;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D) t.push_back(T(A, B, C, D) * v[0][A] * v[1][B] * v[2][C] * v[3][D]);
    return add(std::move(t));
}

struct Background {
    ChartPtr chart;
    TensorField g;
    TensorField Hp;
    Metric m;
};

Background background(std::uint64_t seed, int n, double strength = 0.4) {
    Rng rng(seed);
    auto chart = make_chart(n, seed, 8);
    auto g = random_metric(rng, chart, strength);
    auto Hp = rand_three_form(rng, chart);
    return {chart, g, Hp, Metric(g)};
}

}  // namespace

TEST_CASE("standard frame reproduces the twisted Dorfman bracket") {
    Rng rng(11);
    auto chart = make_chart(3, 11, 8);
    auto H = random_form(rng, chart, 3, 2, 0.8);
    auto frame = CourantFrame::standard(H);
    for (int trial = 0; trial < 3; ++trial) {
        auto a = random_section(rng, chart);
        auto b = random_section(rng, chart);
        auto lhs = frame.bracket(to_frame(a), to_frame(b));
        auto rhs = to_frame(dorfman(a, b, H));
        std::vector<Expr> d;
        for (std::size_t i = 0; i < lhs.size(); ++i) d.push_back(lhs[i] - rhs[i]);
        CHECK(max_abs(d, *chart) < 1e-11);
        CHECK(max_abs({frame.pairing(to_frame(a), to_frame(b)) - pairing(a, b)}, *chart) < 1e-12);
    }
    auto chart4 = make_chart(4, 1, 8);
    TensorField bad = TensorField::uniform(chart4, 3, Variance::Down);
    auto x4 = Expr::symbol(3);
    const int p[3] = {0, 1, 2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int s = (p[i] - p[j]) * (p[j] - p[k]) * (p[k] - p[i]);
                if (s != 0) bad(i, j, k) = Expr(s > 0 ? 0.5 : -0.5) * x4;
            }
    CHECK_THROWS_AS(CourantFrame::standard(bad), NotClosed);
}

TEST_CASE("minimal connection: flat case and block structure") {
    auto chart = make_chart(3, 5, 8);
    auto flat = TensorField(chart, {Variance::Down, Variance::Down});
    for (int i = 0; i < 3; ++i) flat(i, i) = Expr(1.0);
    auto zero = TensorField::uniform(chart, 3, Variance::Down);
    auto c0 = minimal_connection(flat, zero);
    for (const auto& e : c0.coefficients()) CHECK(e.is_zero());

    auto bg = background(21, 3);
    auto minimal = minimal_connection(bg.m, bg.Hp);
    auto lc = lc_block_connection(bg.m, bg.Hp);
    auto viaH = lc.plus(minimal_correction(bg.m, bg.Hp), Provenance::Minimal);
    std::vector<Expr> d;
    for (std::size_t i = 0; i < minimal.coefficients().size(); ++i)
        d.push_back(minimal.coefficients()[i] - viaH.coefficients()[i]);
    CHECK(max_abs(d, *bg.chart) < 1e-11);

    auto nonpd = flat;
    nonpd(2, 2) = Expr(-1.0);
    CHECK_THROWS_AS(minimal_connection(nonpd, zero), NotPositiveDefinite);
}

TEST_CASE("correction tensor satisfies its three conditions") {
    for (std::uint64_t seed : {3u, 4u}) {
        auto bg = background(seed, 3);
        int n = 3, N = 6;
        auto K = minimal_correction(bg.m, bg.Hp);
        auto tau = tau_matrix(bg.m);
        std::vector<Expr> c1, c2, c3;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int C = 0; C < N; ++C) {
                    c1.push_back(K(A, B, C) + K(A, C, B));
                    std::vector<Expr> t;
                    for (int E = 0; E < N; ++E) {
                        t.push_back(tau(E, C) * K(A, B, E));
                        t.push_back(tau(E, B) * K(A, C, E));
                    }
                    c2.push_back(add(std::move(t)));
                    Expr h = (A < n && B < n && C < n) ? bg.Hp(A, B, C) : Expr();
                    c3.push_back(K(A, B, C) + K(B, C, A) + K(C, A, B) + h);
                }
        CHECK(max_abs(c1, *bg.chart) < 1e-10);
        CHECK(max_abs(c2, *bg.chart) < 1e-10);
        CHECK(max_abs(c3, *bg.chart) < 1e-10);
    }
}

TEST_CASE("torsion of the block connection is rho*(H')") {
    auto bg = background(8, 3);
    int n = 3, N = 6;
    auto T = gualtieri_torsion(lc_block_connection(bg.m, bg.Hp));
    std::vector<Expr> vvv, rest, skew;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) {
                if (A < n && B < n && C < n)
                    vvv.push_back(T(A, B, C) - bg.Hp(A, B, C));
                else
                    rest.push_back(T(A, B, C));
                skew.push_back(T(A, B, C) + T(B, A, C));
                skew.push_back(T(A, B, C) + T(A, C, B));
            }
    CHECK(max_abs(vvv, *bg.chart) < 1e-10);
    CHECK(max_abs(rest, *bg.chart) < 1e-10);
    CHECK(max_abs(skew, *bg.chart) < 1e-12);
}

TEST_CASE("frame torsion agrees with the section-level definition") {
    Rng rng(44);
    auto chart = make_chart(3, 44, 6);
    auto g = random_metric(rng, chart, 0.3);
    auto Hp = random_form(rng, chart, 3, 1, 0.6);
    Metric m(g);
    // A compatible but torsionful connection exercises every term.
    auto conn = lc_block_connection(m, Hp);
    auto T = gualtieri_torsion(conn);
    const auto& fr = conn.frame();
    for (int trial = 0; trial < 2; ++trial) {
        auto a = to_frame(random_section(rng, chart, 1));
        auto b = to_frame(random_section(rng, chart, 1));
        auto c = to_frame(random_section(rng, chart, 1));
        auto ab = conn.covariant(a, b);
        auto ba = conn.covariant(b, a);
        auto br = fr.bracket(a, b);
        std::vector<Expr> u(ab.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = ab[i] - ba[i] - br[i];
        Expr direct = fr.pairing(u, c) + fr.pairing(conn.covariant(c, a), b);
        CHECK(max_abs({direct - contract3(T, a, b, c)}, *chart) < 1e-10);
    }
}

TEST_CASE("minimal connection is Levi-Civita") {
    for (int n : {3, 4}) {
        auto bg = background(30 + static_cast<std::uint64_t>(n), n, 0.3);
        auto conn = minimal_connection(bg.m, bg.Hp);
        CHECK(max_abs(gualtieri_torsion(conn)) < 1e-10);
        CHECK(conn.pairing_defect() < 1e-12);
        GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));
        CHECK(max_abs(metric_compat_residual(conn, G.block()), *bg.chart) < 1e-10);
        CHECK(conn.provenance() == Provenance::Minimal);
    }
}

TEST_CASE("validate_params") {
    Rng rng(2);
    auto chart = make_chart(3, 2, 8);
    auto zeroJ = TensorField::uniform(chart, 3, Variance::Up);
    auto zeroW = TensorField::uniform(chart, 3, Variance::Down);
    CHECK_NOTHROW(validate_params(zeroJ, zeroW));

    auto alt = antisymmetrize(random_field(rng, chart, {Variance::Down, Variance::Down, Variance::Down}));
    CHECK_THROWS_AS(validate_params(zeroJ, alt), CyclicConstraintViolated);
    auto p = validate_params(zeroJ, alt, ParamPolicy::Project);
    CHECK(max_abs(p.W.components(), *chart) < 1e-12);

    auto raw = random_field(rng, chart, {Variance::Up, Variance::Up, Variance::Up});
    CHECK_THROWS_AS(validate_params(raw, zeroW), NotAntisymmetric);
    CHECK_THROWS_AS(validate_params(zeroW, zeroW), SlotError);

    auto g = random_metric(rng, chart, 0.5);
    auto phi = random_polynomial(rng, 3, 2, 0.7);
    auto dp = dilaton_params(Metric(g), phi);
    CHECK_NOTHROW(validate_params(dp.J, dp.W));

    // A valid parameter pair survives projection unchanged.
    auto q = rand_params(rng, chart);
    auto q2 = validate_params(q.J, q.W, ParamPolicy::Project);
    CHECK(max_diff(q.J, q2.J) < 1e-12);
    CHECK(max_diff(q.W, q2.W) < 1e-12);
}

TEST_CASE("parameter family stays Levi-Civita") {
    auto bg = background(51, 3, 0.3);
    Rng rng(51);
    auto base = minimal_connection(bg.m, bg.Hp);
    auto same = with_params(base, bg.m, ConnParams::zero(bg.chart));
    for (std::size_t i = 0; i < base.coefficients().size(); ++i)
        CHECK(max_abs({same.coefficients()[i] - base.coefficients()[i]}, *bg.chart) < 1e-15);

    GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));
    for (int trial = 0; trial < 2; ++trial) {
        auto conn = with_params(base, bg.m, rand_params(rng, bg.chart, 2));
        CHECK(conn.provenance() == Provenance::Params);
        CHECK(max_abs(gualtieri_torsion(conn)) < 1e-10);
        CHECK(conn.pairing_defect() < 1e-12);
        CHECK(max_abs(metric_compat_residual(conn, G.block()), *bg.chart) < 1e-10);
    }
}

TEST_CASE("rank of the space of Levi-Civita differences") {
    RMatrix g2 = RMatrix::identity(2);
    CHECK(lc_difference_rank(g2) == 4);
    RMatrix g2b(2, 2);
    g2b(0, 0) = 2;
    g2b(0, 1) = 1;
    g2b(1, 0) = 1;
    g2b(1, 1) = Rational(3, 2);
    CHECK(lc_difference_rank(g2b) == 4);
    CHECK(lc_difference_rank(RMatrix::identity(3)) == 16);
    CHECK(lc_difference_rank(RMatrix::identity(1)) == 0);
}

TEST_CASE("frame of k_tensor solves the Levi-Civita constraints") {
    // K built from (J, W) is skew in its last two slots, has zero cyclic sum
    // and kills (V+, V-) pairs.
    Rng rng(61);
    auto chart = make_chart(3, 61, 8);
    auto g = random_metric(rng, chart, 0.4);
    Metric m(g);
    auto K = k_tensor(m, rand_params(rng, chart));
    GeneralizedMetric G(g, TensorField::uniform(chart, 2, Variance::Down));
    auto Pp = G.psi_matrix(1), Pm = G.psi_matrix(-1);
    int N = 6;
    std::vector<Expr> skew, cyc, block;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) {
                skew.push_back(K(A, B, C) + K(A, C, B));
                cyc.push_back(K(A, B, C) + K(B, C, A) + K(C, A, B));
            }
    for (int A = 0; A < N; ++A)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                std::vector<Expr> t;
                for (int B = 0; B < N; ++B)
                    for (int C = 0; C < N; ++C) t.push_back(K(A, B, C) * Pp(B, i) * Pm(C, j));
                block.push_back(add(std::move(t)));
            }
    CHECK(max_abs(skew, *chart) < 1e-12);
    CHECK(max_abs(cyc, *chart) < 1e-11);
    CHECK(max_abs(block, *chart) < 1e-11);
}

TEST_CASE("curvature of the flat minimal connection vanishes") {
    auto chart = make_chart(2, 1, 4);
    auto flat = TensorField(chart, {Variance::Down, Variance::Down});
    for (int i = 0; i < 2; ++i) flat(i, i) = Expr(1.0);
    GenCurvature c(minimal_connection(flat, TensorField::uniform(chart, 3, Variance::Down)));
    for (const auto& e : c.riemann().components()) CHECK(e.is_zero());
}

TEST_CASE("Riemann tensor symmetries and tensoriality") {
    auto bg = background(71, 3, 0.3);
    Rng rng(71);
    auto conn = with_params(minimal_connection(bg.m, bg.Hp), bg.m, rand_params(rng, bg.chart));
    GenCurvature curv(conn);
    const auto& R = curv.riemann();
    int N = 6;
    std::vector<Expr> s1, s2, s3, s4;
    for (int D = 0; D < N; ++D)
        for (int C = 0; C < N; ++C)
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B) {
                    s1.push_back(R(D, C, A, B) + R(D, C, B, A));
                    s2.push_back(R(D, C, A, B) + R(C, D, A, B));
                    s3.push_back(R(D, C, A, B) - R(B, A, C, D));
                    s4.push_back(R(D, C, A, B) - R(A, B, D, C));
                }
    CHECK(max_abs(s1, *bg.chart) < 1e-9);
    CHECK(max_abs(s2, *bg.chart) < 1e-9);
    CHECK(max_abs(s3, *bg.chart) < 1e-9);
    CHECK(max_abs(s4, *bg.chart) < 1e-9);

    // Section-level definition on polynomial sections of degree 1.
    const auto& fr = conn.frame();
    std::vector<std::vector<Expr>> v;
    for (int i = 0; i < 4; ++i) v.push_back(to_frame(random_section(rng, bg.chart, 1)));
    const auto &phi1 = v[0], &phi = v[1], &psi = v[2], &psi1 = v[3];
    auto r0 = [&](const std::vector<Expr>& p1, const std::vector<Expr>& p, const std::vector<Expr>& a,
                  const std::vector<Expr>& b) {
        auto t1 = conn.covariant(a, conn.covariant(b, p));
        auto t2 = conn.covariant(b, conn.covariant(a, p));
        auto t3 = conn.covariant(fr.bracket(a, b), p);
        std::vector<Expr> w(t1.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = t1[i] - t2[i] - t3[i];
        return fr.pairing(w, p1);
    };
    std::vector<Expr> third;
    for (int L = 0; L < N; ++L) {
        std::vector<Expr> eL(static_cast<std::size_t>(N)), eD(static_cast<std::size_t>(N));
        eL[static_cast<std::size_t>(L)] = Expr(1.0);
        eD[static_cast<std::size_t>(dual_index(L, 3))] = Expr(1.0);
        third.push_back(fr.pairing(conn.covariant(eL, psi), psi1) * fr.pairing(conn.covariant(eD, phi), phi1));
    }
    Expr direct = 0.5 * (r0(phi1, phi, psi, psi1) + r0(psi1, psi, phi, phi1) + add(std::move(third)));
    CHECK(max_abs({direct - contract4(R, {phi1, phi, psi, psi1})}, *bg.chart) < 1e-9);
}

TEST_CASE("algebraic Bianchi identity") {
    auto bg = background(81, 3, 0.3);
    Rng rng(81);
    int N = 6;
    auto lhs = [N](const FrameTensor& R, int A, int B, int C, int D) {
        (void)N;
        return R(D, C, A, B) + R(D, A, B, C) + R(D, B, C, A);
    };
    SUBCASE("torsion-free") {
        auto conn = with_params(minimal_connection(bg.m, bg.Hp), bg.m, rand_params(rng, bg.chart));
        GenCurvature curv(conn);
        const auto& R = curv.riemann();
        std::vector<Expr> r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int C = 0; C < N; ++C)
                    for (int D = 0; D < N; ++D) r.push_back(lhs(R, A, B, C, D));
        CHECK(max_abs(r, *bg.chart) < 1e-9);
    }
    SUBCASE("with torsion") {
        // The bare block connection has a vanishing cyclic sum, so add a K.
        auto conn = lc_block_connection(bg.m, bg.Hp).plus(k_tensor(bg.m, rand_params(rng, bg.chart)), Provenance::Custom);
        GenCurvature curv(conn);
        const auto& R = curv.riemann();
        auto T = gualtieri_torsion(conn);
        auto dT = covariant_derivative(conn, T);
        auto tt = [&](int A, int B, int C, int D) {
            std::vector<Expr> s;
            for (int E = 0; E < N; ++E) s.push_back(T(B, C, E) * T(A, dual_index(E, 3), D));
            return dT(A, B, C, D) - add(std::move(s));
        };
        std::vector<Expr> r;
        double scale = 0.0;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int C = 0; C < N; ++C)
                    for (int D = 0; D < N; ++D) {
                        Expr rhs = 0.5 * (tt(A, B, C, D) + tt(B, C, A, D) + tt(C, A, B, D) - dT(D, A, B, C));
                        Expr l = lhs(R, A, B, C, D);
                        r.push_back(l - rhs);
                        scale = std::max(scale, worst(l, *bg.chart).max_abs);
                    }
        CHECK(scale > 1e-3);
        CHECK(max_abs(r, *bg.chart) < 1e-9);
    }
}

TEST_CASE("scalar curvatures of the minimal connection") {
    SUBCASE("flat R^3 with constant H'") {
        auto chart = make_chart(3, 9, 4);
        auto flat = TensorField(chart, {Variance::Down, Variance::Down});
        for (int i = 0; i < 3; ++i) flat(i, i) = Expr(1.0);
        double c = 1.5;
        auto Hp = TensorField::uniform(chart, 3, Variance::Down);
        int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
        for (int k = 0; k < 6; ++k) Hp(perm[k][0], perm[k][1], perm[k][2]) = Expr(k < 3 ? c : -c);
        GenCurvature curv(minimal_connection(flat, Hp));
        GeneralizedMetric G(flat, TensorField::uniform(chart, 2, Variance::Down));
        CHECK(max_abs({curv.scalar_G(G.block_inverse()) + Expr(c * c / 2)}, *chart) < 1e-12);
        CHECK(max_abs({curv.scalar_E()}, *chart) < 1e-12);
        // Classical side, computed only from the metric and H'.
        Metric m(flat);
        CHECK(max_abs({closed_scalar_G(m, Hp, ConnParams::zero(chart)) + Expr(c * c / 2)}, *chart) < 1e-12);
    }
    SUBCASE("random background") {
        auto bg = background(91, 3, 0.3);
        GenCurvature curv(minimal_connection(bg.m, bg.Hp));
        GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));
        CHECK(max_abs({curv.scalar_E()}, *bg.chart) < 1e-10);
        auto classical = curvature_package(bg.m).scalar - 0.5 * form_inner(bg.Hp, bg.Hp, bg.m);
        CHECK(max_abs({curv.scalar_G(G.block_inverse()) - classical}, *bg.chart) < 1e-9);
    }
}

TEST_CASE("scalar curvature closed forms for (J, W)") {
    for (std::uint64_t seed : {101u, 102u}) {
        auto bg = background(seed, 3, 0.3);
        Rng rng(seed);
        auto p = rand_params(rng, bg.chart);
        GenCurvature curv(with_params(minimal_connection(bg.m, bg.Hp), bg.m, p));
        GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));
        CHECK(max_abs({curv.scalar_E() - closed_scalar_E(bg.m, p)}, *bg.chart) < 1e-9);
        CHECK(max_abs({curv.scalar_G(G.block_inverse()) - closed_scalar_G(bg.m, bg.Hp, p)}, *bg.chart) < 1e-9);
        // Sanity: the closed forms are not trivially zero here.
        CHECK(worst(closed_scalar_E(bg.m, p), *bg.chart).max_abs > 1e-3);
    }
}

TEST_CASE("characteristic vector field and V tensor") {
    auto bg = background(111, 3, 0.3);
    Rng rng(111);
    auto minimal = minimal_connection(bg.m, bg.Hp);
    CHECK(max_abs(char_vf(minimal).components(), *bg.chart) < 1e-10);
    CHECK(max_abs(v_tensor(minimal).components(), *bg.chart) < 1e-10);

    auto p = rand_params(rng, bg.chart);
    auto conn = with_params(minimal, bg.m, p);
    auto tr = param_traces(bg.m, p);
    CHECK(max_diff(char_vf(conn), 2.0 * tr.J1) < 1e-10);
    auto V = v_tensor(conn);
    const auto& gi = bg.m.inv();
    auto expect = TensorField::uniform(bg.chart, 3, Variance::Up);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                std::vector<Expr> t;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c) t.push_back(p.W(a, b, c) * gi(a, i) * gi(b, j) * gi(c, k));
                expect(i, j, k) = add(std::move(t));
            }
    CHECK(max_diff(V, expect) < 1e-10);
}

TEST_CASE("dilaton connection") {
    Rng rng(121);
    auto chart = make_chart(3, 121, 8);
    auto g = random_metric(rng, chart, 0.3);
    auto B = random_form(rng, chart, 2, 2, 0.4);
    auto H = TensorField::uniform(chart, 3, Variance::Down);
    H = H + random_form(rng, chart, 3, 1, 0.4);
    auto phi = random_polynomial(rng, 3, 2, 0.6);
    auto conn = dilaton_connection(g, B, H, phi);
    CHECK(max_abs(char_vf(conn).components(), *chart) < 1e-10);
    GeneralizedMetric twisted(g, TensorField::uniform(chart, 2, Variance::Down));
    auto vt = v_trace(conn, twisted.h());
    for (int c = 0; c < 3; ++c) CHECK(max_abs({vt(c) - differentiate(phi, c)}, *chart) < 1e-10);

    // The trace survives the untwist since e^B fixes rho*.
    auto plain = untwist(conn, B);
    GeneralizedMetric Gb(g, B);
    auto vt2 = v_trace(plain, Gb.h());
    for (int c = 0; c < 3; ++c) CHECK(max_abs({vt2(c) - differentiate(phi, c)}, *chart) < 1e-10);

    auto constant = dilaton_connection(g, B, H, Expr(0.7));
    auto minimal = minimal_connection(g, H + exterior_derivative(B));
    std::vector<Expr> d;
    for (std::size_t i = 0; i < constant.coefficients().size(); ++i)
        d.push_back(constant.coefficients()[i] - minimal.coefficients()[i]);
    CHECK(max_abs(d, *chart) < 1e-12);

    auto line = make_chart(1, 1, 4);
    CHECK_THROWS_AS(dilaton_params(Metric(TensorField(line, {Variance::Down, Variance::Down}, {Expr(1.0)})), Expr::symbol(0)),
                    ValidationError);
}

TEST_CASE("untwist") {
    Rng rng(131);
    auto chart = make_chart(3, 131, 6);
    auto g = random_metric(rng, chart, 0.3);
    auto B = random_form(rng, chart, 2, 1, 0.4);
    auto H = random_form(rng, chart, 3, 1, 0.4);
    auto Hp = H + exterior_derivative(B);
    Metric m(g);
    auto conn = with_params(minimal_connection(m, Hp), m, rand_params(rng, chart));

    SUBCASE("B = 0 is the identity") {
        auto same = untwist(conn, TensorField::uniform(chart, 2, Variance::Down));
        std::vector<Expr> d;
        for (std::size_t i = 0; i < same.coefficients().size(); ++i)
            d.push_back(same.coefficients()[i] - conn.coefficients()[i]);
        CHECK(max_abs(d, *chart) == 0.0);
    }
    SUBCASE("round trip and target frame") {
        auto plain = untwist(conn, B);
        auto back = twist(plain, B);
        std::vector<Expr> d;
        for (std::size_t i = 0; i < back.coefficients().size(); ++i)
            d.push_back(back.coefficients()[i] - conn.coefficients()[i]);
        CHECK(max_abs(d, *chart) < 1e-11);
        auto target = CourantFrame::standard(H);
        std::vector<Expr> dc;
        for (int C = 0; C < 6; ++C)
            for (int A = 0; A < 6; ++A)
                for (int Bi = 0; Bi < 6; ++Bi) dc.push_back(plain.frame().structure(C, A, Bi) - target.structure(C, A, Bi));
        CHECK(max_abs(dc, *chart) < 1e-11);
    }
    SUBCASE("curvature covariance and invariant scalars") {
        auto plain = untwist(conn, B);
        GeneralizedMetric Gb(g, B);
        GeneralizedMetric G0(g, TensorField::uniform(chart, 2, Variance::Down));
        CHECK(max_abs(gualtieri_torsion(plain)) < 1e-10);
        CHECK(max_abs(metric_compat_residual(plain, Gb.block()), *chart) < 1e-10);
        GenCurvature c0(conn), c1(plain);
        CHECK(max_abs({c1.scalar_E() - c0.scalar_E()}, *chart) < 1e-9);
        CHECK(max_abs({c1.scalar_G(Gb.block_inverse()) - c0.scalar_G(G0.block_inverse())}, *chart) < 1e-9);
        // Ric(e^B a, e^B b) = Ric_twisted(a, b) on frame elements.
        auto F = b_twist_matrix(B, 1.0);
        const auto& R0 = c0.ricci();
        const auto& R1 = c1.ricci();
        std::vector<Expr> d;
        for (int A = 0; A < 6; ++A)
            for (int Bi = 0; Bi < 6; ++Bi) {
                std::vector<Expr> t;
                for (int P = 0; P < 6; ++P)
                    for (int Q = 0; Q < 6; ++Q) t.push_back(F(P, A) * F(Q, Bi) * R1(P, Q));
                d.push_back(add(std::move(t)) - R0(A, Bi));
            }
        CHECK(max_abs(d, *chart) < 1e-9);
    }
}

TEST_CASE("Ricci compatibility residual") {
    SUBCASE("flat background") {
        auto chart = make_chart(2, 3, 4);
        auto flat = TensorField(chart, {Variance::Down, Variance::Down});
        for (int i = 0; i < 2; ++i) flat(i, i) = Expr(1.0);
        GeneralizedMetric G(flat, TensorField::uniform(chart, 2, Variance::Down));
        GenCurvature c(minimal_connection(flat, TensorField::uniform(chart, 3, Variance::Down)));
        CHECK(max_abs(ricci_compat_residual(c, G).components(), *chart) == 0.0);
    }
    SUBCASE("minimal and general connections") {
        auto bg = background(141, 3, 0.3);
        Rng rng(141);
        GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));
        GenCurvature c0(minimal_connection(bg.m, bg.Hp));
        auto zero = ConnParams::zero(bg.chart);
        CHECK(max_diff(ricci_compat_residual(c0, G), closed_ricci_compat(bg.m, bg.Hp, zero)) < 1e-9);
        auto p = rand_params(rng, bg.chart);
        GenCurvature c1(with_params(minimal_connection(bg.m, bg.Hp), bg.m, p));
        CHECK(max_diff(ricci_compat_residual(c1, G), closed_ricci_compat(bg.m, bg.Hp, p)) < 1e-9);
    }
}

TEST_CASE("affine family relations") {
    auto bg = background(151, 3, 0.3);
    Rng rng(151);
    int n = 3, N = 6;
    auto base = with_params(minimal_connection(bg.m, bg.Hp), bg.m, rand_params(rng, bg.chart));
    auto K = k_tensor(bg.m, rand_params(rng, bg.chart));
    auto other = base.plus(K, Provenance::Custom);
    GenCurvature cb(base), co(other);
    GeneralizedMetric G(bg.g, TensorField::uniform(bg.chart, 2, Variance::Down));

    SUBCASE("trace identity") {
        std::vector<Expr> t;
        for (int L = 0; L < N; ++L)
            for (int M = 0; M < N; ++M)
                for (int E = 0; E < N; ++E) {
                    t.push_back(K(dual_index(E, n), L, M) * K(E, dual_index(M, n), dual_index(L, n)));
                    t.push_back(-2.0 * K(L, M, dual_index(E, n)) * K(dual_index(M, n), E, dual_index(L, n)));
                }
        CHECK(max_abs({add(std::move(t))}, *bg.chart) < 1e-10);
    }
    SUBCASE("Courant-Ricci scalar") {
        FrameTensor K1(bg.chart, N, 1);
        for (int C = 0; C < N; ++C) {
            std::vector<Expr> t;
            for (int L = 0; L < N; ++L) t.push_back(K(L, dual_index(L, n), C));
            K1(C) = add(std::move(t));
        }
        auto dK = covariant_derivative(base, K1);
        std::vector<Expr> div, nrm;
        for (int L = 0; L < N; ++L) {
            div.push_back(dK(L, dual_index(L, n)));
            nrm.push_back(K1(L) * K1(dual_index(L, n)));
        }
        Expr predicted = cb.scalar_E() + 2.0 * add(std::move(div)) - add(std::move(nrm));
        CHECK(max_abs({co.scalar_E() - predicted}, *bg.chart) < 1e-9);
    }
    SUBCASE("generalized-metric scalar") {
        Expr predicted = cb.scalar_G(G.block_inverse());
        for (int sign : {1, -1}) {
            auto P = G.psi_matrix(sign);
            std::vector<std::vector<Expr>> u;
            for (int k = 0; k < n; ++k) {
                std::vector<Expr> c(static_cast<std::size_t>(N));
                for (int A = 0; A < N; ++A) c[static_cast<std::size_t>(A)] = P(A, k);
                u.push_back(std::move(c));
            }
            const auto& fr = base.frame();
            ExprMatrix gE(n, n);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) gE(k, l) = fr.pairing(u[k], u[l]);
            auto gEi = inverse(gE);
            auto Gi = Expr(double(sign)) * gEi;  // G_+- = +-g_E on V+-
            std::vector<Expr> K1(static_cast<std::size_t>(n));
            for (int c = 0; c < n; ++c) {
                std::vector<Expr> t;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) t.push_back(Gi(k, l) * contract3(K, u[k], u[l], u[c]));
                K1[static_cast<std::size_t>(c)] = add(std::move(t));
            }
            std::vector<Expr> div, nrm;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    auto w = base.covariant(u[k], u[l]);
                    std::vector<Expr> kw;
                    for (int mi = 0; mi < n; ++mi)
                        for (int p = 0; p < n; ++p) kw.push_back(gEi(mi, p) * fr.pairing(w, u[p]) * K1[mi]);
                    div.push_back(Gi(k, l) * (fr.rho(u[k], K1[l]) - add(std::move(kw))));
                    nrm.push_back(Gi(k, l) * K1[k] * K1[l]);
                }
            predicted = predicted + 2.0 * sign * add(std::move(div)) - add(std::move(nrm));
        }
        CHECK(max_abs({co.scalar_G(G.block_inverse()) - predicted}, *bg.chart) < 1e-9);
    }
}

TEST_CASE("quadratic Lie algebra connection") {
    SUBCASE("so(3) + so(3)") {
        for (Rational tilt : {Rational(0), Rational(1, 2)}) {
            auto q = QuadraticLieAlgebra::so3_plus_so3(tilt);
            auto c = qla_lc(q);
            for (const auto& t : qla_torsion(q, c)) CHECK(t == 0);
            for (const auto& t : qla_pairing_defect(q, c)) CHECK(t == 0);
            for (const auto& t : qla_metric_defect(q, c)) CHECK(t == 0);
            bool nonzero = false;
            for (const auto& x : c.lowered) nonzero = nonzero || x != 0;
            CHECK(nonzero);
        }
        // The plain third of the bracket on V+ is the restricted formula.
        auto q = QuadraticLieAlgebra::so3_plus_so3();
        auto c = qla_lc(q);
        CHECK(c(0, 1, 2) == Rational(1, 3));
        CHECK(c(3, 0, 1) == 0);
        CHECK(c(3, 1, 2) == 0);
        CHECK(c(0, 4, 5) == 0);
        CHECK(c(3, 4, 5) == Rational(-1, 3));
    }
    SUBCASE("abelian") {
        RMatrix P(2, 2);
        P(0, 1) = P(1, 0) = 1;
        RMatrix vp(2, 1);
        vp(0, 0) = vp(1, 0) = 1;
        auto c = qla_lc(QuadraticLieAlgebra::abelian(P, vp));
        for (const auto& x : c.lowered) CHECK(x == 0);
    }
    SUBCASE("axiom failures are named") {
        auto q = QuadraticLieAlgebra::so3_plus_so3();
        auto jac = q;
        // [e0, e1] = e2 + f0
        jac.structure[(0 * 6 + 1) * 6 + 3] = 1;
        jac.structure[(1 * 6 + 0) * 6 + 3] = -1;
        CHECK_THROWS_WITH_AS(qla_lc(jac), doctest::Contains("Jacobi"), InvalidLieAlgebra);
        auto inv = q;
        inv.pairing(3, 3) = 1;
        inv.pairing(4, 4) = 1;
        inv.pairing(5, 5) = 1;
        CHECK_THROWS_WITH_AS(qla_lc(inv), doctest::Contains("V-"), InvalidLieAlgebra);
        auto ad = q;
        ad.pairing(0, 0) = 2;
        CHECK_THROWS_WITH_AS(qla_lc(ad), doctest::Contains("ad-invariance"), InvalidLieAlgebra);
        auto skew = q;
        skew.structure[(0 * 6 + 0) * 6 + 1] = 1;
        CHECK_THROWS_WITH_AS(qla_lc(skew), doctest::Contains("antisymmetry"), InvalidLieAlgebra);
        auto tilted = QuadraticLieAlgebra::so3_plus_so3(Rational(2));
        CHECK_THROWS_WITH_AS(qla_lc(tilted), doctest::Contains("V+"), InvalidLieAlgebra);
    }
}
