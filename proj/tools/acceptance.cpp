// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gencourant/errors.hpp"
#include "gencourant/gconn.hpp"
#include "gencourant/gtb.hpp"
#include "gencourant/qla.hpp"
#include "gencourant/random.hpp"
#include "gencourant/sampling.hpp"
#include "gencourant/streff.hpp"

using namespace gencourant;

namespace {

struct Part {
    std::string label;
    double value;
    double tol;  // value must be < tol; tol 0 means exactly zero
    bool pass() const { return std::isfinite(value) && (tol == 0.0 ? value == 0.0 : value < tol); }
};

struct Criterion {
    int id;
    std::string title;
    std::vector<Part> parts;
    std::string note;
    bool pass() const {
        return !parts.empty() && std::all_of(parts.begin(), parts.end(), [](const Part& p) { return p.pass(); });
    }
};

double max_abs(const std::vector<Expr>& e, const Chart& c) { return worst(e, c).max_abs; }
double max_abs(const FrameTensor& t) { return max_abs(t.components(), *t.chart()); }
double max_abs(const TensorField& t) { return max_abs(t.components(), *t.chart()); }

void append(std::vector<Expr>& to, const std::vector<Expr>& from) { to.insert(to.end(), from.begin(), from.end()); }

// Skew in the last two slots, totally antisymmetric part removed.
TensorField rand_param(Rng& rng, ChartPtr chart, Variance v) {
    auto t = random_field(rng, chart, {v, v, v}, 1, 0.4);
    const int last_two[] = {1, 2};
    auto s = antisymmetrize(t, last_two);
    return s - antisymmetrize(s);
}

ConnParams rand_params(Rng& rng, ChartPtr chart) {
    return validate_params(rand_param(rng, chart, Variance::Up), rand_param(rng, chart, Variance::Down));
}

struct Geometry {
    ChartPtr chart;
    TensorField g;
    TensorField Hp;
    Metric m;
};

Geometry geometry(std::uint64_t seed, int n) {
    Rng rng(seed);
    auto chart = make_chart(n, seed, 8);
    auto g = random_metric(rng, chart, 0.3);
    auto Hp = n == 3 ? random_form(rng, chart, 3, 1, 0.7) : exterior_derivative(random_form(rng, chart, 2, 2, 0.5));
    return {chart, g, Hp, Metric(g)};
}

GeneralizedMetric untwisted(const Geometry& geo) {
    return GeneralizedMetric(geo.g, TensorField::uniform(geo.chart, 2, Variance::Down));
}

Criterion courant_axioms() {
    Criterion c{1, "Courant axioms of the twisted Dorfman bracket", {}, ""};
    double lw = 0, iw = 0, sw = 0, pw = 0;
    for (int n : {2, 3}) {
        auto chart = make_chart(n, 1000 + static_cast<std::uint64_t>(n), 8);
        Rng rng(1000 + static_cast<std::uint64_t>(n));
        auto H = exterior_derivative(random_form(rng, chart, 2, 2, 0.5));
        DorfmanContext ctx(H);
        for (int t = 0; t < 20; ++t) {
            auto a = random_section(rng, chart), b = random_section(rng, chart), e = random_section(rng, chart);
            Expr f = random_polynomial(rng, n, 2, 1.0);
            lw = std::max(lw, max_abs(to_frame(jacobiator(ctx, a, b, e)), *chart));
            iw = std::max(iw, worst(anchor_derivative(a, pairing(b, e)) - pairing(ctx.bracket(a, b), e) -
                                        pairing(b, ctx.bracket(a, e)),
                                    *chart)
                                  .max_abs);
            sw = std::max(sw, max_abs(to_frame(ctx.bracket(a, b) + ctx.bracket(b, a) - d_map(pairing(a, b), chart)),
                                      *chart));
            std::vector<Expr> p = (ctx.bracket(a, b).vec - lie_bracket(a.vec, b.vec)).components();
            append(p, to_frame(ctx.bracket(a, f * b) - f * ctx.bracket(a, b) - anchor_derivative(a, f) * b));
            append(p, d_map(f, chart).vec.components());
            pw = std::max(pw, max_abs(p, *chart));
        }
    }
    c.parts = {{"leibniz", lw, 1e-9}, {"invariance", iw, 1e-9}, {"symmetric part", sw, 1e-9},
               {"anchor/leibniz rule", pw, 1e-9}};
    c.note = "20 triples each on n=2,3";
    return c;
}

Criterion minimal_connection_scalars() {
    Criterion c{2, "minimal connection: torsion and scalar curvatures", {}, ""};
    double tw = 0, ew = 0, gw = 0;
    for (std::uint64_t seed = 200; seed < 206; ++seed) {
        auto geo = geometry(seed, seed % 2 == 0 ? 2 : 3);
        auto conn = minimal_connection(geo.m, geo.Hp);
        GenCurvature curv(conn);
        tw = std::max(tw, max_abs(gualtieri_torsion(conn)));
        ew = std::max(ew, max_abs({curv.scalar_E()}, *geo.chart));
        auto classical = curvature_package(geo.m).scalar - 0.5 * form_inner(geo.Hp, geo.Hp, geo.m);
        gw = std::max(gw, max_abs({curv.scalar_G(untwisted(geo).block_inverse()) - classical}, *geo.chart));
    }
    c.parts = {{"torsion", tw, 1e-10}, {"R_E", ew, 1e-10}, {"R_G - (R(g) - <H',H'>/2)", gw, 1e-9}};
    c.note = "6 backgrounds, n=2,3";
    return c;
}

Expr bianchi_lhs(const FrameTensor& R, int A, int B, int C, int D) {
    return R(D, C, A, B) + R(D, A, B, C) + R(D, B, C, A);
}

// Residual of the torsionful Bianchi identity; `scale` receives max |lhs|.
double torsionful_bianchi(const GenConnection& conn, double& scale) {
    int N = conn.rank(), n = conn.dim();
    GenCurvature curv(conn);
    const auto& R = curv.riemann();
    auto T = gualtieri_torsion(conn);
    auto dT = covariant_derivative(conn, T);
    auto tt = [&](int A, int B, int C, int D) {
        std::vector<Expr> s;
        for (int E = 0; E < N; ++E) s.push_back(T(B, C, E) * T(A, dual_index(E, n), D));
        return dT(A, B, C, D) - add(std::move(s));
    };
    std::vector<Expr> r, l;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D) {
                    Expr lhs = bianchi_lhs(R, A, B, C, D);
                    r.push_back(lhs - 0.5 * (tt(A, B, C, D) + tt(B, C, A, D) + tt(C, A, B, D) - dT(D, A, B, C)));
                    l.push_back(lhs);
                }
    scale = std::max(scale, max_abs(l, *conn.chart()));
    return max_abs(r, *conn.chart());
}

Criterion curvature_symmetries() {
    Criterion c{3, "curvature symmetries and algebraic Bianchi identities", {}, ""};
    double sym = 0, bf = 0, blc = 0, bk = 0, lc_scale = 0, k_scale = 0;
    for (int n : {2, 3}) {
        auto geo = geometry(300 + static_cast<std::uint64_t>(n), n);
        Rng rng(300 + static_cast<std::uint64_t>(n));
        auto conn = with_params(minimal_connection(geo.m, geo.Hp), geo.m, rand_params(rng, geo.chart));
        GenCurvature curv(conn);
        const auto& R = curv.riemann();
        int N = 2 * n;
        std::vector<Expr> s, b;
        for (int D = 0; D < N; ++D)
            for (int C = 0; C < N; ++C)
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B) {
                        s.push_back(R(D, C, A, B) + R(D, C, B, A));
                        s.push_back(R(D, C, A, B) + R(C, D, A, B));
                        s.push_back(R(D, C, A, B) - R(B, A, C, D));
                        s.push_back(R(D, C, A, B) - R(A, B, D, C));
                        b.push_back(bianchi_lhs(R, A, B, C, D));
                    }
        sym = std::max(sym, max_abs(s, *geo.chart));
        bf = std::max(bf, max_abs(b, *geo.chart));

        auto lc = lc_block_connection(geo.m, geo.Hp);
        blc = std::max(blc, torsionful_bianchi(lc, lc_scale));
        auto lck = lc.plus(k_tensor(geo.m, rand_params(rng, geo.chart)), Provenance::Custom);
        bk = std::max(bk, torsionful_bianchi(lck, k_scale));
    }
    c.parts = {{"R symmetries", sym, 1e-9},
               {"Bianchi, torsion-free", bf, 1e-9},
               {"Bianchi with torsion, LC block", blc, 1e-9},
               {"Bianchi with torsion, LC block + K", bk, 1e-9}};
    char buf[128];
    std::snprintf(buf, sizeof buf, "n=2,3; cyclic sums: LC block %.1e, with K %.1e", lc_scale, k_scale);
    c.note = buf;
    return c;
}

Criterion scalar_closed_forms() {
    Criterion c{4, "scalar curvatures of the (J,W) family, closed forms", {}, ""};
    double ew = 0, gw = 0;
    for (std::uint64_t seed = 400; seed < 410; ++seed) {
        auto geo = geometry(seed, seed % 2 == 0 ? 2 : 3);
        Rng rng(seed);
        auto p = rand_params(rng, geo.chart);
        GenCurvature curv(with_params(minimal_connection(geo.m, geo.Hp), geo.m, p));
        ew = std::max(ew, max_abs({curv.scalar_E() - closed_scalar_E(geo.m, p)}, *geo.chart));
        gw = std::max(gw, max_abs({curv.scalar_G(untwisted(geo).block_inverse()) - closed_scalar_G(geo.m, geo.Hp, p)},
                                  *geo.chart));
    }
    c.parts = {{"R_E", ew, 1e-9}, {"R_G", gw, 1e-9}};
    c.note = "10 parameter pairs, n=2,3";
    return c;
}

Criterion ricci_compat_closed_form() {
    Criterion c{5, "Ric(V+, V-) of the (J,W) family, closed form", {}, ""};
    double w = 0;
    for (std::uint64_t seed = 500; seed < 510; ++seed) {
        auto geo = geometry(seed, seed % 2 == 0 ? 2 : 3);
        Rng rng(seed);
        auto p = rand_params(rng, geo.chart);
        GenCurvature curv(with_params(minimal_connection(geo.m, geo.Hp), geo.m, p));
        w = std::max(w, max_abs(ricci_compat_residual(curv, untwisted(geo)) - closed_ricci_compat(geo.m, geo.Hp, p)));
    }
    c.parts = {{"Ric(V+,V-)", w, 1e-9}};
    c.note = "10 parameter pairs, n=2,3";
    return c;
}

Criterion characteristic_fields() {
    Criterion c{6, "characteristic vector field and V trace", {}, ""};
    double xw = 0, vw = 0;
    for (std::uint64_t seed = 600; seed < 610; ++seed) {
        auto geo = geometry(seed, seed % 2 == 0 ? 2 : 3);
        Rng rng(seed);
        auto p = rand_params(rng, geo.chart);
        auto conn = with_params(minimal_connection(geo.m, geo.Hp), geo.m, p);
        auto tr = param_traces(geo.m, p);
        xw = std::max(xw, max_abs(char_vf(conn) - 2.0 * tr.J1));
        vw = std::max(vw, max_abs(v_trace(conn, untwisted(geo).h()) - tr.W1));
    }
    c.parts = {{"X - 2J'", xw, 1e-10}, {"V trace - W'", vw, 1e-10}};
    c.note = "10 parameter pairs, n=2,3";
    return c;
}

Criterion central_identities() {
    Criterion c{7, "dilaton connection reproduces the beta functions", {}, ""};
    double sw = 0, rw = 0, bmin = 1e300;
    for (std::uint64_t seed = 700; seed < 720; ++seed) {
        int n = seed % 2 == 0 ? 2 : 3;
        Rng rng(seed);
        auto bg = random_background(rng, make_chart(n, seed, 8));
        bmin = std::min(bmin, max_abs(bg.B));
        auto r = central_residuals(bg);
        sw = std::max(sw, max_abs({r.scalar}, *bg.chart));
        rw = std::max(rw, max_abs(r.ricci));
    }
    c.parts = {{"R_G - beta(phi)", sw, 1e-9}, {"Ric(Psi+,Psi-) - (beta(g) - beta(B))", rw, 1e-9},
               {"B nonzero (1/min|B|)", 1.0 / bmin, 1e6}};
    c.note = "20 backgrounds, n=2,3";
    return c;
}

Criterion parameter_dimension() {
    Criterion c{8, "dimension of the Levi-Civita parameter space", {}, ""};
    std::string got;
    double miss = 0;
    for (int n : {2, 3}) {
        // A non-diagonal rational metric besides the identity.
        RMatrix g = RMatrix::identity(n);
        g(0, 1) = g(1, 0) = Rational(1, 3);
        for (const auto& m : {RMatrix::identity(n), g}) {
            int r = lc_difference_rank(m);
            int expect = 2 * n * (n * n - 1) / 3;
            miss += std::abs(r - expect);
            got += (got.empty() ? "" : ", ") + std::to_string(r) + "/" + std::to_string(expect);
        }
    }
    c.parts = {{"|rank - 2n(n^2-1)/3|", miss, 0.0}};
    c.note = "n=2,3 identity and tilted metric: " + got;
    return c;
}

Criterion quadratic_lie_algebra() {
    Criterion c{9, "so(3)+so(3) Levi-Civita connection in exact arithmetic", {}, ""};
    int nonzero_t = 0, nonzero_p = 0, nonzero_m = 0;
    for (Rational tilt : {Rational(0), Rational(1, 2), Rational(-2, 7)}) {
        auto q = QuadraticLieAlgebra::so3_plus_so3(tilt);
        auto conn = qla_lc(q);
        for (const auto& x : qla_torsion(q, conn)) nonzero_t += x != 0;
        for (const auto& x : qla_pairing_defect(q, conn)) nonzero_p += x != 0;
        for (const auto& x : qla_metric_defect(q, conn)) nonzero_m += x != 0;
    }
    c.parts = {{"nonzero torsion entries", double(nonzero_t), 0.0},
               {"nonzero pairing defects", double(nonzero_p), 0.0},
               {"nonzero metric defects", double(nonzero_m), 0.0}};
    c.note = "tilts 0, 1/2, -2/7";
    return c;
}

Criterion symplectic_equivalence() {
    Criterion c{10, "symplectic side: transport identity and joint vanishing", {}, ""};
    double tw = 0;
    int off = 0;
    for (std::uint64_t seed = 1000; seed < 1010; ++seed) {
        int n = seed < 1006 ? 2 : 4;
        Rng rng(seed);
        auto bg = random_background(rng, make_chart(n, seed, n == 2 ? 8 : 4));
        auto r = equivalence_report(bg);
        tw = std::max(tw, r.transport_max);
        off += r.verdict == "inconsistent";
    }
    double flat = 0;
    bool both = true;
    for (int n : {2, 4}) {
        auto r = equivalence_report(flat_background(make_chart(n, 7, 4)));
        flat = std::max({flat, r.beta_max, r.symplectic_max});
        both = both && r.beta_vanish && r.symplectic_vanish;
    }
    c.parts = {{"transport", tw, 1e-9}, {"inconsistent verdicts", double(off), 0.0},
               {"flat residuals", flat, kVanishThreshold}, {"flat not jointly vanishing", both ? 0.0 : 1.0, 0.0}};
    c.note = "6 backgrounds n=2, 4 backgrounds n=4";
    return c;
}

Criterion fd_convergence() {
    Criterion c{11, "second-order convergence of central differences", {}, ""};
    Rng rng(1100);
    int used = 0, redrawn = 0;
    double worst_dev = 0, lo = 1e300, hi = 0;
    while (used < 50) {
        int dim = 2 + used % 2;
        Expr e = random_safe_expr(rng, dim, 4);
        std::vector<double> p;
        for (int i = 0; i < dim; ++i) p.push_back(rng.uniform(-1, 1));
        int k = static_cast<int>(rng.uniform(0, dim)) % dim;
        Expr de = differentiate(e, k);
        double exact = evaluate(de, p);
        double d3 = evaluate(differentiate(differentiate(de, k), k), p);
        double f = evaluate(e, p);
        // The ratio is set by rounding, not by the order, when the leading
        // truncation term is this small.
        if (!std::isfinite(d3) || std::abs(d3) < 0.1 * (1.0 + std::abs(f) + std::abs(exact))) {
            ++redrawn;
            continue;
        }
        auto err = [&](double h) {
            auto q = p;
            q[static_cast<std::size_t>(k)] += h;
            double fp = evaluate(e, q);
            q[static_cast<std::size_t>(k)] -= 2 * h;
            double fm = evaluate(e, q);
            return std::abs((fp - fm) / (2 * h) - exact);
        };
        double ratio = err(1e-3) / err(1e-4);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        worst_dev = std::max(worst_dev, std::isfinite(ratio) ? std::abs(ratio - 100.0) : 1e300);
        ++used;
    }
    c.parts = {{"|ratio - 100|", worst_dev, 20.0}};
    char buf[128];
    std::snprintf(buf, sizeof buf, "50 expressions, ratios in [%.2f, %.2f], %d redrawn", lo, hi, redrawn);
    c.note = buf;
    return c;
}

}  // namespace

int main() {
    std::vector<std::function<Criterion()>> all = {
        courant_axioms,       minimal_connection_scalars, curvature_symmetries,  scalar_closed_forms,
        ricci_compat_closed_form, characteristic_fields,  central_identities,    parameter_dimension,
        quadratic_lie_algebra, symplectic_equivalence,    fd_convergence};
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Criterion c;
        try {
            c = all[i]();
        } catch (const std::exception& e) {
            c.id = static_cast<int>(i) + 1;
            c.title = "threw";
            c.note = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = c.pass();
        failed += !ok;
        std::string detail;
        for (const auto& p : c.parts) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s%s %.2e (%s %.0e)", detail.empty() ? "" : "; ", p.label.c_str(),
                          p.value, p.tol == 0.0 ? "==" : "<", p.tol);
            detail += buf;
        }
        std::printf("%s  [%2d] %s: %s | %s | %.1fs\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), detail.c_str(),
                    c.note.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
