#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "gencourant/cli.hpp"
#include "gencourant/errors.hpp"
#include "gencourant/gtb.hpp"
#include "gencourant/sampling.hpp"

namespace gencourant {

using nlohmann::json;

namespace {

struct Context {
    const Scene& scene;
    Report& report;

    const Chart& chart() const { return *scene.chart; }
    const Background& bg() const { return scene.background; }

    void add(std::string name, std::string anchor, const std::vector<Expr>& residual, double tol) {
        Worst w = worst(residual, chart());
        push(std::move(name), std::move(anchor), w.max_abs, tol, w.point);
    }
    void push(std::string name, std::string anchor, double value, double tol, std::vector<double> point) {
        CheckRecord r;
        r.name = std::move(name);
        r.anchor = std::move(anchor);
        r.max_abs = value;
        r.tolerance = tol;
        r.pass = std::isfinite(value) && value < tol;
        r.point = std::move(point);
        report.checks.push_back(std::move(r));
    }
};

std::vector<Expr> frame_diff(const GenSection& a, const GenSection& b) {
    auto x = to_frame(a), y = to_frame(b);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] - y[i];
    return x;
}

void append(std::vector<Expr>& to, const std::vector<Expr>& from) { to.insert(to.end(), from.begin(), from.end()); }

std::string shell_state(double max_abs) { return max_abs < kVanishThreshold ? "on-shell" : "off-shell"; }

void require_even(const Scene& s, const char* cmd) {
    if (s.chart->dim() % 2 != 0)
        throw CommandError(std::string("SingularB: '") + cmd + "' needs an invertible B, impossible in odd dimension " +
                           std::to_string(s.chart->dim()));
}

// ---- commands ----

void cmd_axioms(Context& c) {
    const auto& bg = c.bg();
    auto chart = c.scene.chart;
    Rng rng(chart->seed());
    DorfmanContext ctx(bg.H);
    std::vector<Expr> leibniz, invariance, sympart, morphism;
    for (int t = 0; t < 10; ++t) {
        auto a = random_section(rng, chart), b = random_section(rng, chart), e = random_section(rng, chart);
        append(leibniz, to_frame(jacobiator(ctx, a, b, e)));
        invariance.push_back(anchor_derivative(a, pairing(b, e)) - pairing(ctx.bracket(a, b), e) -
                             pairing(b, ctx.bracket(a, e)));
        append(sympart, frame_diff(ctx.bracket(a, b) + ctx.bracket(b, a), d_map(pairing(a, b), chart)));
        append(morphism, (ctx.bracket(a, b).vec - lie_bracket(a.vec, b.vec)).components());
    }
    c.add("axioms.anchor_morphism", "anchor is a bracket morphism", morphism, c.scene.tol.sym);
    c.add("axioms.invariance", "invariance of the pairing", invariance, c.scene.tol.sym);
    c.add("axioms.leibniz", "Leibniz identity of the twisted Dorfman bracket", leibniz, c.scene.tol.sym);
    c.add("axioms.symmetric_part", "symmetric part of the bracket equals D of the pairing", sympart, c.scene.tol.sym);

    // Symbolic derivatives of the scene expressions against central differences.
    std::vector<Expr> fields = bg.g.components();
    append(fields, bg.B.components());
    fields.push_back(bg.phi);
    const double h = 1e-4;
    double worst_fd = 0.0;
    std::vector<double> at;
    for (const auto& p : chart->sample_points())
        for (const auto& f : fields)
            for (int k = 0; k < chart->dim(); ++k) {
                auto q = p;
                q[static_cast<std::size_t>(k)] += h;
                double fp = evaluate(f, q);
                q[static_cast<std::size_t>(k)] -= 2 * h;
                double fm = evaluate(f, q);
                double err = std::abs(evaluate(differentiate(f, k), p) - (fp - fm) / (2 * h));
                if (!(err <= worst_fd)) {
                    worst_fd = err;
                    at = p;
                }
            }
    c.push("axioms.fd_derivatives", "symbolic derivatives against central differences", worst_fd, c.scene.tol.fd, at);
}

void cmd_torsion(Context& c) {
    const auto& bg = c.bg();
    int n = bg.dim();
    double tol = c.scene.tol.sym;
    Metric m(bg.g);
    auto Hp = bg.h_prime();
    auto zero = TensorField::uniform(c.scene.chart, 2, Variance::Down);
    auto G0 = GeneralizedMetric(bg.g, zero).block();
    auto eta = gram_matrix(n);

    auto minimal = minimal_connection(m, Hp);
    c.add("torsion.minimal", "Gualtieri torsion of the minimal connection", gualtieri_torsion(minimal).components(), tol);
    auto compat = metric_compat_residual(minimal, G0);
    append(compat, metric_compat_residual(minimal, eta));
    c.add("torsion.minimal_compat", "minimal connection preserves pairing and generalized metric", compat, tol);

    auto params = with_params(minimal, m, c.scene.params);
    c.add("torsion.params", "Gualtieri torsion of the (J,W) connection", gualtieri_torsion(params).components(), tol);
    compat = metric_compat_residual(params, G0);
    append(compat, metric_compat_residual(params, eta));
    c.add("torsion.params_compat", "(J,W) connection preserves pairing and generalized metric", compat, tol);

    if (n < 2) {
        c.report.info["skipped"].push_back("torsion.dilaton: needs dimension > 1");
        return;
    }
    auto dil = central_connection(bg);
    c.add("torsion.dilaton", "Gualtieri torsion of the dilaton connection", gualtieri_torsion(dil).components(), tol);
    compat = metric_compat_residual(dil, GeneralizedMetric(bg.g, bg.B).block());
    append(compat, metric_compat_residual(dil, eta));
    c.add("torsion.dilaton_compat", "dilaton connection preserves pairing and generalized metric", compat, tol);
}

void cmd_curvature(Context& c) {
    const auto& bg = c.bg();
    double tol = c.scene.tol.sym;
    Metric m(bg.g);
    auto Hp = bg.h_prime();
    auto zero = TensorField::uniform(c.scene.chart, 2, Variance::Down);
    GeneralizedMetric G0(bg.g, zero);
    const auto& p = c.scene.params;

    auto minimal = minimal_connection(m, Hp);
    GenCurvature cm(minimal);
    auto classical = curvature_package(m);
    c.add("curvature.minimal_scalar_E", "Courant-Ricci scalar of the minimal connection vanishes", {cm.scalar_E()}, tol);
    c.add("curvature.minimal_scalar_G", "Ricci scalar of the minimal connection is R(g) - 1/2 <H',H'>",
          {cm.scalar_G(G0.block_inverse()) - (classical.scalar - 0.5 * form_inner(Hp, Hp, m))}, tol);

    auto conn = with_params(minimal, m, p);
    GenCurvature cp(conn);
    c.add("curvature.params_scalar_E", "Courant-Ricci scalar of the (J,W) connection, closed form",
          {cp.scalar_E() - closed_scalar_E(m, p)}, tol);
    c.add("curvature.params_scalar_G", "Ricci scalar of the (J,W) connection, closed form",
          {cp.scalar_G(G0.block_inverse()) - closed_scalar_G(m, Hp, p)}, tol);
    c.add("curvature.params_ricci_compat", "Ric(V+, V-) of the (J,W) connection, closed form",
          (ricci_compat_residual(cp, G0) - closed_ricci_compat(m, Hp, p)).components(), tol);

    auto tr = param_traces(m, p);
    c.add("curvature.char_vf", "characteristic vector field equals 2 J'", (char_vf(conn) - 2.0 * tr.J1).components(),
          tol);
    c.add("curvature.v_trace", "trace of V equals W'", (v_trace(conn, G0.h()) - tr.W1).components(), tol);
}

void cmd_beta(Context& c) {
    const auto& bg = c.bg();
    double tol = c.scene.tol.sym;
    auto a = beta_all(bg);
    auto b = beta_index_form(bg);
    Metric m(bg.g);

    std::vector<Expr> d = (a.beta_g - b.beta_g).components();
    append(d, (a.beta_B - b.beta_B).components());
    d.push_back(a.beta_phi - b.beta_phi);
    d.push_back(a.beta_phi_prime - b.beta_phi_prime);
    c.add("beta.index_form", "index and index-free beta functions agree", d, tol);
    c.add("beta.conformal_B", "beta(B) equals 1/2 e^{2phi} delta(e^{-2phi} H')",
          (a.beta_B - beta_B_conformal(bg)).components(), tol);
    std::vector<Expr> trace;
    for (int i = 0; i < bg.dim(); ++i)
        for (int j = 0; j < bg.dim(); ++j) trace.push_back(a.beta_g(i, j) * m.inv()(i, j));
    c.add("beta.prime_relation", "beta'(phi) = -1/4 (beta(phi) - tr beta(g))",
          {a.beta_phi_prime + 0.25 * (a.beta_phi - add(std::move(trace)))}, tol);

    std::vector<Expr> all = a.beta_g.components();
    append(all, a.beta_B.components());
    all.push_back(a.beta_phi);
    double mx = worst(all, c.chart()).max_abs;
    c.report.info["beta"] = {{"max_abs", mx}, {"state", shell_state(mx)}};
}

void cmd_central(Context& c) {
    auto r = central_residuals(c.bg());
    c.add("central.ricci_compat", "Ric(Psi+ X, Psi- Y) = beta(g)(X,Y) - beta(B)(X,Y)", r.ricci.components(),
          c.scene.tol.sym);
    c.add("central.scalar", "Ricci scalar of the dilaton connection equals beta(phi)", {r.scalar}, c.scene.tol.sym);
}

void cmd_symplectic(Context& c) {
    require_even(c.scene, "symplectic");
    const auto& bg = c.bg();
    int n = bg.dim();
    double tol = c.scene.tol.sym;
    auto pkg = symplectic_package(bg);
    auto r = symplectic_residuals(bg, pkg);
    GenCurvature ct(theta_transport(central_connection(bg), pkg.theta, bg.B));

    c.add("symplectic.scalar_transport", "scalar equation equals R_G of the transported connection",
          {r.scalar - ct.scalar_G(g_theta_inverse(pkg))}, tol);

    auto Pp = theta_psi_matrix(pkg, 1), Pm = theta_psi_matrix(pkg, -1);
    const auto& R = ct.ricci();
    std::vector<Expr> rc;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> t{-r.sym(i, j), r.skew(i, j)};
            for (int A = 0; A < 2 * n; ++A)
                for (int B = 0; B < 2 * n; ++B)
                    if (!Pp(A, i).is_zero() && !Pm(B, j).is_zero()) t.push_back(Pp(A, i) * R(A, B) * Pm(B, j));
            rc.push_back(add(std::move(t)));
        }
    c.add("symplectic.ricci_compat", "Ric_theta(V+, V-) equals the symmetric minus the skew equation", rc, tol);

    const auto& a = pkg.connection;
    std::vector<Expr> tors;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tors.push_back(a.gamma(k, i, j) - a.gamma(k, j, i) - a.structure(k, i, j));
    c.add("symplectic.algebroid_torsion", "Lie algebroid Levi-Civita connection is torsion-free", tors, tol);

    std::vector<Expr> all = r.sym.components();
    append(all, r.skew.components());
    all.push_back(r.scalar);
    double mx = worst(all, c.chart()).max_abs;
    c.report.info["symplectic"] = {{"max_abs", mx}, {"state", shell_state(mx)}};
}

void cmd_equivalence(Context& c) {
    require_even(c.scene, "equivalence");
    auto r = equivalence_report(c.bg());
    c.push("equivalence.transport", "Ric_theta(psi, psi') = Ric(F psi, F psi')", r.transport_max, c.scene.tol.sym,
           r.transport_point);
    c.push("equivalence.verdict", "beta and symplectic families vanish together",
           r.beta_vanish == r.symplectic_vanish ? 0.0 : 1.0, 0.5,
           r.beta_vanish ? r.symplectic_point : r.beta_point);
    c.report.info["equivalence"] = {{"beta_max", r.beta_max},
                                    {"symplectic_max", r.symplectic_max},
                                    {"threshold", kVanishThreshold},
                                    {"verdict", r.verdict}};
}

const std::map<std::string, std::function<void(Context&)>>& table() {
    static const std::map<std::string, std::function<void(Context&)>> t{
        {"axioms", cmd_axioms},   {"torsion", cmd_torsion},       {"curvature", cmd_curvature},
        {"beta", cmd_beta},       {"central", cmd_central},       {"symplectic", cmd_symplectic},
        {"equivalence", cmd_equivalence}};
    return t;
}

}  // namespace

bool Report::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.pass; });
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"axioms",  "torsion",    "curvature",   "beta",
                                                "central", "symplectic", "equivalence", "all"};
    return names;
}

Report run_command(const std::string& cmd, const Scene& scene) {
    auto start = std::chrono::steady_clock::now();
    Report report;
    report.command = cmd;
    Context ctx{scene, report};
    try {
        if (cmd == "all") {
            for (const auto& name : {"axioms", "torsion", "curvature", "beta", "central"}) table().at(name)(ctx);
            if (scene.chart->dim() % 2 == 0) {
                cmd_symplectic(ctx);
                cmd_equivalence(ctx);
            } else {
                report.info["skipped"].push_back("symplectic: odd dimension");
                report.info["skipped"].push_back("equivalence: odd dimension");
            }
        } else {
            auto it = table().find(cmd);
            if (it == table().end()) throw CommandError("unknown command '" + cmd + "'");
            it->second(ctx);
        }
    } catch (const SingularB& e) {
        throw CommandError(std::string("SingularB: ") + e.what());
    }
    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
    report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

json to_json(const Report& r, const Scene& scene) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j{{"name", c.name}, {"anchor", c.anchor}, {"tolerance", c.tolerance}, {"pass", c.pass}};
        j["max_abs"] = std::isfinite(c.max_abs) ? json(c.max_abs) : json(nullptr);
        j["point"] = c.point;
        checks.push_back(std::move(j));
    }
    return json{{"schema_version", kReportSchemaVersion},
                {"command", r.command},
                {"scene", scene.source},
                {"chart",
                 {{"dim", scene.chart->dim()},
                  {"coords", scene.chart->names()},
                  {"seed", scene.chart->seed()},
                  {"points", scene.chart->num_points()}}},
                {"policy", scene.policy == ParamPolicy::Reject ? "reject" : "project"},
                {"tolerances", {{"sym", scene.tol.sym}, {"fd", scene.tol.fd}}},
                {"checks", std::move(checks)},
                {"info", r.info},
                {"pass", r.pass()},
                {"timing_ms", r.timing_ms}};
}

}  // namespace gencourant
