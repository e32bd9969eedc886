#include "gencourant/gtb.hpp"

#include <algorithm>
#include <cmath>

#include "gencourant/errors.hpp"
#include "gencourant/random.hpp"
#include "gencourant/sampling.hpp"

namespace gencourant {

namespace {

void require_vector(const TensorField& t, const char* what) {
    if (t.rank() != 1 || t.variance(0) != Variance::Up) throw SlotError(std::string(what) + ": expected a vector field");
}

void require_form(const TensorField& t, const char* what) {
    if (t.rank() != 1 || t.variance(0) != Variance::Down) throw SlotError(std::string(what) + ": expected a 1-form");
}

void require_rank(const TensorField& t, int rank, Variance v, const char* what) {
    bool ok = t.rank() == rank;
    for (int s = 0; ok && s < rank; ++s) ok = t.variance(s) == v;
    if (!ok) throw SlotError(std::string(what) + ": unexpected slot structure");
}

// X(f)
Expr directional(const TensorField& X, const Expr& f) {
    std::vector<Expr> terms;
    for (int a = 0; a < X.dim(); ++a) {
        if (X(a).is_zero()) continue;
        Expr d = differentiate(f, a);
        if (!d.is_zero()) terms.push_back(X(a) * d);
    }
    return add(std::move(terms));
}

TensorField matrix_apply_vec(const TensorField& M, const TensorField& xi) {
    // (M xi)^a = M^{ab} xi_b
    int n = xi.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        std::vector<Expr> terms;
        for (int b = 0; b < n; ++b)
            if (!M(a, b).is_zero() && !xi(b).is_zero()) terms.push_back(M(a, b) * xi(b));
        c[static_cast<std::size_t>(a)] = add(std::move(terms));
    }
    return TensorField::vector(xi.chart(), std::move(c));
}

TensorField form_of(const TensorField& B, const TensorField& X) {
    // B(X)_a = B_ab X^b
    int n = X.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        std::vector<Expr> terms;
        for (int b = 0; b < n; ++b)
            if (!B(a, b).is_zero() && !X(b).is_zero()) terms.push_back(B(a, b) * X(b));
        c[static_cast<std::size_t>(a)] = add(std::move(terms));
    }
    return TensorField::covector(X.chart(), std::move(c));
}

TensorField zero_vector(ChartPtr chart) { return TensorField(chart, {Variance::Up}); }
TensorField zero_form(ChartPtr chart) { return TensorField(chart, {Variance::Down}); }

TensorField coordinate_form(ChartPtr chart, int k) {
    TensorField f(chart, {Variance::Down});
    f(k) = Expr(1.0);
    return f;
}

}  // namespace

GenSection::GenSection(TensorField v, TensorField f) : vec(std::move(v)), form(std::move(f)) {
    require_vector(vec, "GenSection");
    require_form(form, "GenSection");
    require_same_chart(vec, form);
}

GenSection GenSection::zero(ChartPtr chart) { return GenSection(zero_vector(chart), zero_form(chart)); }

GenSection operator+(const GenSection& a, const GenSection& b) { return {a.vec + b.vec, a.form + b.form}; }
GenSection operator-(const GenSection& a, const GenSection& b) { return {a.vec - b.vec, a.form - b.form}; }
GenSection operator*(const Expr& f, const GenSection& a) { return {f * a.vec, f * a.form}; }

GenSection random_section(Rng& rng, ChartPtr chart, int degree, double scale) {
    TensorField v = random_field(rng, chart, {Variance::Up}, degree, scale);
    TensorField f = random_field(rng, chart, {Variance::Down}, degree, scale);
    return {std::move(v), std::move(f)};
}

std::vector<Expr> to_frame(const GenSection& s) {
    int n = s.dim();
    std::vector<Expr> c(static_cast<std::size_t>(2 * n));
    for (int a = 0; a < n; ++a) {
        c[static_cast<std::size_t>(a)] = s.vec(a);
        c[static_cast<std::size_t>(n + a)] = s.form(a);
    }
    return c;
}

GenSection from_frame(const std::vector<Expr>& c, ChartPtr chart) {
    int n = chart->dim();
    if (c.size() != static_cast<std::size_t>(2 * n)) throw ValidationError("frame component count mismatch");
    std::vector<Expr> v(c.begin(), c.begin() + n), f(c.begin() + n, c.end());
    return {TensorField::vector(chart, std::move(v)), TensorField::covector(chart, std::move(f))};
}

GenSection frame_element(ChartPtr chart, int A) {
    std::vector<Expr> c(static_cast<std::size_t>(2 * chart->dim()));
    c.at(static_cast<std::size_t>(A)) = Expr(1.0);
    return from_frame(c, std::move(chart));
}

Expr pairing(const GenSection& a, const GenSection& b) {
    if (a.chart() != b.chart()) throw ChartMismatch("pairing of sections on different charts");
    std::vector<Expr> terms;
    for (int k = 0; k < a.dim(); ++k) {
        terms.push_back(b.form(k) * a.vec(k));
        terms.push_back(a.form(k) * b.vec(k));
    }
    return add(std::move(terms));
}

ExprMatrix gram_matrix(int n) {
    ExprMatrix m(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        m(a, n + a) = Expr(1.0);
        m(n + a, a) = Expr(1.0);
    }
    return m;
}

Expr anchor_derivative(const GenSection& s, const Expr& f) { return directional(s.vec, f); }

GenSection d_map(const Expr& f, ChartPtr chart) {
    int n = chart->dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) c[static_cast<std::size_t>(a)] = differentiate(f, a);
    return {zero_vector(chart), TensorField::covector(chart, std::move(c))};
}

TensorField lie_bracket(const TensorField& X, const TensorField& Y) {
    require_vector(X, "lie_bracket");
    require_vector(Y, "lie_bracket");
    require_same_chart(X, Y);
    std::vector<Expr> c(static_cast<std::size_t>(X.dim()));
    for (int k = 0; k < X.dim(); ++k) c[static_cast<std::size_t>(k)] = directional(X, Y(k)) - directional(Y, X(k));
    return TensorField::vector(X.chart(), std::move(c));
}

TensorField lie_derivative_form(const TensorField& X, const TensorField& eta) {
    require_vector(X, "lie_derivative");
    require_form(eta, "lie_derivative");
    require_same_chart(X, eta);
    int n = X.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms{directional(X, eta(k))};
        for (int a = 0; a < n; ++a) {
            if (eta(a).is_zero()) continue;
            Expr d = differentiate(X(a), k);
            if (!d.is_zero()) terms.push_back(eta(a) * d);
        }
        c[static_cast<std::size_t>(k)] = add(std::move(terms));
    }
    return TensorField::covector(X.chart(), std::move(c));
}

TensorField interior_d(const TensorField& Y, const TensorField& xi) {
    require_vector(Y, "interior_d");
    require_form(xi, "interior_d");
    require_same_chart(Y, xi);
    int n = Y.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int a = 0; a < n; ++a) {
            if (Y(a).is_zero()) continue;
            Expr d = differentiate(xi(k), a) - differentiate(xi(a), k);
            if (!d.is_zero()) terms.push_back(Y(a) * d);
        }
        c[static_cast<std::size_t>(k)] = add(std::move(terms));
    }
    return TensorField::covector(Y.chart(), std::move(c));
}

TensorField contract_two(const TensorField& H, const TensorField& X, const TensorField& Y) {
    require_rank(H, 3, Variance::Down, "contract_two");
    require_vector(X, "contract_two");
    require_vector(Y, "contract_two");
    int n = X.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int a = 0; a < n; ++a) {
            if (X(a).is_zero()) continue;
            for (int b = 0; b < n; ++b)
                if (!Y(b).is_zero() && !H(a, b, k).is_zero()) terms.push_back(H(a, b, k) * X(a) * Y(b));
        }
        c[static_cast<std::size_t>(k)] = add(std::move(terms));
    }
    return TensorField::covector(X.chart(), std::move(c));
}

void check_closed(const TensorField& H, double tol) {
    require_rank(H, 3, Variance::Down, "check_closed");
    check_antisymmetric(H);
    TensorField dH = exterior_derivative(H);
    Worst w = worst(dH.components(), *H.chart());
    if (w.max_abs > tol) throw NotClosed(w.max_abs);
}

DorfmanContext::DorfmanContext(TensorField H, double tol) : H_(std::move(H)) { check_closed(H_, tol); }

GenSection DorfmanContext::bracket(const GenSection& a, const GenSection& b) const {
    if (a.chart() != b.chart() || a.chart() != H_.chart()) throw ChartMismatch("dorfman: chart mismatch");
    TensorField vec = lie_bracket(a.vec, b.vec);
    TensorField form = lie_derivative_form(a.vec, b.form) - interior_d(b.vec, a.form) - contract_two(H_, a.vec, b.vec);
    return {std::move(vec), std::move(form)};
}

GenSection dorfman(const GenSection& a, const GenSection& b, const TensorField& H) {
    return DorfmanContext(H).bracket(a, b);
}

GenSection jacobiator(const DorfmanContext& ctx, const GenSection& a, const GenSection& b, const GenSection& c) {
    return ctx.bracket(a, ctx.bracket(b, c)) - ctx.bracket(ctx.bracket(a, b), c) - ctx.bracket(b, ctx.bracket(a, c));
}

GenSection b_twist(const GenSection& s, const TensorField& B, double sign) {
    require_rank(B, 2, Variance::Down, "b_twist");
    check_antisymmetric(B);
    return {s.vec, s.form + sign * form_of(B, s.vec)};
}

ExprMatrix b_twist_matrix(const TensorField& B, double sign) {
    int n = B.dim();
    ExprMatrix m = ExprMatrix::identity(2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(n + a, b) = sign * B(a, b);
    return m;
}

TwistCheck twisted_bracket_check(const TensorField& B, const TensorField& H, const GenSection& a,
                                 const GenSection& b) {
    TensorField dB = exterior_derivative(B);
    DorfmanContext plain(H);
    DorfmanContext shifted(H + dB);
    TwistCheck r;
    Expr dp = pairing(b_twist(a, B), b_twist(b, B)) - pairing(a, b);
    r.pairing = worst(dp, *B.chart()).max_abs;
    GenSection lhs = b_twist(shifted.bracket(a, b), B);
    GenSection rhs = plain.bracket(b_twist(a, B), b_twist(b, B));
    r.bracket = worst(to_frame(lhs - rhs), *B.chart()).max_abs;
    return r;
}

TensorField theta_from_B(const TensorField& B) {
    require_rank(B, 2, Variance::Down, "theta_from_B");
    check_antisymmetric(B);
    int n = B.dim();
    if (n % 2 != 0) throw SingularB("a 2-form in odd dimension is never invertible");
    ExprMatrix m = to_matrix(B);
    Expr det = determinant(m);
    double smallest = INFINITY;
    for (const auto& p : B.chart()->sample_points()) smallest = std::min(smallest, std::abs(evaluate(det, p)));
    if (!(smallest > 1e-10)) throw SingularB("B is singular at a sample point");
    return to_tensor(inverse(m), B.chart(), Variance::Up, Variance::Up);
}

TensorField sharp(const TensorField& theta, const TensorField& xi) {
    require_rank(theta, 2, Variance::Up, "sharp");
    require_form(xi, "sharp");
    return matrix_apply_vec(theta, xi);
}

GenSection theta_twist(const GenSection& s, const TensorField& theta, const TensorField& B) {
    return {sharp(theta, s.form), s.form - form_of(B, s.vec)};
}

GenSection theta_twist_inverse(const GenSection& s, const TensorField& theta, const TensorField& B) {
    return {s.vec - sharp(theta, s.form), form_of(B, s.vec)};
}

ExprMatrix theta_twist_matrix(const TensorField& theta, const TensorField& B) {
    int n = B.dim();
    ExprMatrix m(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        m(n + a, n + a) = Expr(1.0);
        for (int b = 0; b < n; ++b) {
            m(a, n + b) = theta(a, b);
            m(n + a, b) = -B(a, b);
        }
    }
    return m;
}

ExprMatrix theta_twist_inverse_matrix(const TensorField& theta, const TensorField& B) {
    int n = B.dim();
    ExprMatrix m(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        m(a, a) = Expr(1.0);
        for (int b = 0; b < n; ++b) {
            m(a, n + b) = -theta(a, b);
            m(n + a, b) = B(a, b);
        }
    }
    return m;
}

GenSection apply(const ExprMatrix& M, const GenSection& s) {
    auto c = to_frame(s);
    if (M.cols != static_cast<int>(c.size()) || M.rows != M.cols) throw ValidationError("matrix size mismatch");
    std::vector<Expr> r(c.size());
    for (int i = 0; i < M.rows; ++i) {
        std::vector<Expr> terms;
        for (int j = 0; j < M.cols; ++j)
            if (!M(i, j).is_zero() && !c[static_cast<std::size_t>(j)].is_zero())
                terms.push_back(M(i, j) * c[static_cast<std::size_t>(j)]);
        r[static_cast<std::size_t>(i)] = add(std::move(terms));
    }
    return from_frame(r, s.chart());
}

TensorField koszul(const TensorField& xi, const TensorField& eta, const TensorField& theta, const TensorField& H) {
    require_form(xi, "koszul");
    require_form(eta, "koszul");
    TensorField tx = sharp(theta, xi), te = sharp(theta, eta);
    return lie_derivative_form(tx, eta) - interior_d(te, xi) + contract_two(H, tx, te);
}

TensorField d_theta(const Expr& f, const TensorField& theta) {
    require_rank(theta, 2, Variance::Up, "d_theta");
    int n = theta.dim();
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int a = 0; a < n; ++a)
            if (!theta(a, k).is_zero()) terms.push_back(differentiate(f, a) * theta(a, k));
        c[static_cast<std::size_t>(k)] = add(std::move(terms));
    }
    return TensorField::vector(theta.chart(), std::move(c));
}

Expr poisson_bracket(const Expr& f, const Expr& g, const TensorField& theta) {
    auto chart = theta.chart();
    int n = theta.dim();
    std::vector<Expr> df(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) df[static_cast<std::size_t>(a)] = differentiate(f, a);
    return directional(sharp(theta, TensorField::covector(chart, std::move(df))), g);
}

APair a_dorfman(const APair& a, const APair& b, const TensorField& theta, const TensorField& twist,
                const TensorField& H_A) {
    require_form(a.form, "a_dorfman");
    require_vector(a.vec, "a_dorfman");
    require_rank(H_A, 3, Variance::Up, "a_dorfman");
    auto chart = theta.chart();
    int n = theta.dim();
    APair r;
    r.form = koszul(a.form, b.form, theta, twist);
    TensorField anchor_a = sharp(theta, a.form);
    TensorField anchor_b = sharp(theta, b.form);
    std::vector<Expr> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        TensorField dk = coordinate_form(chart, k);
        TensorField anchor_k = sharp(theta, dk);
        std::vector<Expr> terms;
        // (L^A_phi vartheta')(dx^k) = a(phi)<vartheta', dx^k> - <vartheta', [phi, dx^k]_A>
        terms.push_back(directional(anchor_a, b.vec(k)));
        TensorField br = koszul(a.form, dk, theta, twist);
        for (int m = 0; m < n; ++m)
            if (!b.vec(m).is_zero()) terms.push_back(-(b.vec(m) * br(m)));
        // (d^A vartheta)(phi', dx^k) = a(phi')<vartheta, dx^k> - a(dx^k)<vartheta, phi'> - <vartheta, [phi', dx^k]_A>
        std::vector<Expr> pair_ab;
        for (int m = 0; m < n; ++m) pair_ab.push_back(a.vec(m) * b.form(m));
        Expr vt_phi = add(std::move(pair_ab));
        terms.push_back(-directional(anchor_b, a.vec(k)));
        terms.push_back(directional(anchor_k, vt_phi));
        TensorField br2 = koszul(b.form, dk, theta, twist);
        for (int m = 0; m < n; ++m)
            if (!a.vec(m).is_zero()) terms.push_back(a.vec(m) * br2(m));
        // - H_A(phi, phi', dx^k)
        for (int i = 0; i < n; ++i) {
            if (a.form(i).is_zero()) continue;
            for (int j = 0; j < n; ++j)
                if (!b.form(j).is_zero() && !H_A(i, j, k).is_zero())
                    terms.push_back(-(H_A(i, j, k) * a.form(i) * b.form(j)));
        }
        c[static_cast<std::size_t>(k)] = add(std::move(terms));
    }
    r.vec = TensorField::vector(chart, std::move(c));
    return r;
}

TensorField h_theta(const TensorField& H, const TensorField& theta) {
    require_rank(H, 3, Variance::Down, "h_theta");
    require_rank(theta, 2, Variance::Up, "h_theta");
    int n = theta.dim();
    auto chart = theta.chart();
    // Contract one slot at a time: T^{i..} = H_{a..} theta^{ai}.
    auto lift_first = [&](const TensorField& t, int slot) {
        std::vector<Variance> slots = t.slots();
        slots[static_cast<std::size_t>(slot)] = Variance::Up;
        TensorField r(chart, slots);
        for (std::size_t f = 0; f < r.size(); ++f) {
            auto idx = r.multi_index(f);
            int i = idx[static_cast<std::size_t>(slot)];
            std::vector<Expr> terms;
            for (int a = 0; a < n; ++a) {
                if (theta(a, i).is_zero()) continue;
                idx[static_cast<std::size_t>(slot)] = a;
                if (!t.at(idx).is_zero()) terms.push_back(t.at(idx) * theta(a, i));
            }
            r.components()[f] = add(std::move(terms));
        }
        return r;
    };
    return lift_first(lift_first(lift_first(H, 0), 1), 2);
}

TensorField schouten_check(const TensorField& theta, const TensorField& twist) {
    require_rank(theta, 2, Variance::Up, "schouten_check");
    require_rank(twist, 3, Variance::Down, "schouten_check");
    check_antisymmetric(theta);
    auto chart = theta.chart();
    int n = theta.dim();
    TensorField zero_twist = TensorField::uniform(chart, 3, Variance::Down);
    TensorField r = TensorField::uniform(chart, 3, Variance::Up);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TensorField xi = coordinate_form(chart, i), eta = coordinate_form(chart, j);
            TensorField ti = sharp(theta, xi), tj = sharp(theta, eta);
            // 1/2 [theta,theta]_S(xi, eta, .) = [theta xi, theta eta] - theta(L_{theta xi} eta - i_{theta eta} d xi)
            TensorField s = lie_bracket(ti, tj) - sharp(theta, koszul(xi, eta, theta, zero_twist));
            TensorField h = contract_two(twist, ti, tj);
            TensorField th = sharp(theta, h);  // h_d theta^{kd}
            for (int k = 0; k < n; ++k) {
                // twist(theta xi, theta eta, theta dx^k) = h_d theta^{dk} = -(theta h)^k
                r(i, j, k) = s(k) - th(k);
            }
        }
    return r;
}

LieAlgebroidCotangent::LieAlgebroidCotangent(TensorField theta, TensorField twist)
    : theta_(std::move(theta)), twist_(std::move(twist)) {
    require_rank(theta_, 2, Variance::Up, "LieAlgebroidCotangent");
    require_rank(twist_, 3, Variance::Down, "LieAlgebroidCotangent");
    require_same_chart(theta_, twist_);
}

void LieAlgebroidCotangent::validate(double tol) {
    TensorField res = schouten_check(theta_, twist_);
    Worst w = worst(res.components(), *theta_.chart());
    if (w.max_abs > tol) throw NotTwistedPoisson(w.max_abs);
    validated_ = true;
}

TensorField LieAlgebroidCotangent::bracket(const TensorField& xi, const TensorField& eta) const {
    return koszul(xi, eta, theta_, twist_);
}

void check_positive_definite(const TensorField& g) {
    int n = g.dim();
    ExprMatrix m = to_matrix(g);
    for (const auto& p : g.chart()->sample_points()) {
        std::vector<double> a = evaluate(m, p);
        std::vector<double> L(a.size(), 0.0);
        auto at = [n](std::vector<double>& v, int i, int j) -> double& {
            return v[static_cast<std::size_t>(i * n + j)];
        };
        for (int j = 0; j < n; ++j) {
            double d = at(a, j, j);
            for (int k = 0; k < j; ++k) d -= at(L, j, k) * at(L, j, k);
            if (!(d > 0.0)) throw NotPositiveDefinite("metric is not positive definite at a sample point");
            at(L, j, j) = std::sqrt(d);
            for (int i = j + 1; i < n; ++i) {
                double s = at(a, i, j);
                for (int k = 0; k < j; ++k) s -= at(L, i, k) * at(L, j, k);
                at(L, i, j) = s / at(L, j, j);
            }
        }
    }
}

namespace {

Metric checked_metric(TensorField g) {
    require_rank(g, 2, Variance::Down, "GeneralizedMetric");
    check_symmetric(g);
    check_positive_definite(g);
    return Metric(std::move(g));
}

}  // namespace

GeneralizedMetric::GeneralizedMetric(TensorField g, TensorField B) : metric_(checked_metric(std::move(g))), B_(std::move(B)) {
    require_rank(B_, 2, Variance::Down, "GeneralizedMetric");
    require_same_chart(metric_.g(), B_);
    check_antisymmetric(B_);
    int n = dim();
    ExprMatrix gm = to_matrix(metric_.g()), gi = to_matrix(metric_.inv()), bm = to_matrix(B_);
    ExprMatrix bgi = bm * gi;
    ExprMatrix tl = gm - bgi * bm;
    ExprMatrix bl = Expr(-1.0) * (gi * bm);
    block_ = ExprMatrix(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            block_(a, b) = tl(a, b);
            block_(a, n + b) = bgi(a, b);
            block_(n + a, b) = bl(a, b);
            block_(n + a, n + b) = gi(a, b);
        }
}

ExprMatrix GeneralizedMetric::block_inverse() const {
    ExprMatrix eta = gram_matrix(dim());
    return eta * block_ * eta;
}

ExprMatrix GeneralizedMetric::tau() const { return gram_matrix(dim()) * block_; }

ExprMatrix GeneralizedMetric::projector(int sign) const {
    ExprMatrix t = tau();
    ExprMatrix id = ExprMatrix::identity(2 * dim());
    ExprMatrix r = sign > 0 ? id + t : id - t;
    return Expr(0.5) * r;
}

ExprMatrix GeneralizedMetric::psi_matrix(int sign) const {
    int n = dim();
    ExprMatrix m(2 * n, n);
    for (int a = 0; a < n; ++a) {
        m(a, a) = Expr(1.0);
        for (int b = 0; b < n; ++b) m(n + b, a) = double(sign) * metric_.g()(b, a) + B_(b, a);
    }
    return m;
}

GenSection GeneralizedMetric::psi(int sign, const TensorField& X) const {
    require_vector(X, "psi");
    TensorField f = form_of(B_, X);
    TensorField gx = form_of(metric_.g(), X);
    return {X, sign > 0 ? f + gx : f - gx};
}

TensorField GeneralizedMetric::h() const {
    // rho*(xi) = (0, xi), so h_G is the lower right block.
    int n = dim();
    ExprMatrix m(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = block_(n + a, n + b);
    return to_tensor(m, chart(), Variance::Up, Variance::Up);
}

Expr GeneralizedMetric::apply(const GenSection& a, const GenSection& b) const {
    auto ca = to_frame(a), cb = to_frame(b);
    std::vector<Expr> terms;
    for (int i = 0; i < block_.rows; ++i) {
        if (ca[static_cast<std::size_t>(i)].is_zero()) continue;
        for (int j = 0; j < block_.cols; ++j)
            if (!block_(i, j).is_zero() && !cb[static_cast<std::size_t>(j)].is_zero())
                terms.push_back(ca[static_cast<std::size_t>(i)] * block_(i, j) * cb[static_cast<std::size_t>(j)]);
    }
    return add(std::move(terms));
}

}  // namespace gencourant
