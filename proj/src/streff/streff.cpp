#include "gencourant/streff.hpp"

#include <cmath>

#include "gencourant/errors.hpp"
#include "gencourant/matrix.hpp"
#include "gencourant/random.hpp"
#include "gencourant/sampling.hpp"

namespace gencourant {

namespace {

std::size_t at3(int n, int a, int b, int c) {
    return (static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)) *
               static_cast<std::size_t>(n) +
           static_cast<std::size_t>(c);
}

TensorField coord_form(const ChartPtr& chart, int i) {
    std::vector<Expr> c(static_cast<std::size_t>(chart->dim()), Expr(0.0));
    c[static_cast<std::size_t>(i)] = Expr(1.0);
    return TensorField::covector(chart, std::move(c));
}

TensorField zero_three_form(const ChartPtr& chart) { return TensorField::uniform(chart, 3, Variance::Down); }

}  // namespace

// ---- backgrounds ----

Background Background::with_h(TensorField g, TensorField B, Expr phi, TensorField H, double tol) {
    check_positive_definite(g);
    check_symmetric(g);
    check_antisymmetric(B);
    check_antisymmetric(H);
    check_closed(H, tol);
    auto chart = g.chart();
    require_same_chart(g, B);
    require_same_chart(g, H);
    return Background{chart, std::move(g), std::move(B), std::move(phi), std::move(H)};
}

Background Background::with_potential(TensorField g, TensorField B, Expr phi, const TensorField& B0) {
    check_antisymmetric(B0);
    return with_h(std::move(g), std::move(B), std::move(phi), exterior_derivative(B0));
}

TensorField Background::h_prime() const { return H + exterior_derivative(B); }

Background random_background(Rng& rng, ChartPtr chart, double strength) {
    int n = chart->dim();
    auto g = random_metric(rng, chart, strength);
    auto B = random_form(rng, chart, 2, 2, 0.5 * strength);
    if (n % 2 == 0)
        for (int k = 0; k < n; k += 2) {
            B(k, k + 1) = B(k, k + 1) + 1.0;
            B(k + 1, k) = B(k + 1, k) - 1.0;
        }
    auto phi = random_polynomial(rng, n, 2, strength);
    auto H = n >= 3 ? exterior_derivative(random_form(rng, chart, 2, 2, strength)) : zero_three_form(chart);
    return Background::with_h(std::move(g), std::move(B), std::move(phi), std::move(H));
}

Background flat_background(ChartPtr chart) {
    int n = chart->dim();
    auto g = TensorField::uniform(chart, 2, Variance::Down);
    for (int i = 0; i < n; ++i) g(i, i) = Expr(1.0);
    auto B = TensorField::uniform(chart, 2, Variance::Down);
    if (n % 2 == 0)
        for (int k = 0; k < n; k += 2) {
            B(k, k + 1) = Expr(1.0);
            B(k + 1, k) = Expr(-1.0);
        }
    return Background::with_h(std::move(g), std::move(B), Expr(0.0), zero_three_form(chart));
}

// ---- beta functions ----

BetaResiduals beta_all(const Background& bg) {
    int n = bg.dim();
    Metric m(bg.g);
    auto Hp = bg.h_prime();
    auto curv = curvature_package(m);
    auto hess = hessian(bg.phi, m);
    auto lap = laplace_divergence(bg.phi, m);
    auto dH = codifferential(Hp, m);
    auto Hsq = form_inner(Hp, Hp, m);

    std::vector<TensorField> iH;
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> e(static_cast<std::size_t>(n), Expr(0.0));
        e[static_cast<std::size_t>(i)] = Expr(1.0);
        iH.push_back(interior(TensorField::vector(bg.chart, std::move(e)), Hp));
    }

    BetaResiduals r;
    r.beta_g = TensorField::uniform(bg.chart, 2, Variance::Down);
    r.beta_B = TensorField::uniform(bg.chart, 2, Variance::Down);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            r.beta_g(i, j) = add({curv.ricci(i, j), -0.5 * form_inner(iH[static_cast<std::size_t>(i)],
                                                                     iH[static_cast<std::size_t>(j)], m),
                                  hess(i, j), hess(j, i)});
            std::vector<Expr> t{0.5 * dH(i, j)};
            for (int k = 0; k < n; ++k) t.push_back(Hp(i, j, k) * lap.gradient(k));
            r.beta_B(i, j) = add(std::move(t));
        }
    r.beta_phi = add({curv.scalar, -0.5 * Hsq, 4.0 * lap.laplacian, -4.0 * lap.gradient_norm2});
    r.beta_phi_prime = add({-0.5 * lap.laplacian, lap.gradient_norm2, -0.25 * Hsq});
    return r;
}

BetaResiduals beta_index_form(const Background& bg) {
    int n = bg.dim();
    Metric m(bg.g);
    const auto& gi = m.inv();
    const auto& Gam = m.christoffel();
    auto Hp = bg.h_prime();
    auto curv = curvature_package(m);

    std::vector<Expr> dphi(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) dphi[static_cast<std::size_t>(k)] = differentiate(bg.phi, k);
    auto d = [&](int k) -> const Expr& { return dphi[static_cast<std::size_t>(k)]; };

    // (d_mu phi)_{;nu}
    auto hess = TensorField::uniform(bg.chart, 2, Variance::Down);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<Expr> t{differentiate(d(a), b)};
            for (int k = 0; k < n; ++k) t.push_back(-(Gam(k, a, b) * d(k)));
            hess(a, b) = add(std::move(t));
        }

    // H'_{lmn;r} at ((r*n + l)*n + m)*n + nu
    std::vector<Expr> nH;
    for (int r = 0; r < n; ++r)
        for (int l = 0; l < n; ++l)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    std::vector<Expr> t{differentiate(Hp(l, a, b), r)};
                    for (int s = 0; s < n; ++s) {
                        t.push_back(-(Gam(s, r, l) * Hp(s, a, b)));
                        t.push_back(-(Gam(s, r, a) * Hp(l, s, b)));
                        t.push_back(-(Gam(s, r, b) * Hp(l, a, s)));
                    }
                    nH.push_back(add(std::move(t)));
                }
    auto nabla_H = [&](int r, int l, int a, int b) -> const Expr& {
        return nH[((static_cast<std::size_t>(r) * n + l) * n + a) * n + static_cast<std::size_t>(b)];
    };

    auto HH = TensorField::uniform(bg.chart, 2, Variance::Down);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            std::vector<Expr> t;
            for (int l = 0; l < n; ++l)
                for (int k = 0; k < n; ++k)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) t.push_back(mul({Hp(mu, l, k), Hp(nu, a, b), gi(l, a), gi(k, b)}));
            HH(mu, nu) = add(std::move(t));
        }

    BetaResiduals r;
    r.beta_g = TensorField::uniform(bg.chart, 2, Variance::Down);
    r.beta_B = TensorField::uniform(bg.chart, 2, Variance::Down);
    std::vector<Expr> H2, box, grad2;
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            r.beta_g(mu, nu) = add({curv.ricci(mu, nu), -0.25 * HH(mu, nu), 2.0 * hess(mu, nu)});
            std::vector<Expr> t;
            for (int l = 0; l < n; ++l)
                for (int s = 0; s < n; ++s) {
                    t.push_back(-0.5 * gi(l, s) * nabla_H(s, l, mu, nu));
                    t.push_back(Hp(mu, nu, l) * gi(l, s) * d(s));
                }
            r.beta_B(mu, nu) = add(std::move(t));
            H2.push_back(gi(mu, nu) * HH(mu, nu));
            box.push_back(gi(mu, nu) * hess(mu, nu));
            grad2.push_back(gi(mu, nu) * d(mu) * d(nu));
        }
    Expr h2 = add(std::move(H2)), bx = add(std::move(box)), gr = add(std::move(grad2));
    r.beta_phi = add({curv.scalar, -(1.0 / 12.0) * h2, 4.0 * bx, -4.0 * gr});
    r.beta_phi_prime = add({-0.5 * bx, gr, -(1.0 / 24.0) * h2});
    return r;
}

TensorField beta_B_conformal(const Background& bg) {
    Metric m(bg.g);
    auto Hp = bg.h_prime();
    auto inner = codifferential(exp(-2.0 * bg.phi) * Hp, m);
    return (0.5 * exp(2.0 * bg.phi)) * inner;
}

// ---- central theorem ----

GenConnection central_connection(const Background& bg) {
    return untwist(dilaton_connection(bg.g, bg.B, bg.H, bg.phi), bg.B);
}

CentralResiduals central_residuals(const Background& bg) {
    GenCurvature curv(central_connection(bg));
    GeneralizedMetric G(bg.g, bg.B);
    auto beta = beta_all(bg);
    CentralResiduals r;
    r.scalar = curv.scalar_G(G.block_inverse()) - beta.beta_phi;
    r.ricci = ricci_compat_residual(curv, G) - (beta.beta_g - beta.beta_B);
    return r;
}

// ---- Lie algebroid T*M ----

AlgebroidConnection::AlgebroidConnection(TensorField theta, TensorField twist, TensorField G, double tol)
    : theta_(std::move(theta)), twist_(std::move(twist)), G_(std::move(G)) {
    LieAlgebroidCotangent A(theta_, twist_);
    A.validate(tol);
    check_symmetric(G_);
    check_positive_definite(G_);
    gA_ = inverse_metric(G_);
    int n = dim();
    auto chart = theta_.chart();
    c_.assign(static_cast<std::size_t>(n * n * n), Expr(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto b = A.bracket(coord_form(chart, i), coord_form(chart, j));
            for (int k = 0; k < n; ++k) c_[at3(n, k, i, j)] = b(k);
        }
    // C_{ijk} = g_A([e_i, e_j], e_k)
    std::vector<Expr> cl(c_.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::vector<Expr> t;
                for (int l = 0; l < n; ++l) t.push_back(structure(l, i, j) * gA_(l, k));
                cl[at3(n, i, j, k)] = add(std::move(t));
            }
    auto C = [&](int i, int j, int k) -> const Expr& { return cl[at3(n, i, j, k)]; };
    // 2 g_A(nabla_i e_j, e_k) = [e_i,e_j]_k + (L_i g_A e_j)_k + (i_j d g_A e_i)_k
    std::vector<Expr> low(c_.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Expr lie = rho(i, gA_(j, k)) - C(i, k, j);
                Expr in = rho(j, gA_(i, k)) - rho(k, gA_(i, j)) - C(j, k, i);
                low[at3(n, i, j, k)] = 0.5 * add({C(i, j, k), lie, in});
            }
    gamma_.assign(c_.size(), Expr(0.0));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<Expr> t;
                for (int l = 0; l < n; ++l) t.push_back(G_(k, l) * low[at3(n, i, j, l)]);
                gamma_[at3(n, k, i, j)] = add(std::move(t));
            }
}

Expr AlgebroidConnection::rho(int i, const Expr& f) const {
    std::vector<Expr> t;
    for (int mu = 0; mu < dim(); ++mu)
        if (!theta_(mu, i).is_zero()) t.push_back(theta_(mu, i) * differentiate(f, mu));
    return add(std::move(t));
}

const Expr& AlgebroidConnection::structure(int k, int i, int j) const { return c_[at3(dim(), k, i, j)]; }

const Expr& AlgebroidConnection::gamma(int k, int i, int j) const { return gamma_[at3(dim(), k, i, j)]; }

std::vector<Expr> AlgebroidConnection::covariant(const std::vector<Expr>& xi, const std::vector<Expr>& eta) const {
    int n = dim();
    std::vector<Expr> r(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> t;
        for (int i = 0; i < n; ++i) {
            t.push_back(xi[static_cast<std::size_t>(i)] * rho(i, eta[static_cast<std::size_t>(k)]));
            for (int j = 0; j < n; ++j)
                t.push_back(xi[static_cast<std::size_t>(i)] * eta[static_cast<std::size_t>(j)] * gamma(k, i, j));
        }
        r[static_cast<std::size_t>(k)] = add(std::move(t));
    }
    return r;
}

std::vector<Expr> AlgebroidConnection::bracket(const std::vector<Expr>& xi, const std::vector<Expr>& eta) const {
    auto chart = this->chart();
    auto b = koszul(TensorField::covector(chart, xi), TensorField::covector(chart, eta), theta_, twist_);
    return b.components();
}

AlgebroidCurvature algebroid_curvature(const AlgebroidConnection& c) {
    int n = c.dim();
    auto N = static_cast<std::size_t>(n);
    AlgebroidCurvature r;
    r.riemann.assign(N * N * N * N, Expr(0.0));
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::vector<Expr> t{c.rho(i, c.gamma(m, j, k)), -c.rho(j, c.gamma(m, i, k))};
                    for (int l = 0; l < n; ++l) {
                        t.push_back(c.gamma(l, j, k) * c.gamma(m, i, l));
                        t.push_back(-(c.gamma(l, i, k) * c.gamma(m, j, l)));
                        t.push_back(-(c.structure(l, i, j) * c.gamma(m, l, k)));
                    }
                    r.riemann[((m * N + k) * N + i) * N + j] = add(std::move(t));
                }
    r.ricci = TensorField::uniform(c.chart(), 2, Variance::Up);
    std::vector<Expr> s;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> t;
            for (int i = 0; i < n; ++i) t.push_back(r.riemann[((i * N + k) * N + i) * N + j]);
            r.ricci(k, j) = add(std::move(t));
            s.push_back(c.G()(k, j) * r.ricci(k, j));
        }
    r.scalar = add(std::move(s));
    return r;
}

TensorField algebroid_hessian(const AlgebroidConnection& c, const Expr& phi) {
    int n = c.dim();
    std::vector<Expr> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = c.rho(j, phi);
    auto h = TensorField::uniform(c.chart(), 2, Variance::Up);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> t{c.rho(i, v[static_cast<std::size_t>(j)])};
            for (int l = 0; l < n; ++l) t.push_back(-(c.gamma(l, i, j) * v[static_cast<std::size_t>(l)]));
            h(i, j) = add(std::move(t));
        }
    return h;
}

Expr algebroid_laplacian(const AlgebroidConnection& c, const Expr& phi) {
    auto h = algebroid_hessian(c, phi);
    std::vector<Expr> t;
    for (int i = 0; i < c.dim(); ++i)
        for (int j = 0; j < c.dim(); ++j) t.push_back(c.G()(i, j) * h(i, j));
    return add(std::move(t));
}

TensorField algebroid_covariant_derivative(const AlgebroidConnection& c, const TensorField& t) {
    for (int s = 0; s < t.rank(); ++s)
        if (t.variance(s) != Variance::Up) throw SlotError("algebroid_covariant_derivative needs a (p,0) field");
    int n = c.dim();
    std::vector<Variance> slots(static_cast<std::size_t>(t.rank() + 1), Variance::Up);
    TensorField r(c.chart(), slots);
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        int m = idx[0];
        std::vector<int> rest(idx.begin() + 1, idx.end());
        std::vector<Expr> terms{c.rho(m, t.at(rest))};
        for (std::size_t s = 0; s < rest.size(); ++s) {
            int keep = rest[s];
            for (int p = 0; p < n; ++p) {
                rest[s] = p;
                const Expr& v = t.at(rest);
                if (!v.is_zero()) terms.push_back(-(c.gamma(p, m, keep) * v));
            }
            rest[s] = keep;
        }
        r.components()[f] = add(std::move(terms));
    }
    return r;
}

// ---- symplectic side ----

SymplecticPackage symplectic_package(const Background& bg) {
    auto theta = theta_from_B(bg.B);
    Metric m(bg.g);
    auto Bm = to_matrix(bg.B);
    auto Gm = Expr(-1.0) * (Bm * to_matrix(m.inv()) * Bm);
    auto G = to_tensor(Gm, bg.chart, Variance::Down, Variance::Down);
    auto dB = exterior_derivative(bg.B);
    auto Hp_theta = h_theta(bg.h_prime(), theta);
    std::optional<TensorField> Theta;
    if (worst(bg.H.components(), *bg.chart).max_abs == 0.0)
        Theta = -1.0 * schouten_check(theta, zero_three_form(bg.chart));
    AlgebroidConnection conn(theta, dB, G);
    auto curv = algebroid_curvature(conn);
    return SymplecticPackage{std::move(theta), std::move(G), std::move(Hp_theta), std::move(Theta), std::move(conn),
                             std::move(curv)};
}

SymplecticResiduals symplectic_residuals(const Background& bg) { return symplectic_residuals(bg, symplectic_package(bg)); }

SymplecticResiduals symplectic_residuals(const Background& bg, const SymplecticPackage& pkg) {
    const auto& c = pkg.connection;
    const auto& G = pkg.G;
    const auto& H = pkg.Hp_theta;
    int n = c.dim();
    auto hess = algebroid_hessian(c, bg.phi);
    auto nH = algebroid_covariant_derivative(c, H);
    std::vector<Expr> v(static_cast<std::size_t>(n)), Gv(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = c.rho(j, bg.phi);
    for (int l = 0; l < n; ++l) {
        std::vector<Expr> t;
        for (int k = 0; k < n; ++k) t.push_back(G(l, k) * v[static_cast<std::size_t>(k)]);
        Gv[static_cast<std::size_t>(l)] = add(std::move(t));
    }

    std::vector<Expr> hh, lap, norm;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            lap.push_back(G(i, j) * hess(i, j));
            norm.push_back(G(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)]);
            for (int k = 0; k < n; ++k)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int d = 0; d < n; ++d)
                            if (!H(i, j, k).is_zero() && !H(a, b, d).is_zero())
                                hh.push_back(mul({H(i, j, k), H(a, b, d), G(i, a), G(j, b), G(k, d)}));
        }

    SymplecticResiduals r;
    r.scalar = add({pkg.curvature.scalar, -(1.0 / 12.0) * add(std::move(hh)), 4.0 * add(std::move(lap)),
                    -4.0 * add(std::move(norm))});
    r.sym = TensorField::uniform(c.chart(), 2, Variance::Up);
    r.skew = TensorField::uniform(c.chart(), 2, Variance::Up);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> iH;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            if (!H(i, a, b).is_zero() && !H(j, p, q).is_zero())
                                iH.push_back(mul({H(i, a, b), H(j, p, q), G(a, p), G(b, q)}));
            r.sym(i, j) = add({pkg.curvature.ricci(i, j), -0.25 * add(std::move(iH)), hess(i, j), hess(j, i)});
            std::vector<Expr> t;
            for (int l = 0; l < n; ++l) {
                t.push_back(H(i, j, l) * Gv[static_cast<std::size_t>(l)]);
                for (int k = 0; k < n; ++k) t.push_back(-0.5 * G(k, l) * nH(k, l, i, j));
            }
            r.skew(i, j) = add(std::move(t));
        }
    return r;
}

GenConnection theta_transport(const GenConnection& conn, const TensorField& theta, const TensorField& B) {
    return conn.transported(theta_twist_inverse_matrix(theta, B), theta_twist_matrix(theta, B));
}

ExprMatrix g_theta_inverse(const SymplecticPackage& pkg) {
    int n = pkg.connection.dim();
    ExprMatrix r(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            r(a, b) = pkg.connection.g_A()(a, b);
            r(n + a, n + b) = pkg.G(a, b);
        }
    return r;
}

ExprMatrix theta_psi_matrix(const SymplecticPackage& pkg, int sign) {
    int n = pkg.connection.dim();
    ExprMatrix r(2 * n, n);
    for (int i = 0; i < n; ++i) {
        r(n + i, i) = Expr(1.0);
        for (int mu = 0; mu < n; ++mu) r(mu, i) = Expr(double(sign)) * pkg.connection.g_A()(mu, i);
    }
    return r;
}

EquivalenceReport equivalence_report(const Background& bg, double threshold) {
    int n = bg.dim();
    int N = 2 * n;
    auto pkg = symplectic_package(bg);
    auto beta = beta_all(bg);
    auto sym = symplectic_residuals(bg, pkg);

    std::vector<Expr> b = beta.beta_g.components();
    b.insert(b.end(), beta.beta_B.components().begin(), beta.beta_B.components().end());
    b.push_back(beta.beta_phi);
    std::vector<Expr> s = sym.sym.components();
    s.insert(s.end(), sym.skew.components().begin(), sym.skew.components().end());
    s.push_back(sym.scalar);

    auto conn = central_connection(bg);
    GenCurvature curv(conn), curv_t(theta_transport(conn, pkg.theta, bg.B));
    auto F = theta_twist_matrix(pkg.theta, bg.B);
    const auto& Ric = curv.ricci();
    const auto& Rt = curv_t.ricci();
    std::vector<Expr> tr;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) {
            std::vector<Expr> t{Rt(A, B)};
            for (int P = 0; P < N; ++P)
                for (int Q = 0; Q < N; ++Q)
                    if (!F(P, A).is_zero() && !F(Q, B).is_zero()) t.push_back(-(F(P, A) * Ric(P, Q) * F(Q, B)));
            tr.push_back(add(std::move(t)));
        }

    EquivalenceReport r;
    auto wb = worst(b, *bg.chart), ws = worst(s, *bg.chart), wt = worst(tr, *bg.chart);
    r.beta_max = wb.max_abs;
    r.symplectic_max = ws.max_abs;
    r.transport_max = wt.max_abs;
    r.beta_point = wb.point;
    r.symplectic_point = ws.point;
    r.transport_point = wt.point;
    r.beta_vanish = r.beta_max < threshold;
    r.symplectic_vanish = r.symplectic_max < threshold;
    if (r.beta_vanish && r.symplectic_vanish)
        r.verdict = "equivalent: both on-shell";
    else if (!r.beta_vanish && !r.symplectic_vanish)
        r.verdict = "equivalent: both off-shell";
    else
        r.verdict = "inconsistent";
    return r;
}

}  // namespace gencourant
