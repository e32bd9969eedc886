#include "gencourant/riemann.hpp"

#include "gencourant/errors.hpp"

namespace gencourant {

namespace {

std::size_t idx3(int n, int a, int b, int c) {
    auto N = static_cast<std::size_t>(n);
    return (static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)) * N + static_cast<std::size_t>(c);
}

void require_form(const TensorField& t, const char* what) {
    for (auto v : t.slots())
        if (v != Variance::Down) throw SlotError(std::string(what) + " needs a covariant field");
}

}  // namespace

Christoffel christoffel(const TensorField& g, const TensorField& gi) {
    int n = g.dim();
    Christoffel G{g.chart(), std::vector<Expr>(static_cast<std::size_t>(n * n * n))};
    // First kind: [ij,l] = 1/2 (d_i g_lj + d_j g_il - d_l g_ij)
    std::vector<Expr> first(static_cast<std::size_t>(n * n * n));
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Expr e = 0.5 * add({differentiate(g(l, j), i), differentiate(g(i, l), j), neg(differentiate(g(i, j), l))});
                first[idx3(n, l, i, j)] = e;
                first[idx3(n, l, j, i)] = e;
            }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                std::vector<Expr> terms;
                for (int l = 0; l < n; ++l) {
                    const Expr& f = first[idx3(n, l, i, j)];
                    if (!f.is_zero()) terms.push_back(gi(k, l) * f);
                }
                Expr e = add(std::move(terms));
                G.c[idx3(n, k, i, j)] = e;
                G.c[idx3(n, k, j, i)] = e;
            }
    return G;
}

Christoffel christoffel(const TensorField& g) { return christoffel(g, inverse_metric(g)); }

Metric::Metric(TensorField g) : g_(std::move(g)) {
    if (g_.rank() != 2 || g_.variance(0) != Variance::Down || g_.variance(1) != Variance::Down)
        throw SlotError("metric must be a (0,2) field");
    check_symmetric(g_);
    inv_ = inverse_metric(g_);
    gamma_ = gencourant::christoffel(g_, inv_);
}

TensorField covariant_derivative(const TensorField& t, const Christoffel& G) {
    if (!t.tensorial()) throw SlotError("covariant_derivative: input is flagged non-tensorial");
    int n = t.dim();
    TensorField d = coordinate_gradient(t);
    TensorField r(t.chart(), d.slots());
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        int mu = idx[0];
        std::vector<Expr> terms{d.components()[f]};
        std::vector<int> sub(idx.begin() + 1, idx.end());
        for (int s = 0; s < t.rank(); ++s) {
            auto su = static_cast<std::size_t>(s);
            int a = sub[su];
            for (int b = 0; b < n; ++b) {
                auto j = sub;
                j[su] = b;
                const Expr& c = t.at(j);
                if (c.is_zero()) continue;
                if (t.variance(s) == Variance::Up) {
                    const Expr& g = G(a, mu, b);
                    if (!g.is_zero()) terms.push_back(g * c);
                } else {
                    const Expr& g = G(b, mu, a);
                    if (!g.is_zero()) terms.push_back(neg(g * c));
                }
            }
        }
        r.components()[f] = add(std::move(terms));
    }
    return r;
}

Curvature curvature_package(const Metric& m) {
    int n = m.dim();
    const auto& G = m.christoffel();
    TensorField R(m.chart(), {Variance::Up, Variance::Down, Variance::Down, Variance::Down});
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (j < i) {
                        R(k, l, i, j) = neg(R(k, l, j, i));
                        continue;
                    }
                    std::vector<Expr> terms{differentiate(G(k, j, l), i), neg(differentiate(G(k, i, l), j))};
                    for (int p = 0; p < n; ++p) {
                        terms.push_back(G(k, i, p) * G(p, j, l));
                        terms.push_back(neg(G(k, j, p) * G(p, i, l)));
                    }
                    R(k, l, i, j) = add(std::move(terms));
                }
    TensorField Ric = TensorField::uniform(m.chart(), 2, Variance::Down);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> terms;
            for (int k = 0; k < n; ++k) terms.push_back(R(k, l, k, j));
            Ric(l, j) = add(std::move(terms));
        }
    std::vector<Expr> terms;
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) terms.push_back(m.inv()(l, j) * Ric(l, j));
    return Curvature{std::move(R), std::move(Ric), add(std::move(terms))};
}

Expr form_inner(const TensorField& a, const TensorField& b, const Metric& m) {
    if (a.rank() != b.rank()) throw DegreeMismatch("forms of degree " + std::to_string(a.rank()) + " and " + std::to_string(b.rank()));
    require_form(a, "form_inner");
    require_form(b, "form_inner");
    TensorField up = b;
    for (int s = 0; s < up.rank(); ++s) up = raise_index(up, m.inv(), s);
    double fact = 1.0;
    for (int k = 2; k <= a.rank(); ++k) fact *= k;
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Expr t = a.components()[i] * up.components()[i];
        if (!t.is_zero()) terms.push_back(t);
    }
    return (1.0 / fact) * add(std::move(terms));
}

TensorField codifferential(const TensorField& form, const Metric& m) {
    require_form(form, "codifferential");
    if (form.rank() < 1) throw DegreeMismatch("codifferential of a function");
    TensorField nab = covariant_derivative(form, m.christoffel());
    // -g^{kl} (nabla_k a)_{l ...}
    TensorField r = TensorField::uniform(form.chart(), form.rank() - 1, Variance::Down);
    int n = form.dim();
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        std::vector<int> full(idx.size() + 2);
        std::copy(idx.begin(), idx.end(), full.begin() + 2);
        std::vector<Expr> terms;
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                full[0] = k;
                full[1] = l;
                Expr t = m.inv()(k, l) * nab.at(full);
                if (!t.is_zero()) terms.push_back(t);
            }
        r.components()[f] = neg(add(std::move(terms)));
    }
    return r;
}

TensorField codifferential(const TensorField& form, const Metric& m, const ExprMatrix& E) {
    require_form(form, "codifferential");
    if (form.rank() < 1) throw DegreeMismatch("codifferential of a function");
    int n = form.dim();
    if (E.rows != n || E.cols != n) throw SlotError("frame matrix has the wrong size");
    ExprMatrix Ei = inverse(E);
    TensorField nab = covariant_derivative(form, m.christoffel());
    // psi_k = E^mu_k d_mu, psi^k_g has components g^{rho nu} (E^-1)^k_nu.
    std::vector<Expr> dual(static_cast<std::size_t>(n * n));
    for (int k = 0; k < n; ++k)
        for (int rho = 0; rho < n; ++rho) {
            std::vector<Expr> terms;
            for (int nu = 0; nu < n; ++nu) terms.push_back(m.inv()(rho, nu) * Ei(k, nu));
            dual[static_cast<std::size_t>(k * n + rho)] = add(std::move(terms));
        }
    TensorField r = TensorField::uniform(form.chart(), form.rank() - 1, Variance::Down);
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        std::vector<int> full(idx.size() + 2);
        std::copy(idx.begin(), idx.end(), full.begin() + 2);
        std::vector<Expr> terms;
        for (int k = 0; k < n; ++k)
            for (int mu = 0; mu < n; ++mu)
                for (int rho = 0; rho < n; ++rho) {
                    full[0] = mu;
                    full[1] = rho;
                    Expr t = mul({E(mu, k), dual[static_cast<std::size_t>(k * n + rho)], nab.at(full)});
                    if (!t.is_zero()) terms.push_back(t);
                }
        r.components()[f] = neg(add(std::move(terms)));
    }
    return r;
}

Expr divergence(const TensorField& v, const Metric& m) {
    if (v.rank() != 1 || v.variance(0) != Variance::Up) throw SlotError("divergence needs a vector field");
    return contract(covariant_derivative(v, m.christoffel()), 1, 0).value();
}

TensorField hessian(const Expr& phi, const Metric& m) {
    TensorField dphi(m.chart(), {Variance::Down});
    for (int i = 0; i < m.dim(); ++i) dphi(i) = differentiate(phi, i);
    return covariant_derivative(dphi, m.christoffel());
}

LaplaceData laplace_divergence(const Expr& phi, const Metric& m) {
    int n = m.dim();
    TensorField dphi(m.chart(), {Variance::Down});
    for (int i = 0; i < n; ++i) dphi(i) = differentiate(phi, i);
    TensorField grad = raise_index(dphi, m.inv(), 0);
    Expr lap = divergence(grad, m);
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) terms.push_back(grad(i) * dphi(i));
    return LaplaceData{lap, grad, add(std::move(terms))};
}

Expr norm2_vector(const TensorField& v, const Metric& m) {
    std::vector<Expr> terms;
    int n = m.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) terms.push_back(mul({m.g()(i, j), v(i), v(j)}));
    return add(std::move(terms));
}

Expr norm2_covector(const TensorField& xi, const Metric& m) {
    std::vector<Expr> terms;
    int n = m.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) terms.push_back(mul({m.inv()(i, j), xi(i), xi(j)}));
    return add(std::move(terms));
}

}  // namespace gencourant
