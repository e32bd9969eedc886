#include "gencourant/gconn.hpp"

#include <algorithm>
#include <cmath>

#include "gencourant/errors.hpp"
#include "gencourant/sampling.hpp"

namespace gencourant {

namespace {

std::size_t at3(int N, int a, int b, int c) {
    auto n = static_cast<std::size_t>(N);
    return (static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)) * n + static_cast<std::size_t>(c);
}

std::vector<Expr> column(const ExprMatrix& M, int j) {
    std::vector<Expr> v(static_cast<std::size_t>(M.rows));
    for (int i = 0; i < M.rows; ++i) v[static_cast<std::size_t>(i)] = M(i, j);
    return v;
}

std::vector<Expr> mat_vec(const ExprMatrix& M, const std::vector<Expr>& v) {
    std::vector<Expr> r(static_cast<std::size_t>(M.rows));
    for (int i = 0; i < M.rows; ++i) {
        std::vector<Expr> t;
        for (int j = 0; j < M.cols; ++j) t.push_back(M(i, j) * v[static_cast<std::size_t>(j)]);
        r[static_cast<std::size_t>(i)] = add(std::move(t));
    }
    return r;
}

void require_rank3(const TensorField& t, Variance v, const char* what) {
    if (t.rank() != 3) throw SlotError(std::string(what) + " must have rank 3");
    for (int s = 0; s < 3; ++s)
        if (t.variance(s) != v) throw SlotError(std::string(what) + " has the wrong variance");
}

}  // namespace

FrameTensor::FrameTensor(ChartPtr chart, int rank_e, int rank)
    : chart_(std::move(chart)), N_(rank_e), rank_(rank) {
    std::size_t s = 1;
    for (int i = 0; i < rank; ++i) s *= static_cast<std::size_t>(rank_e);
    c_.resize(s);
}

std::size_t FrameTensor::flat(std::initializer_list<int> idx) const {
    std::size_t f = 0;
    for (int i : idx) f = f * static_cast<std::size_t>(N_) + static_cast<std::size_t>(i);
    return f;
}

FrameTensor operator+(const FrameTensor& a, const FrameTensor& b) {
    FrameTensor r = a;
    for (std::size_t i = 0; i < r.components().size(); ++i) r.components()[i] += b.components()[i];
    return r;
}

FrameTensor operator-(const FrameTensor& a, const FrameTensor& b) {
    FrameTensor r = a;
    for (std::size_t i = 0; i < r.components().size(); ++i) r.components()[i] -= b.components()[i];
    return r;
}

// ---- frames ----

CourantFrame::CourantFrame(ChartPtr chart, ExprMatrix anchor, std::vector<Expr> structure)
    : chart_(std::move(chart)), anchor_(std::move(anchor)), c_(std::move(structure)) {}

CourantFrame CourantFrame::standard(const TensorField& H, double tol) {
    check_closed(H, tol);
    int n = H.dim();
    int N = 2 * n;
    ExprMatrix rho(N, n);
    for (int a = 0; a < n; ++a) rho(a, a) = Expr(1.0);
    std::vector<Expr> c(static_cast<std::size_t>(N * N * N));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int k = 0; k < n; ++k) c[at3(N, n + k, a, b)] = -H(a, b, k);
    return CourantFrame(H.chart(), std::move(rho), std::move(c));
}

const Expr& CourantFrame::structure(int C, int A, int B) const { return c_[at3(rank(), C, A, B)]; }

Expr CourantFrame::rho(int A, const Expr& f) const {
    std::vector<Expr> t;
    for (int mu = 0; mu < dim(); ++mu)
        if (!anchor_(A, mu).is_zero()) t.push_back(anchor_(A, mu) * differentiate(f, mu));
    return add(std::move(t));
}

Expr CourantFrame::rho(const std::vector<Expr>& u, const Expr& f) const {
    std::vector<Expr> t;
    for (int A = 0; A < rank(); ++A)
        if (!u[static_cast<std::size_t>(A)].is_zero()) t.push_back(u[static_cast<std::size_t>(A)] * rho(A, f));
    return add(std::move(t));
}

std::vector<Expr> CourantFrame::D(const Expr& f) const {
    int n = dim();
    std::vector<Expr> r(static_cast<std::size_t>(rank()));
    for (int C = 0; C < rank(); ++C) r[static_cast<std::size_t>(C)] = rho(dual_index(C, n), f);
    return r;
}

Expr CourantFrame::pairing(const std::vector<Expr>& u, const std::vector<Expr>& v) const {
    int n = dim();
    std::vector<Expr> t;
    for (int A = 0; A < rank(); ++A)
        t.push_back(u[static_cast<std::size_t>(A)] * v[static_cast<std::size_t>(dual_index(A, n))]);
    return add(std::move(t));
}

std::vector<Expr> CourantFrame::bracket(const std::vector<Expr>& u, const std::vector<Expr>& v) const {
    int N = rank();
    int n = dim();
    std::vector<std::vector<Expr>> t(static_cast<std::size_t>(N));
    for (int A = 0; A < N; ++A) {
        const Expr& uA = u[static_cast<std::size_t>(A)];
        const Expr& vA = v[static_cast<std::size_t>(A)];
        for (int B = 0; B < N; ++B) {
            const Expr& vB = v[static_cast<std::size_t>(B)];
            if (!uA.is_zero() && !vB.is_zero())
                for (int C = 0; C < N; ++C) {
                    const Expr& c = structure(C, A, B);
                    if (!c.is_zero()) t[static_cast<std::size_t>(C)].push_back(uA * vB * c);
                }
        }
        if (!uA.is_zero())
            for (int B = 0; B < N; ++B) t[static_cast<std::size_t>(B)].push_back(uA * rho(A, v[static_cast<std::size_t>(B)]));
        if (!vA.is_zero())
            for (int B = 0; B < N; ++B) t[static_cast<std::size_t>(B)].push_back(-(vA * rho(A, u[static_cast<std::size_t>(B)])));
        const Expr& w = v[static_cast<std::size_t>(dual_index(A, n))];
        if (!w.is_zero()) {
            auto d = D(uA);
            for (int C = 0; C < N; ++C) t[static_cast<std::size_t>(C)].push_back(w * d[static_cast<std::size_t>(C)]);
        }
    }
    std::vector<Expr> r(static_cast<std::size_t>(N));
    for (int C = 0; C < N; ++C) r[static_cast<std::size_t>(C)] = add(std::move(t[static_cast<std::size_t>(C)]));
    return r;
}

CourantFrame CourantFrame::transported(const ExprMatrix& F, const ExprMatrix& Finv) const {
    int N = rank();
    int n = dim();
    ExprMatrix rho(N, n);
    for (int A = 0; A < N; ++A)
        for (int mu = 0; mu < n; ++mu) {
            std::vector<Expr> t;
            for (int P = 0; P < N; ++P) t.push_back(Finv(P, A) * anchor_(P, mu));
            rho(A, mu) = add(std::move(t));
        }
    std::vector<Expr> c(static_cast<std::size_t>(N * N * N));
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) {
            auto w = mat_vec(F, bracket(column(Finv, A), column(Finv, B)));
            for (int C = 0; C < N; ++C) c[at3(N, C, A, B)] = w[static_cast<std::size_t>(C)];
        }
    return CourantFrame(chart_, std::move(rho), std::move(c));
}

// ---- connections ----

GenConnection::GenConnection(CourantFrame frame, std::vector<Expr> gamma, Provenance p)
    : frame_(std::move(frame)), gamma_(std::move(gamma)), provenance_(p) {
    int N = rank();
    int n = dim();
    if (gamma_.size() != static_cast<std::size_t>(N * N * N)) throw SlotError("connection needs (2n)^3 coefficients");
    lowered_.resize(gamma_.size());
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) lowered_[at3(N, A, B, C)] = this->gamma(dual_index(C, n), A, B);
}

const Expr& GenConnection::gamma(int C, int A, int B) const { return gamma_[at3(rank(), C, A, B)]; }

const Expr& GenConnection::lowered(int A, int B, int C) const { return lowered_[at3(rank(), A, B, C)]; }

std::vector<Expr> GenConnection::covariant(const std::vector<Expr>& u, const std::vector<Expr>& v) const {
    int N = rank();
    std::vector<std::vector<Expr>> t(static_cast<std::size_t>(N));
    for (int A = 0; A < N; ++A) {
        const Expr& uA = u[static_cast<std::size_t>(A)];
        if (uA.is_zero()) continue;
        for (int C = 0; C < N; ++C) {
            t[static_cast<std::size_t>(C)].push_back(uA * frame_.rho(A, v[static_cast<std::size_t>(C)]));
            for (int B = 0; B < N; ++B) {
                const Expr& g = gamma(C, A, B);
                if (!g.is_zero() && !v[static_cast<std::size_t>(B)].is_zero())
                    t[static_cast<std::size_t>(C)].push_back(uA * v[static_cast<std::size_t>(B)] * g);
            }
        }
    }
    std::vector<Expr> r(static_cast<std::size_t>(N));
    for (int C = 0; C < N; ++C) r[static_cast<std::size_t>(C)] = add(std::move(t[static_cast<std::size_t>(C)]));
    return r;
}

GenConnection GenConnection::transported(const ExprMatrix& F, const ExprMatrix& Finv) const {
    int N = rank();
    std::vector<Expr> g(gamma_.size());
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) {
            auto w = mat_vec(F, covariant(column(Finv, A), column(Finv, B)));
            for (int C = 0; C < N; ++C) g[at3(N, C, A, B)] = w[static_cast<std::size_t>(C)];
        }
    return GenConnection(frame_.transported(F, Finv), std::move(g), provenance_);
}

GenConnection GenConnection::plus(const FrameTensor& K, Provenance p) const {
    int N = rank();
    int n = dim();
    auto g = gamma_;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C) {
                const Expr& k = K(A, B, dual_index(C, n));
                if (!k.is_zero()) g[at3(N, C, A, B)] += k;
            }
    return GenConnection(frame_, std::move(g), p);
}

double GenConnection::pairing_defect() const {
    int N = rank();
    std::vector<Expr> d;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = B; C < N; ++C) d.push_back(lowered(A, B, C) + lowered(A, C, B));
    return worst(d, *chart()).max_abs;
}

// ---- parameters ----

ConnParams ConnParams::zero(ChartPtr chart) {
    return {TensorField::uniform(chart, 3, Variance::Up), TensorField::uniform(chart, 3, Variance::Down)};
}

ConnParams validate_params(const TensorField& J, const TensorField& W, ParamPolicy policy, double tol) {
    require_rank3(J, Variance::Up, "J");
    require_rank3(W, Variance::Down, "W");
    require_same_chart(J, W);
    const int last_two[] = {1, 2};
    check_antisymmetric(J, last_two, tol);
    check_antisymmetric(W, last_two, tol);
    auto altJ = antisymmetrize(J);
    auto altW = antisymmetrize(W);
    if (policy == ParamPolicy::Project) return {J - altJ, W - altW};
    double r = std::max(worst(altJ.components(), *J.chart()).max_abs, worst(altW.components(), *W.chart()).max_abs);
    if (r > tol) throw CyclicConstraintViolated(r);
    return {J, W};
}

// ---- the exact Courant algebroid ----

GenConnection lc_block_connection(const Metric& m, const TensorField& Hp) {
    int n = m.dim();
    int N = 2 * n;
    const auto& G = m.christoffel();
    std::vector<Expr> g(static_cast<std::size_t>(N * N * N));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                g[at3(N, c, a, b)] = G(c, a, b);
                g[at3(N, n + c, a, n + b)] = -G(b, a, c);
            }
    return GenConnection(CourantFrame::standard(Hp), std::move(g), Provenance::LeviCivitaBlock);
}

GenConnection minimal_connection(const TensorField& g, const TensorField& Hp, double tol) {
    check_positive_definite(g);
    return minimal_connection(Metric(g), Hp, tol);
}

GenConnection minimal_connection(const Metric& m, const TensorField& Hp, double tol) {
    int n = m.dim();
    int N = 2 * n;
    auto frame = CourantFrame::standard(Hp, tol);
    const auto& G = m.christoffel();
    const auto& gi = m.inv();
    Expr third(1.0 / 3.0);
    Expr sixth(1.0 / 6.0);
    // H'(., e, .) with the middle slot raised: Hr(a, b, d) = H'_{aed} g^{eb}.
    TensorField Hr(m.chart(), {Variance::Down, Variance::Up, Variance::Down});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) {
                std::vector<Expr> t;
                for (int e = 0; e < n; ++e) t.push_back(Hp(a, e, d) * gi(e, b));
                Hr(a, b, d) = add(std::move(t));
            }
    std::vector<Expr> g(static_cast<std::size_t>(N * N * N));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                g[at3(N, c, a, b)] = G(c, a, b);
                g[at3(N, n + c, a, b)] = -(third * Hp(a, b, c));
                g[at3(N, n + c, a, n + b)] = -G(b, a, c);
                std::vector<Expr> t1, t2, t3;
                for (int d = 0; d < n; ++d) {
                    t1.push_back(gi(c, d) * Hr(a, b, d));
                    // g^{cd} H'_{ebd} g^{ea} = -g^{cd} Hr(b, a, d)
                    t2.push_back(gi(c, d) * Hr(b, a, d));
                    // H'_{dfc} g^{da} g^{fb}
                    t3.push_back(gi(a, d) * Hr(d, b, c));
                }
                g[at3(N, c, a, n + b)] = -(third * add(std::move(t1)));
                g[at3(N, c, n + a, b)] = -(sixth * add(std::move(t2)));
                g[at3(N, n + c, n + a, n + b)] = sixth * add(std::move(t3));
            }
    return GenConnection(std::move(frame), std::move(g), Provenance::Minimal);
}

FrameTensor minimal_correction(const Metric& m, const TensorField& Hp) {
    int n = m.dim();
    int N = 2 * n;
    const auto& gi = m.inv();
    FrameTensor K(m.chart(), N, 3);
    Expr third(1.0 / 3.0);
    Expr sixth(1.0 / 6.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                std::vector<Expr> fvf, ffv, vff;
                for (int d = 0; d < n; ++d)
                    for (int e = 0; e < n; ++e) {
                        fvf.push_back(gi(a, d) * Hp(d, b, e) * gi(e, c));
                        ffv.push_back(gi(a, d) * gi(b, e) * Hp(d, e, c));
                        vff.push_back(Hp(a, d, e) * gi(d, b) * gi(e, c));
                    }
                K(n + a, b, n + c) = sixth * add(std::move(fvf));
                K(n + a, n + b, c) = sixth * add(std::move(ffv));
                K(a, b, c) = -(third * Hp(a, b, c));
                K(a, n + b, n + c) = -(third * add(std::move(vff)));
            }
    return K;
}

FrameTensor k_tensor(const Metric& m, const ConnParams& p) {
    int n = m.dim();
    int N = 2 * n;
    const auto& g = m.g();
    const auto& gi = m.inv();
    const auto& J = p.J;
    const auto& W = p.W;
    FrameTensor K(m.chart(), N, 3);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                std::vector<Expr> fvv, vfv, vvf, vff, fvf, ffv, fff, vvv;
                for (int d = 0; d < n; ++d) {
                    fvv.push_back(W(d, b, c) * gi(d, a));
                    vfv.push_back(W(a, d, c) * gi(d, b));
                    vvf.push_back(W(a, b, d) * gi(d, c));
                    vff.push_back(J(d, b, c) * g(d, a));
                    fvf.push_back(J(a, d, c) * g(d, b));
                    ffv.push_back(J(a, b, d) * g(d, c));
                    for (int e = 0; e < n; ++e)
                        for (int f = 0; f < n; ++f) {
                            fff.push_back(W(d, e, f) * gi(d, a) * gi(e, b) * gi(f, c));
                            vvv.push_back(J(d, e, f) * g(d, a) * g(e, b) * g(f, c));
                        }
                }
                K(n + a, b, c) = add(std::move(fvv));
                K(a, n + b, c) = add(std::move(vfv));
                K(a, b, n + c) = add(std::move(vvf));
                K(n + a, n + b, n + c) = add(std::move(fff));
                K(a, n + b, n + c) = -add(std::move(vff));
                K(n + a, b, n + c) = -add(std::move(fvf));
                K(n + a, n + b, c) = -add(std::move(ffv));
                K(a, b, c) = -add(std::move(vvv));
            }
    return K;
}

GenConnection with_params(const GenConnection& base, const Metric& m, const ConnParams& p) {
    return base.plus(k_tensor(m, p), Provenance::Params);
}

ConnParams dilaton_params(const Metric& m, const Expr& phi) {
    int n = m.dim();
    if (n < 2) throw ValidationError("dilaton connection needs dim >= 2");
    auto p = ConnParams::zero(m.chart());
    Expr s(1.0 / static_cast<double>(n - 1));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                p.W(a, b, c) = s * (m.g()(a, b) * differentiate(phi, c) - m.g()(a, c) * differentiate(phi, b));
    return p;
}

GenConnection dilaton_connection(const TensorField& g, const TensorField& B, const TensorField& H, const Expr& phi) {
    check_positive_definite(g);
    check_antisymmetric(B);
    Metric m(g);
    auto Hp = H + exterior_derivative(B);
    return with_params(minimal_connection(m, Hp), m, dilaton_params(m, phi));
}

GenConnection untwist(const GenConnection& conn, const TensorField& B) {
    return conn.transported(b_twist_matrix(B, 1.0), b_twist_matrix(B, -1.0));
}

GenConnection twist(const GenConnection& conn, const TensorField& B) {
    return conn.transported(b_twist_matrix(B, -1.0), b_twist_matrix(B, 1.0));
}

std::vector<Expr> metric_compat_residual(const GenConnection& conn, const ExprMatrix& G) {
    int N = conn.rank();
    std::vector<Expr> r;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = B; C < N; ++C) {
                std::vector<Expr> t{conn.frame().rho(A, G(B, C))};
                for (int E = 0; E < N; ++E) {
                    t.push_back(-(conn.gamma(E, A, B) * G(E, C)));
                    t.push_back(-(conn.gamma(E, A, C) * G(B, E)));
                }
                r.push_back(add(std::move(t)));
            }
    return r;
}

// ---- torsion and curvature ----

FrameTensor gualtieri_torsion(const GenConnection& conn) {
    int N = conn.rank();
    int n = conn.dim();
    const auto& fr = conn.frame();
    FrameTensor T(conn.chart(), N, 3);
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                T(A, B, C) = add({conn.lowered(A, B, C), -conn.lowered(B, A, C), -fr.structure(dual_index(C, n), A, B),
                                  conn.lowered(C, A, B)});
    return T;
}

FrameTensor covariant_derivative(const GenConnection& conn, const FrameTensor& t) {
    int N = conn.rank();
    int k = t.rank();
    FrameTensor r(conn.chart(), N, k + 1);
    std::size_t m = t.components().size();
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int A = 0; A < N; ++A)
        for (std::size_t f = 0; f < m; ++f) {
            std::size_t q = f;
            for (int s = k - 1; s >= 0; --s) {
                idx[static_cast<std::size_t>(s)] = static_cast<int>(q % static_cast<std::size_t>(N));
                q /= static_cast<std::size_t>(N);
            }
            std::vector<Expr> terms{conn.frame().rho(A, t.components()[f])};
            for (int s = 0; s < k; ++s) {
                auto j = idx;
                for (int E = 0; E < N; ++E) {
                    const Expr& g = conn.gamma(E, A, idx[static_cast<std::size_t>(s)]);
                    if (g.is_zero()) continue;
                    j[static_cast<std::size_t>(s)] = E;
                    std::size_t fj = 0;
                    for (int i : j) fj = fj * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
                    terms.push_back(-(g * t.components()[fj]));
                }
            }
            r.components()[static_cast<std::size_t>(A) * m + f] = add(std::move(terms));
        }
    return r;
}

GenCurvature::GenCurvature(GenConnection conn) : conn_(std::move(conn)) {}

const FrameTensor& GenCurvature::r0() const {
    if (r0_) return *r0_;
    int N = conn_.rank();
    int n = conn_.dim();
    const auto& fr = conn_.frame();
    FrameTensor R(conn_.chart(), N, 4);
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int F = 0; F < N; ++F) {
                    std::vector<Expr> t{fr.rho(A, conn_.gamma(F, B, C)), -fr.rho(B, conn_.gamma(F, A, C))};
                    for (int E = 0; E < N; ++E) {
                        t.push_back(conn_.gamma(E, B, C) * conn_.gamma(F, A, E));
                        t.push_back(-(conn_.gamma(E, A, C) * conn_.gamma(F, B, E)));
                        const Expr& c = fr.structure(E, A, B);
                        if (!c.is_zero()) t.push_back(-(c * conn_.gamma(F, E, C)));
                    }
                    R(dual_index(F, n), C, A, B) = add(std::move(t));
                }
    r0_ = std::move(R);
    return *r0_;
}

const FrameTensor& GenCurvature::riemann() const {
    if (riemann_) return *riemann_;
    const auto& R0 = r0();
    int N = conn_.rank();
    int n = conn_.dim();
    FrameTensor R(conn_.chart(), N, 4);
    for (int D = 0; D < N; ++D)
        for (int C = 0; C < N; ++C)
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B) {
                    std::vector<Expr> t{R0(D, C, A, B), R0(B, A, C, D)};
                    for (int L = 0; L < N; ++L)
                        t.push_back(conn_.lowered(L, A, B) * conn_.lowered(dual_index(L, n), C, D));
                    R(D, C, A, B) = 0.5 * add(std::move(t));
                }
    riemann_ = std::move(R);
    return *riemann_;
}

const FrameTensor& GenCurvature::ricci() const {
    if (ricci_) return *ricci_;
    const auto& R = riemann();
    int N = conn_.rank();
    int n = conn_.dim();
    FrameTensor Ric(conn_.chart(), N, 2);
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) {
            std::vector<Expr> t;
            for (int L = 0; L < N; ++L) t.push_back(R(dual_index(L, n), A, L, B));
            Ric(A, B) = add(std::move(t));
        }
    ricci_ = std::move(Ric);
    return *ricci_;
}

Expr GenCurvature::scalar_E() const {
    const auto& Ric = ricci();
    int N = conn_.rank();
    int n = conn_.dim();
    std::vector<Expr> t;
    for (int L = 0; L < N; ++L) t.push_back(Ric(dual_index(L, n), L));
    return add(std::move(t));
}

Expr GenCurvature::scalar_G(const ExprMatrix& G_inverse) const {
    const auto& Ric = ricci();
    int N = conn_.rank();
    std::vector<Expr> t;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            if (!G_inverse(A, B).is_zero()) t.push_back(G_inverse(A, B) * Ric(A, B));
    return add(std::move(t));
}

// ---- divergence and derived fields ----

Expr divergence(const GenConnection& conn, const std::vector<Expr>& u) {
    int N = conn.rank();
    std::vector<Expr> t;
    for (int A = 0; A < N; ++A) {
        t.push_back(conn.frame().rho(A, u[static_cast<std::size_t>(A)]));
        for (int B = 0; B < N; ++B)
            if (!u[static_cast<std::size_t>(B)].is_zero()) t.push_back(u[static_cast<std::size_t>(B)] * conn.gamma(A, A, B));
    }
    return add(std::move(t));
}

TensorField char_vf(const GenConnection& conn) {
    int n = conn.dim();
    std::vector<Expr> X(static_cast<std::size_t>(n));
    for (int mu = 0; mu < n; ++mu)
        X[static_cast<std::size_t>(mu)] = divergence(conn, conn.frame().D(Expr::symbol(mu)));
    return TensorField::vector(conn.chart(), std::move(X));
}

namespace {

// rho*(dx^mu) in frame components.
std::vector<Expr> rho_star(const GenConnection& conn, int mu) {
    int N = conn.rank();
    int n = conn.dim();
    std::vector<Expr> r(static_cast<std::size_t>(N));
    for (int C = 0; C < N; ++C) r[static_cast<std::size_t>(C)] = conn.frame().anchor(dual_index(C, n), mu);
    return r;
}

}  // namespace

TensorField v_tensor(const GenConnection& conn) {
    int n = conn.dim();
    std::vector<std::vector<Expr>> rs;
    for (int mu = 0; mu < n; ++mu) rs.push_back(rho_star(conn, mu));
    auto V = TensorField::uniform(conn.chart(), 3, Variance::Up);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto w = conn.covariant(rs[static_cast<std::size_t>(i)], rs[static_cast<std::size_t>(j)]);
            for (int k = 0; k < n; ++k) V(i, j, k) = conn.frame().pairing(w, rs[static_cast<std::size_t>(k)]);
        }
    return V;
}

TensorField v_trace(const GenConnection& conn, const TensorField& h) {
    int n = conn.dim();
    auto hi = inverse_metric(h);
    auto V = v_tensor(conn);
    std::vector<Expr> out(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        std::vector<Expr> t;
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) t.push_back(V(k, b, c) * hi(k, b) * hi(c, d));
        out[static_cast<std::size_t>(d)] = add(std::move(t));
    }
    return TensorField::covector(conn.chart(), std::move(out));
}

TensorField ricci_compat_residual(const GenCurvature& curv, const GeneralizedMetric& G) {
    const auto& Ric = curv.ricci();
    int n = G.dim();
    int N = 2 * n;
    auto Pp = G.psi_matrix(1);
    auto Pm = G.psi_matrix(-1);
    auto r = TensorField::uniform(G.chart(), 2, Variance::Down);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> t;
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B)
                    if (!Pp(A, i).is_zero() && !Pm(B, j).is_zero()) t.push_back(Pp(A, i) * Ric(A, B) * Pm(B, j));
            r(i, j) = add(std::move(t));
        }
    return r;
}

// ---- closed forms ----

ParamTraces param_traces(const Metric& m, const ConnParams& p) {
    int n = m.dim();
    std::vector<Expr> J1(static_cast<std::size_t>(n)), W1(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        std::vector<Expr> tj, tw;
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < n; ++b) {
                tj.push_back(p.J(k, b, c) * m.g()(k, b));
                tw.push_back(m.inv()(k, b) * p.W(k, b, c));
            }
        J1[static_cast<std::size_t>(c)] = add(std::move(tj));
        W1[static_cast<std::size_t>(c)] = add(std::move(tw));
    }
    return {TensorField::vector(m.chart(), std::move(J1)), TensorField::covector(m.chart(), std::move(W1))};
}

Expr closed_scalar_E(const Metric& m, const ConnParams& p) {
    auto tr = param_traces(m, p);
    std::vector<Expr> t{-4.0 * divergence(tr.J1, m)};
    for (int c = 0; c < m.dim(); ++c) t.push_back(8.0 * tr.J1(c) * tr.W1(c));
    return add(std::move(t));
}

Expr closed_scalar_G(const Metric& m, const TensorField& Hp, const ConnParams& p) {
    auto tr = param_traces(m, p);
    auto curv = curvature_package(m);
    auto W1up = raise_index(tr.W1, m.inv(), 0);
    return add({curv.scalar, -0.5 * form_inner(Hp, Hp, m), 4.0 * divergence(W1up, m), -4.0 * norm2_covector(tr.W1, m),
                -4.0 * norm2_vector(tr.J1, m)});
}

TensorField closed_ricci_compat(const Metric& m, const TensorField& Hp, const ConnParams& p) {
    int n = m.dim();
    const auto& g = m.g();
    const auto& gi = m.inv();
    auto tr = param_traces(m, p);
    auto curv = curvature_package(m);
    auto dH = codifferential(Hp, m);
    auto nW = covariant_derivative(tr.W1, m.christoffel());
    auto nJ = covariant_derivative(tr.J1, m.christoffel());
    auto W1up = raise_index(tr.W1, gi, 0);
    auto r = TensorField::uniform(m.chart(), 2, Variance::Down);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Expr> t{curv.ricci(i, j), -0.5 * dH(i, j), nW(i, j), nW(j, i)};
            std::vector<Expr> hh;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) hh.push_back(Hp(i, a, b) * Hp(j, c, d) * gi(a, c) * gi(b, d));
            t.push_back(-0.25 * add(std::move(hh)));
            for (int c = 0; c < n; ++c) {
                t.push_back(Hp(j, i, c) * W1up(c));
                t.push_back(nJ(i, c) * g(c, j));
                t.push_back(-(nJ(j, c) * g(c, i)));
            }
            r(i, j) = add(std::move(t));
        }
    return r;
}

}  // namespace gencourant
