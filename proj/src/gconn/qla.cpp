#include "gencourant/qla.hpp"

#include <stdexcept>

#include "gencourant/errors.hpp"

namespace gencourant {

RMatrix RMatrix::identity(int n) {
    RMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RMatrix operator*(const RMatrix& x, const RMatrix& y) {
    RMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x(i, k) == 0) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
        }
    return r;
}

RMatrix transpose(const RMatrix& x) {
    RMatrix r(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
    return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RMatrix& m) {
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(p, j));
        Rational d = m(r, c);
        for (int j = 0; j < m.cols; ++j) m(r, j) /= d;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rational f = m(i, c);
            for (int j = 0; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

}  // namespace

int rank(RMatrix m) { return static_cast<int>(rref(m).size()); }

RMatrix inverse(RMatrix m) {
    int n = m.rows;
    RMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto piv = rref(aug);
    if (static_cast<int>(piv.size()) < n || piv[static_cast<std::size_t>(n - 1)] != n - 1)
        throw std::domain_error("singular rational matrix");
    RMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
    return r;
}

RMatrix null_space(RMatrix m) {
    auto piv = rref(m);
    std::vector<bool> is_piv(static_cast<std::size_t>(m.cols), false);
    for (int c : piv) is_piv[static_cast<std::size_t>(c)] = true;
    std::vector<int> free;
    for (int c = 0; c < m.cols; ++c)
        if (!is_piv[static_cast<std::size_t>(c)]) free.push_back(c);
    RMatrix k(m.cols, static_cast<int>(free.size()));
    for (std::size_t f = 0; f < free.size(); ++f) {
        int col = static_cast<int>(f);
        k(free[f], col) = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) k(piv[r], col) = -m(static_cast<int>(r), free[f]);
    }
    return k;
}

std::vector<Rational> QuadraticLieAlgebra::bracket(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
    std::vector<Rational> r(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        if (x[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < dim; ++j) {
            if (y[static_cast<std::size_t>(j)] == 0) continue;
            Rational s = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            for (int k = 0; k < dim; ++k) r[static_cast<std::size_t>(k)] += s * c(k, i, j);
        }
    }
    return r;
}

Rational QuadraticLieAlgebra::pair(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
    Rational s = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += x[static_cast<std::size_t>(i)] * pairing(i, j) * y[static_cast<std::size_t>(j)];
    return s;
}

namespace {

std::vector<Rational> unit(int d, int i) {
    std::vector<Rational> v(static_cast<std::size_t>(d));
    v[static_cast<std::size_t>(i)] = 1;
    return v;
}

std::vector<Rational> col(const RMatrix& m, int j) {
    std::vector<Rational> v(static_cast<std::size_t>(m.rows));
    for (int i = 0; i < m.rows; ++i) v[static_cast<std::size_t>(i)] = m(i, j);
    return v;
}

// Sylvester's criterion on the Gram matrix; sign = +1 or -1.
bool definite(const RMatrix& gram, int sign) {
    int n = gram.rows;
    for (int k = 1; k <= n; ++k) {
        RMatrix m(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m(i, j) = sign * gram(i, j);
        // Leading minor via elimination.
        Rational det = 1;
        for (int c = 0; c < k; ++c) {
            int p = -1;
            for (int i = c; i < k; ++i)
                if (m(i, c) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) return false;
            if (p != c) {
                for (int j = 0; j < k; ++j) std::swap(m(c, j), m(p, j));
                det = -det;
            }
            det *= m(c, c);
            for (int i = c + 1; i < k; ++i) {
                Rational f = m(i, c) / m(c, c);
                for (int j = c; j < k; ++j) m(i, j) -= f * m(c, j);
            }
        }
        if (det <= 0) return false;
    }
    return true;
}

RMatrix gram(const QuadraticLieAlgebra& q, const RMatrix& basis) { return transpose(basis) * q.pairing * basis; }

RMatrix complement(const QuadraticLieAlgebra& q) { return null_space(transpose(q.vplus) * q.pairing); }

}  // namespace

void QuadraticLieAlgebra::validate() const {
    int d = dim;
    if (structure.size() != static_cast<std::size_t>(d * d * d)) throw InvalidLieAlgebra("structure constants: wrong size");
    if (pairing.rows != d || pairing.cols != d) throw InvalidLieAlgebra("pairing: wrong shape");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (pairing(i, j) != pairing(j, i)) throw InvalidLieAlgebra("pairing: not symmetric");
            for (int k = 0; k < d; ++k)
                if (c(k, i, j) != -c(k, j, i)) throw InvalidLieAlgebra("antisymmetry of the bracket");
        }
    if (rank(pairing) != d) throw InvalidLieAlgebra("pairing: degenerate");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                auto x = unit(d, i), y = unit(d, j), z = unit(d, k);
                auto yz = bracket(y, z);
                auto zx = bracket(z, x);
                auto xy = bracket(x, y);
                auto j1 = bracket(x, yz), j2 = bracket(y, zx), j3 = bracket(z, xy);
                for (int m = 0; m < d; ++m)
                    if (j1[static_cast<std::size_t>(m)] + j2[static_cast<std::size_t>(m)] + j3[static_cast<std::size_t>(m)] != 0)
                        throw InvalidLieAlgebra("Jacobi identity");
            }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                auto x = unit(d, i), y = unit(d, j), z = unit(d, k);
                if (pair(bracket(x, y), z) + pair(y, bracket(x, z)) != 0) throw InvalidLieAlgebra("ad-invariance of the pairing");
            }
    if (vplus.rows != d || rank(vplus) != vplus.cols) throw InvalidLieAlgebra("V+: basis is not independent");
    if (!definite(gram(*this, vplus), 1)) throw InvalidLieAlgebra("V+: not positive definite");
    auto vm = complement(*this);
    if (vm.cols > 0 && !definite(gram(*this, vm), -1)) throw InvalidLieAlgebra("V-: not negative definite");
}

RMatrix QuadraticLieAlgebra::projector_plus() const {
    auto vm = complement(*this);
    RMatrix M(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < vplus.cols; ++j) M(i, j) = vplus(i, j);
        for (int j = 0; j < vm.cols; ++j) M(i, vplus.cols + j) = vm(i, j);
    }
    RMatrix D(dim, dim);
    for (int j = 0; j < vplus.cols; ++j) D(j, j) = 1;
    return M * D * inverse(M);
}

QuadraticLieAlgebra QuadraticLieAlgebra::so3_plus_so3(const Rational& tilt) {
    QuadraticLieAlgebra q;
    q.dim = 6;
    q.structure.assign(216, Rational(0));
    auto set = [&q](int i, int j, int k, int s) { q.structure[static_cast<std::size_t>((i * 6 + j) * 6 + k)] = s; };
    const int eps[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    for (const auto& e : eps)
        for (int off : {0, 3}) {
            set(off + e[0], off + e[1], off + e[2], 1);
            set(off + e[1], off + e[0], off + e[2], -1);
        }
    q.pairing = RMatrix(6, 6);
    for (int i = 0; i < 3; ++i) {
        q.pairing(i, i) = 1;
        q.pairing(3 + i, 3 + i) = -1;
    }
    q.vplus = RMatrix(6, 3);
    for (int i = 0; i < 3; ++i) {
        q.vplus(i, i) = 1;
        q.vplus(3 + i, i) = tilt;
    }
    return q;
}

QuadraticLieAlgebra QuadraticLieAlgebra::abelian(RMatrix pairing, RMatrix vplus) {
    QuadraticLieAlgebra q;
    q.dim = pairing.rows;
    q.structure.assign(static_cast<std::size_t>(q.dim * q.dim * q.dim), Rational(0));
    q.pairing = std::move(pairing);
    q.vplus = std::move(vplus);
    return q;
}

QlaConnection qla_lc(const QuadraticLieAlgebra& q) {
    q.validate();
    int d = q.dim;
    auto Pp = q.projector_plus();
    auto Pm = RMatrix::identity(d);
    for (std::size_t i = 0; i < Pm.a.size(); ++i) Pm.a[i] -= Pp.a[i];
    std::vector<std::vector<Rational>> xp, xm;
    for (int i = 0; i < d; ++i) {
        xp.push_back(col(Pp, i));
        xm.push_back(col(Pm, i));
    }
    QlaConnection c;
    c.dim = d;
    c.lowered.resize(static_cast<std::size_t>(d * d * d));
    Rational third(1, 3);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto pp = q.bracket(xp[static_cast<std::size_t>(i)], xp[static_cast<std::size_t>(j)]);
            auto mm = q.bracket(xm[static_cast<std::size_t>(i)], xm[static_cast<std::size_t>(j)]);
            auto mp = q.bracket(xm[static_cast<std::size_t>(i)], xp[static_cast<std::size_t>(j)]);
            auto pm = q.bracket(xp[static_cast<std::size_t>(i)], xm[static_cast<std::size_t>(j)]);
            for (int k = 0; k < d; ++k) {
                const auto& zp = xp[static_cast<std::size_t>(k)];
                const auto& zm = xm[static_cast<std::size_t>(k)];
                c.lowered[static_cast<std::size_t>((i * d + j) * d + k)] =
                    third * q.pair(pp, zp) + third * q.pair(mm, zm) + q.pair(mp, zp) + q.pair(pm, zm);
            }
        }
    return c;
}

std::vector<Rational> qla_torsion(const QuadraticLieAlgebra& q, const QlaConnection& c) {
    int d = q.dim;
    std::vector<Rational> t(static_cast<std::size_t>(d * d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto b = q.bracket(unit(d, i), unit(d, j));
            for (int k = 0; k < d; ++k)
                t[static_cast<std::size_t>((i * d + j) * d + k)] = c(i, j, k) - c(j, i, k) - q.pair(b, unit(d, k)) + c(k, i, j);
        }
    return t;
}

std::vector<Rational> qla_pairing_defect(const QuadraticLieAlgebra& q, const QlaConnection& c) {
    int d = q.dim;
    std::vector<Rational> r(static_cast<std::size_t>(d * d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) r[static_cast<std::size_t>((i * d + j) * d + k)] = c(i, j, k) + c(i, k, j);
    return r;
}

std::vector<Rational> qla_metric_defect(const QuadraticLieAlgebra& q, const QlaConnection& c) {
    int d = q.dim;
    auto vm = complement(q);
    std::vector<Rational> r;
    for (int i = 0; i < d; ++i)
        for (int p = 0; p < q.vplus.cols; ++p)
            for (int s = 0; s < vm.cols; ++s) {
                Rational v = 0;
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) v += q.vplus(j, p) * vm(k, s) * c(i, j, k);
                r.push_back(v);
            }
    return r;
}

int lc_difference_rank(const RMatrix& g) {
    int n = g.rows;
    int N = 2 * n;
    auto idx = [N](int a, int b, int c) { return (a * N + b) * N + c; };
    // Psi_+-(d_i) = (d_i, +-g d_i) in frame components.
    auto psi = [&](int sign, int i) {
        std::vector<Rational> v(static_cast<std::size_t>(N));
        v[static_cast<std::size_t>(i)] = 1;
        for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(n + a)] = sign * g(a, i);
        return v;
    };
    std::vector<std::vector<Rational>> rows;
    int u = N * N * N;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = B; C < N; ++C) {
                std::vector<Rational> r(static_cast<std::size_t>(u));
                r[static_cast<std::size_t>(idx(A, B, C))] += 1;
                r[static_cast<std::size_t>(idx(A, C, B))] += 1;
                rows.push_back(std::move(r));
                std::vector<Rational> s(static_cast<std::size_t>(u));
                s[static_cast<std::size_t>(idx(A, B, C))] += 1;
                s[static_cast<std::size_t>(idx(B, C, A))] += 1;
                s[static_cast<std::size_t>(idx(C, A, B))] += 1;
                rows.push_back(std::move(s));
            }
    for (int A = 0; A < N; ++A)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                auto p = psi(1, i), m = psi(-1, j);
                std::vector<Rational> r(static_cast<std::size_t>(u));
                for (int B = 0; B < N; ++B)
                    for (int C = 0; C < N; ++C) r[static_cast<std::size_t>(idx(A, B, C))] += p[static_cast<std::size_t>(B)] * m[static_cast<std::size_t>(C)];
                rows.push_back(std::move(r));
            }
    RMatrix M(static_cast<int>(rows.size()), u);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int k = 0; k < u; ++k) M(static_cast<int>(r), k) = rows[r][static_cast<std::size_t>(k)];
    return u - rank(M);
}

}  // namespace gencourant
