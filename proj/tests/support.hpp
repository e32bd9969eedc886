#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "gencourant/expr.hpp"

namespace testsupport {

inline bool approx(double a, double b, double tol = 1e-12) {
    return std::fabs(a - b) <= tol * (1.0 + std::fabs(a) + std::fabs(b));
}

// Central difference of e along coordinate k.
inline double fd1(const gencourant::Expr& e, std::vector<double> p, int k, double h) {
    auto i = static_cast<std::size_t>(k);
    double x = p[i];
    p[i] = x + h;
    double fp = gencourant::evaluate(e, p);
    p[i] = x - h;
    double fm = gencourant::evaluate(e, p);
    return (fp - fm) / (2.0 * h);
}

// Central difference of a plain function of a point.
inline double fd1(const std::function<double(const std::vector<double>&)>& f, std::vector<double> p,
                  int k, double h) {
    auto i = static_cast<std::size_t>(k);
    double x = p[i];
    p[i] = x + h;
    double fp = f(p);
    p[i] = x - h;
    double fm = f(p);
    return (fp - fm) / (2.0 * h);
}

}  // namespace testsupport

namespace testsupport {

// Gauss-Jordan inverse of a dense row-major n x n matrix.
inline std::vector<double> invert(std::vector<double> a, int n) {
    std::vector<double> inv(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
    auto at = [n](std::vector<double>& m, int i, int j) -> double& { return m[static_cast<std::size_t>(i * n + j)]; };
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(at(a, r, c)) > std::fabs(at(a, piv, c))) piv = r;
        for (int j = 0; j < n; ++j) {
            std::swap(at(a, c, j), at(a, piv, j));
            std::swap(at(inv, c, j), at(inv, piv, j));
        }
        double d = at(a, c, c);
        for (int j = 0; j < n; ++j) {
            at(a, c, j) /= d;
            at(inv, c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = at(a, r, c);
            for (int j = 0; j < n; ++j) {
                at(a, r, j) -= f * at(a, c, j);
                at(inv, r, j) -= f * at(inv, c, j);
            }
        }
    }
    return inv;
}

}  // namespace testsupport

namespace testsupport {

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    auto at = [n](std::vector<double>& m, int i, int j) -> double& { return m[static_cast<std::size_t>(i * n + j)]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(at(a, p, q)) < 1e-300) continue;
                double th = (at(a, q, q) - at(a, p, p)) / (2.0 * at(a, p, q));
                double t = (th >= 0 ? 1.0 : -1.0) / (std::fabs(th) + std::sqrt(th * th + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(a, i, i);
    return ev;
}

}  // namespace testsupport
