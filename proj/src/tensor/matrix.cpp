#include "gencourant/matrix.hpp"

#include "gencourant/errors.hpp"

namespace gencourant {

ExprMatrix ExprMatrix::identity(int n) {
    ExprMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Expr(1.0);
    return m;
}

ExprMatrix operator*(const ExprMatrix& x, const ExprMatrix& y) {
    if (x.cols != y.rows) throw SlotError("matrix shapes do not match");
    ExprMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < y.cols; ++j) {
            std::vector<Expr> terms;
            for (int k = 0; k < x.cols; ++k) {
                Expr t = x(i, k) * y(k, j);
                if (!t.is_zero()) terms.push_back(t);
            }
            r(i, j) = add(std::move(terms));
        }
    return r;
}

ExprMatrix operator+(const ExprMatrix& x, const ExprMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw SlotError("matrix shapes do not match");
    ExprMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

ExprMatrix operator-(const ExprMatrix& x, const ExprMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw SlotError("matrix shapes do not match");
    ExprMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

ExprMatrix operator*(const Expr& s, const ExprMatrix& x) {
    ExprMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = s * x.a[i];
    return r;
}

ExprMatrix transpose(const ExprMatrix& x) {
    ExprMatrix r(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
    return r;
}

namespace {

ExprMatrix minor_of(const ExprMatrix& x, int row, int col) {
    ExprMatrix m(x.rows - 1, x.cols - 1);
    for (int i = 0, mi = 0; i < x.rows; ++i) {
        if (i == row) continue;
        for (int j = 0, mj = 0; j < x.cols; ++j) {
            if (j == col) continue;
            m(mi, mj++) = x(i, j);
        }
        ++mi;
    }
    return m;
}

}  // namespace

Expr determinant(const ExprMatrix& x) {
    if (x.rows != x.cols) throw SlotError("determinant of a non-square matrix");
    int n = x.rows;
    if (n == 0) return Expr(1.0);
    if (n == 1) return x(0, 0);
    if (n == 2) return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
        if (x(0, j).is_zero()) continue;
        Expr t = x(0, j) * determinant(minor_of(x, 0, j));
        terms.push_back(j % 2 == 0 ? t : neg(t));
    }
    return add(std::move(terms));
}

ExprMatrix inverse(const ExprMatrix& x) {
    if (x.rows != x.cols) throw SlotError("inverse of a non-square matrix");
    int n = x.rows;
    Expr det = determinant(x);
    if (det.is_zero()) throw SingularMetric("matrix is identically singular");
    ExprMatrix r(n, n);
    if (n == 1) {
        r(0, 0) = Expr(1.0) / det;
        return r;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr c = determinant(minor_of(x, j, i));
            r(i, j) = ((i + j) % 2 == 0 ? c : neg(c)) / det;
        }
    return r;
}

ExprMatrix to_matrix(const TensorField& t) {
    if (t.rank() != 2) throw SlotError("matrix view needs a rank-2 field");
    int n = t.dim();
    ExprMatrix m(n, n);
    m.a = t.components();
    return m;
}

TensorField to_tensor(const ExprMatrix& m, ChartPtr chart, Variance v0, Variance v1) {
    if (m.rows != chart->dim() || m.cols != chart->dim()) throw SlotError("matrix size does not match chart");
    return TensorField(std::move(chart), {v0, v1}, m.a);
}

std::vector<double> evaluate(const ExprMatrix& m, std::span<const double> point) {
    Evaluator ev(m.a);
    std::vector<double> out;
    ev.run(point, out);
    return out;
}

}  // namespace gencourant
