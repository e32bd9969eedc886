#pragma once

#include <vector>

#include "gencourant/expr.hpp"
#include "gencourant/tensor.hpp"

namespace gencourant {

struct ExprMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Expr> a;

    ExprMatrix() = default;
    ExprMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c)) {}
    static ExprMatrix identity(int n);

    Expr& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
    const Expr& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
};

ExprMatrix operator*(const ExprMatrix& x, const ExprMatrix& y);
ExprMatrix operator+(const ExprMatrix& x, const ExprMatrix& y);
ExprMatrix operator-(const ExprMatrix& x, const ExprMatrix& y);
ExprMatrix operator*(const Expr& s, const ExprMatrix& x);
ExprMatrix transpose(const ExprMatrix& x);
// Cofactor expansion; intended for n <= 4.
Expr determinant(const ExprMatrix& x);
ExprMatrix inverse(const ExprMatrix& x);

// Rank-2 field <-> matrix (slot 0 = row).
ExprMatrix to_matrix(const TensorField& t);
TensorField to_tensor(const ExprMatrix& m, ChartPtr chart, Variance v0, Variance v1);

std::vector<double> evaluate(const ExprMatrix& m, std::span<const double> point);

}  // namespace gencourant
