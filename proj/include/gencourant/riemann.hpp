#pragma once

#include <vector>

#include "gencourant/matrix.hpp"
#include "gencourant/tensor.hpp"

namespace gencourant {

// Gamma^k_{ij}, stored at (k*n + i)*n + j.
struct Christoffel {
    ChartPtr chart;
    std::vector<Expr> c;

    int dim() const { return chart->dim(); }
    const Expr& operator()(int k, int i, int j) const {
        auto n = static_cast<std::size_t>(dim());
        return c[(static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i)) * n + static_cast<std::size_t>(j)];
    }
};

// Symmetric nondegenerate (0,2) field with its inverse and Levi-Civita symbols.
class Metric {
public:
    explicit Metric(TensorField g);

    const ChartPtr& chart() const { return g_.chart(); }
    int dim() const { return g_.dim(); }
    const TensorField& g() const { return g_; }
    const TensorField& inv() const { return inv_; }
    const Christoffel& christoffel() const { return gamma_; }

private:
    TensorField g_;
    TensorField inv_;
    Christoffel gamma_;
};

Christoffel christoffel(const TensorField& g, const TensorField& g_inverse);
Christoffel christoffel(const TensorField& g);

// Leading down slot; +Gamma on up slots, -Gamma on down slots.
TensorField covariant_derivative(const TensorField& t, const Christoffel& gamma);

struct Curvature {
    TensorField riemann;  // R^k_{lij}: R(d_i, d_j) d_l = R^k_{lij} d_k
    TensorField ricci;    // Ric_{lj} = R^k_{lkj}
    Expr scalar;
};

Curvature curvature_package(const Metric& m);

// (1/p!) a_{i...} b^{i...}
Expr form_inner(const TensorField& a, const TensorField& b, const Metric& m);

// (delta a)(X,...) = -(nabla_{e_k} a)(g^{-1} e^k, X, ...). The frame
// variant takes the frame vectors as matrix columns.
TensorField codifferential(const TensorField& form, const Metric& m);
TensorField codifferential(const TensorField& form, const Metric& m, const ExprMatrix& frame);

struct LaplaceData {
    Expr laplacian;
    TensorField gradient;
    Expr gradient_norm2;
};

LaplaceData laplace_divergence(const Expr& phi, const Metric& m);
Expr divergence(const TensorField& v, const Metric& m);

// nabla d(phi), symmetric (0,2).
TensorField hessian(const Expr& phi, const Metric& m);

Expr norm2_vector(const TensorField& v, const Metric& m);
Expr norm2_covector(const TensorField& xi, const Metric& m);

}  // namespace gencourant
