#pragma once

#include "gencourant/expr.hpp"
#include "gencourant/rng.hpp"
#include "gencourant/tensor.hpp"

namespace gencourant {

// Random expression over the differentiable, everywhere-defined node set
// (constants, symbols, neg, sum, product, positive powers, sin, cos, exp).
Expr random_safe_expr(Rng& rng, int dim, int depth);

// Polynomial of total degree <= degree with coefficients in [-scale, scale].
Expr random_polynomial(Rng& rng, int dim, int degree, double scale);

// Identity plus symmetric polynomial entries of degree <= 2. For strength
// <= 1 the result is diagonally dominant, hence positive definite, on [-1,1]^n.
TensorField random_metric(Rng& rng, ChartPtr chart, double strength = 1.0);

// Antisymmetric (0,p) field with polynomial components of degree <= degree.
TensorField random_form(Rng& rng, ChartPtr chart, int p, int degree = 2, double scale = 0.5);

// Field with arbitrary slots and polynomial components.
TensorField random_field(Rng& rng, ChartPtr chart, std::vector<Variance> slots, int degree = 2,
                         double scale = 0.5);

}  // namespace gencourant
