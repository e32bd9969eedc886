#pragma once

#include <vector>

#include "gencourant/matrix.hpp"
#include "gencourant/riemann.hpp"
#include "gencourant/rng.hpp"
#include "gencourant/tensor.hpp"

namespace gencourant {

// Conventions: a 2-form acts on a vector through its second argument,
// B(X) = B(., X), so (B X)_a = B_ab X^b. A bivector acts the same way,
// (theta xi)^a = theta^ab xi_b.

// (X, xi) in TM + T*M.
struct GenSection {
    TensorField vec;
    TensorField form;

    GenSection() = default;
    GenSection(TensorField v, TensorField f);
    static GenSection zero(ChartPtr chart);

    const ChartPtr& chart() const { return vec.chart(); }
    int dim() const { return vec.dim(); }
};

GenSection operator+(const GenSection& a, const GenSection& b);
GenSection operator-(const GenSection& a, const GenSection& b);
GenSection operator*(const Expr& f, const GenSection& a);

// Polynomial components of degree <= degree.
GenSection random_section(Rng& rng, ChartPtr chart, int degree = 2, double scale = 0.5);

// Frame components in e_A = (d_mu, 0) for A < n, (0, dx^mu) for A >= n.
std::vector<Expr> to_frame(const GenSection& s);
GenSection from_frame(const std::vector<Expr>& c, ChartPtr chart);
GenSection frame_element(ChartPtr chart, int A);

// The canonical pairing eta(X) + xi(Y).
Expr pairing(const GenSection& a, const GenSection& b);
// Gram matrix of the coordinate frame: off-diagonal identity blocks.
ExprMatrix gram_matrix(int n);
// rho(psi) f = X(f).
Expr anchor_derivative(const GenSection& s, const Expr& f);
// (0, df).
GenSection d_map(const Expr& f, ChartPtr chart);

TensorField lie_bracket(const TensorField& X, const TensorField& Y);
TensorField lie_derivative_form(const TensorField& X, const TensorField& eta);
// i_Y d xi.
TensorField interior_d(const TensorField& Y, const TensorField& xi);
// H(X, Y, .) as a 1-form.
TensorField contract_two(const TensorField& H, const TensorField& X, const TensorField& Y);

// Throws NotClosed when a component of dH exceeds tol at a sample point.
void check_closed(const TensorField& H, double tol = 1e-9);

// The H-twisted Dorfman bracket. Closedness of H is verified on construction.
class DorfmanContext {
public:
    explicit DorfmanContext(TensorField H, double tol = 1e-9);

    const TensorField& H() const { return H_; }
    GenSection bracket(const GenSection& a, const GenSection& b) const;

private:
    TensorField H_;
};

GenSection dorfman(const GenSection& a, const GenSection& b, const TensorField& H);

// Residual J(a,b,c) = [a,[b,c]] - [[a,b],c] - [b,[a,c]] (Leibniz identity).
GenSection jacobiator(const DorfmanContext& ctx, const GenSection& a, const GenSection& b, const GenSection& c);

// e^{sB}(X, xi) = (X, xi + s B(X)).
GenSection b_twist(const GenSection& s, const TensorField& B, double sign = 1.0);
ExprMatrix b_twist_matrix(const TensorField& B, double sign = 1.0);

struct TwistCheck {
    double pairing = 0.0;  // max |<e^B a, e^B b> - <a, b>|
    double bracket = 0.0;  // max |e^B[a,b]^{H+dB} - [e^B a, e^B b]^H|
};
TwistCheck twisted_bracket_check(const TensorField& B, const TensorField& H, const GenSection& a,
                                 const GenSection& b);

// theta = B^{-1} as a (2,0) field; throws SingularB for odd dimension or a
// nearly singular B at a sample point.
TensorField theta_from_B(const TensorField& B);
// F(X, xi) = (theta xi, xi - B X) and its inverse (X - theta xi, B X).
GenSection theta_twist(const GenSection& s, const TensorField& theta, const TensorField& B);
GenSection theta_twist_inverse(const GenSection& s, const TensorField& theta, const TensorField& B);
ExprMatrix theta_twist_matrix(const TensorField& theta, const TensorField& B);
ExprMatrix theta_twist_inverse_matrix(const TensorField& theta, const TensorField& B);

GenSection apply(const ExprMatrix& M, const GenSection& s);

// theta(xi) as a vector field.
TensorField sharp(const TensorField& theta, const TensorField& xi);

// [xi, eta]^H_theta = L_{theta xi} eta - i_{theta eta} d xi + H(theta xi, theta eta, .).
TensorField koszul(const TensorField& xi, const TensorField& eta, const TensorField& theta, const TensorField& H);
// Anchored differential: (d_theta f)(zeta) = <df, theta zeta>; a vector field.
TensorField d_theta(const Expr& f, const TensorField& theta);
// {f, g} = theta(df)(g), so that [df, dg]_theta = d{f, g}.
Expr poisson_bracket(const Expr& f, const Expr& g, const TensorField& theta);

// Section (phi, vartheta) of T*M + TM for the Lie algebroid A = T*M.
struct APair {
    TensorField form;  // phi in Gamma(A)
    TensorField vec;   // vartheta in Gamma(A*)
};

// ([phi,phi']_A, L^A_phi vartheta' - i_{phi'} d^A vartheta - H_A(phi, phi', .)),
// with the Koszul bracket twisted by `twist` as the algebroid bracket.
APair a_dorfman(const APair& a, const APair& b, const TensorField& theta, const TensorField& twist,
                const TensorField& H_A);

// H_theta(xi, eta, zeta) = H(theta xi, theta eta, theta zeta) as a (3,0) field.
TensorField h_theta(const TensorField& H, const TensorField& theta);

// 1/2[theta,theta]_S(xi,eta,zeta) + twist(theta xi, theta eta, theta zeta) on
// coordinate 1-forms, as a (3,0) field.
TensorField schouten_check(const TensorField& theta, const TensorField& twist);

// T*M with the twisted Koszul bracket.
class LieAlgebroidCotangent {
public:
    LieAlgebroidCotangent(TensorField theta, TensorField twist);

    const TensorField& theta() const { return theta_; }
    const TensorField& twist() const { return twist_; }
    // Throws NotTwistedPoisson when the Schouten residual exceeds tol.
    void validate(double tol = 1e-9);
    bool validated() const { return validated_; }
    TensorField bracket(const TensorField& xi, const TensorField& eta) const;

private:
    TensorField theta_;
    TensorField twist_;
    bool validated_ = false;
};

// The pair (g, B) and the objects it determines on TM + T*M.
class GeneralizedMetric {
public:
    // Throws NotPositiveDefinite or NotAntisymmetric.
    GeneralizedMetric(TensorField g, TensorField B);

    const Metric& metric() const { return metric_; }
    const TensorField& g() const { return metric_.g(); }
    const TensorField& B() const { return B_; }
    int dim() const { return metric_.dim(); }
    const ChartPtr& chart() const { return metric_.chart(); }

    // Block operator [[g - B g^-1 B, B g^-1], [-g^-1 B, g^-1]] in frame order.
    const ExprMatrix& block() const { return block_; }
    // Inverse, equal to eta G eta.
    ExprMatrix block_inverse() const;
    // tau = eta^-1 G.
    ExprMatrix tau() const;
    ExprMatrix projector(int sign) const;
    // Columns are Psi_+-(d_a) = (d_a, (+-g + B) d_a).
    ExprMatrix psi_matrix(int sign) const;
    GenSection psi(int sign, const TensorField& X) const;
    // h_G(xi, eta) = G(rho* xi, rho* eta), a (2,0) field.
    TensorField h() const;
    Expr apply(const GenSection& a, const GenSection& b) const;

private:
    Metric metric_;
    TensorField B_;
    ExprMatrix block_;
};

// Throws NotPositiveDefinite when a sampled Cholesky factorization fails.
void check_positive_definite(const TensorField& g);

}  // namespace gencourant
