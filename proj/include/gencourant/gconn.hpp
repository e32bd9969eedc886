#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gencourant/gtb.hpp"
#include "gencourant/matrix.hpp"
#include "gencourant/riemann.hpp"
#include "gencourant/tensor.hpp"

namespace gencourant {

// Frame indices run over 0..2n-1: e_A = (d_A, 0) for A < n and
// (0, dx^{A-n}) otherwise. The pairing is the half-swap, so the dual of
// e_A is e_{sigma(A)}.
inline int dual_index(int A, int n) { return A < n ? A + n : A - n; }

// Covariant tensor with components on the generalized frame.
class FrameTensor {
public:
    FrameTensor() = default;
    FrameTensor(ChartPtr chart, int rank_e, int rank);
    const ChartPtr& chart() const { return chart_; }
    int frame_rank() const { return N_; }
    int rank() const { return rank_; }
    std::vector<Expr>& components() { return c_; }
    const std::vector<Expr>& components() const { return c_; }
    template <typename... I>
    Expr& operator()(I... i) {
        return c_[flat({static_cast<int>(i)...})];
    }
    template <typename... I>
    const Expr& operator()(I... i) const {
        return c_[flat({static_cast<int>(i)...})];
    }
    std::size_t flat(std::initializer_list<int> idx) const;

private:
    ChartPtr chart_;
    int N_ = 0;
    int rank_ = 0;
    std::vector<Expr> c_;
};

FrameTensor operator+(const FrameTensor& a, const FrameTensor& b);
FrameTensor operator-(const FrameTensor& a, const FrameTensor& b);

// Anchor and structure functions of a Courant algebroid in a frame of
// constant half-swap Gram matrix.
class CourantFrame {
public:
    CourantFrame(ChartPtr chart, ExprMatrix anchor, std::vector<Expr> structure);
    // TM + T*M with the H-twisted Dorfman bracket; H is checked closed.
    static CourantFrame standard(const TensorField& H, double tol = 1e-9);

    // Frame of the algebroid obtained by pushing forward along F, with
    // Finv its inverse: rho'(e_A) = rho(Finv e_A), [a,b]' = F[Finv a, Finv b].
    CourantFrame transported(const ExprMatrix& F, const ExprMatrix& Finv) const;

    const ChartPtr& chart() const { return chart_; }
    int dim() const { return chart_->dim(); }
    int rank() const { return 2 * dim(); }
    // rho(e_A)^mu.
    const Expr& anchor(int A, int mu) const { return anchor_(A, mu); }
    const ExprMatrix& anchor_matrix() const { return anchor_; }
    // [e_A, e_B] = c^C_{AB} e_C.
    const Expr& structure(int C, int A, int B) const;

    Expr rho(int A, const Expr& f) const;
    Expr rho(const std::vector<Expr>& u, const Expr& f) const;
    std::vector<Expr> D(const Expr& f) const;
    Expr pairing(const std::vector<Expr>& u, const std::vector<Expr>& v) const;
    std::vector<Expr> bracket(const std::vector<Expr>& u, const std::vector<Expr>& v) const;

private:
    ChartPtr chart_;
    ExprMatrix anchor_;
    std::vector<Expr> c_;
};

enum class Provenance { Minimal, LeviCivitaBlock, Params, Custom };

class GenConnection {
public:
    // gamma(C, A, B) at (C*N + A)*N + B: nabla_{e_A} e_B = Gamma^C_{AB} e_C.
    GenConnection(CourantFrame frame, std::vector<Expr> gamma, Provenance p = Provenance::Custom);

    const CourantFrame& frame() const { return frame_; }
    const ChartPtr& chart() const { return frame_.chart(); }
    int dim() const { return frame_.dim(); }
    int rank() const { return frame_.rank(); }
    Provenance provenance() const { return provenance_; }
    const std::vector<Expr>& coefficients() const { return gamma_; }

    const Expr& gamma(int C, int A, int B) const;
    // <nabla_{e_A} e_B, e_C>.
    const Expr& lowered(int A, int B, int C) const;
    std::vector<Expr> covariant(const std::vector<Expr>& u, const std::vector<Expr>& v) const;

    // F(nabla_{Finv a} Finv b) on the transported frame.
    GenConnection transported(const ExprMatrix& F, const ExprMatrix& Finv) const;
    // nabla + g_E^{-1} K(., ., .).
    GenConnection plus(const FrameTensor& K, Provenance p) const;

    // Max |<nabla_A e_B, e_C> + <e_B, nabla_A e_C>| over the sample points.
    double pairing_defect() const;

private:
    CourantFrame frame_;
    std::vector<Expr> gamma_;
    std::vector<Expr> lowered_;
    Provenance provenance_;
};

// J: (3,0), W: (0,3), both skew in the last two slots.
struct ConnParams {
    TensorField J;
    TensorField W;
    static ConnParams zero(ChartPtr chart);
};

enum class ParamPolicy { Reject, Project };

// Enforces J_a = W_a = 0. Project replaces T by T - Alt(T).
ConnParams validate_params(const TensorField& J, const TensorField& W, ParamPolicy policy = ParamPolicy::Reject,
                           double tol = 1e-10);

// Block-diagonal nabla^LC on both summands; not torsion-free when H' != 0.
GenConnection lc_block_connection(const Metric& m, const TensorField& Hp);
// The minimal Levi-Civita connection, built from its block formula.
GenConnection minimal_connection(const TensorField& g, const TensorField& Hp, double tol = 1e-9);
GenConnection minimal_connection(const Metric& m, const TensorField& Hp, double tol = 1e-9);
// The correction tensor taking nabla^LC to the minimal connection.
FrameTensor minimal_correction(const Metric& m, const TensorField& Hp);
// The eight-term K built from (J, W).
FrameTensor k_tensor(const Metric& m, const ConnParams& p);
GenConnection with_params(const GenConnection& base, const Metric& m, const ConnParams& p);

// J = 0, W(X,Y,Z) = (g(X,Y) dphi(Z) - g(X,Z) dphi(Y)) / (n-1).
ConnParams dilaton_params(const Metric& m, const Expr& phi);
// Twisted picture, H' = H + dB.
GenConnection dilaton_connection(const TensorField& g, const TensorField& B, const TensorField& H, const Expr& phi);

// Conjugation by e^B: from the (H+dB)-twisted frame to the H-twisted one.
GenConnection untwist(const GenConnection& conn, const TensorField& B);
GenConnection twist(const GenConnection& conn, const TensorField& B);

// rho_A G_BC - G(nabla_A e_B, e_C) - G(e_B, nabla_A e_C), for G in frame order.
std::vector<Expr> metric_compat_residual(const GenConnection& conn, const ExprMatrix& G);

// T_G(e_A, e_B, e_C).
FrameTensor gualtieri_torsion(const GenConnection& conn);

// (nabla_{e_A} T)(e_B, ...), with the derivative index first.
FrameTensor covariant_derivative(const GenConnection& conn, const FrameTensor& t);

// Lazily assembled curvature of one connection.
class GenCurvature {
public:
    explicit GenCurvature(GenConnection conn);
    const GenConnection& connection() const { return conn_; }
    // <R0(e_A, e_B) e_C, e_D> as R0(D, C, A, B).
    const FrameTensor& r0() const;
    // R(D, C, A, B).
    const FrameTensor& riemann() const;
    const FrameTensor& ricci() const;
    Expr scalar_E() const;
    // Trace with the inverse of a generalized metric given in frame order.
    Expr scalar_G(const ExprMatrix& G_inverse) const;

private:
    GenConnection conn_;
    mutable std::optional<FrameTensor> r0_, riemann_, ricci_;
};

Expr divergence(const GenConnection& conn, const std::vector<Expr>& u);
// X^mu = Div(D x^mu).
TensorField char_vf(const GenConnection& conn);
// V(xi, eta, zeta) = <nabla_{rho* xi} rho* eta, rho* zeta>, a (3,0) field.
TensorField v_tensor(const GenConnection& conn);
// V(dx^k, h^{-1} dx_k, h^{-1} .), for h the (2,0) field h_G.
TensorField v_trace(const GenConnection& conn, const TensorField& h);

// Ric(Psi_+(d_i), Psi_-(d_j)).
TensorField ricci_compat_residual(const GenCurvature& curv, const GeneralizedMetric& G);

// Closed forms in terms of (g, H', J, W).
struct ParamTraces {
    TensorField J1;  // J'^c = J^{kbc} g_kb
    TensorField W1;  // W'_c = g^{kb} W_kbc
};
ParamTraces param_traces(const Metric& m, const ConnParams& p);
// -4 Div_g(J') + 8 <J', W'>.
Expr closed_scalar_E(const Metric& m, const ConnParams& p);
// R(g) - 1/2 <H',H'>_g + 4 Div_g(W') - 4 |W'|^2 - 4 |J'|^2.
Expr closed_scalar_G(const Metric& m, const TensorField& Hp, const ConnParams& p);
// Right-hand side for Ric(Psi_+ X, Psi_- Y) of the (J, W) connection.
TensorField closed_ricci_compat(const Metric& m, const TensorField& Hp, const ConnParams& p);

}  // namespace gencourant
