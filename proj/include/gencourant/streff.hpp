#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gencourant/gconn.hpp"
#include "gencourant/gtb.hpp"
#include "gencourant/riemann.hpp"
#include "gencourant/rng.hpp"

namespace gencourant {

// Background fields (g, B, phi) and the closed 3-form H; H' = H + dB.
struct Background {
    ChartPtr chart;
    TensorField g;
    TensorField B;
    Expr phi;
    TensorField H;

    // Checks g > 0, B antisymmetric and dH = 0.
    static Background with_h(TensorField g, TensorField B, Expr phi, TensorField H, double tol = 1e-9);
    // H = dB0.
    static Background with_potential(TensorField g, TensorField B, Expr phi, const TensorField& B0);
    TensorField h_prime() const;
    int dim() const { return chart->dim(); }
};

// Polynomial background. On even n, B is a perturbed Darboux form and hence
// invertible on [-1,1]^n for small strength; H = dB0 for a random B0.
Background random_background(Rng& rng, ChartPtr chart, double strength = 0.3);
Background flat_background(ChartPtr chart);

struct BetaResiduals {
    TensorField beta_g;  // symmetric (0,2)
    TensorField beta_B;  // antisymmetric (0,2)
    Expr beta_phi;
    Expr beta_phi_prime;
};

// Index-free forms built from codifferential, Hessian and Laplacian.
BetaResiduals beta_all(const Background& bg);
// Coordinate formulas with explicit Christoffel contractions.
BetaResiduals beta_index_form(const Background& bg);
// 1/2 e^{2 phi} delta_g(e^{-2 phi} H').
TensorField beta_B_conformal(const Background& bg);

struct CentralResiduals {
    Expr scalar;         // R_G - beta(phi)
    TensorField ricci;   // Ric(Psi_+ X, Psi_- Y) - beta(g)(X,Y) + beta(B)(X,Y)
};

// The dilaton connection, moved to the H-twisted frame with G = G(g, B).
GenConnection central_connection(const Background& bg);
CentralResiduals central_residuals(const Background& bg);

// Levi-Civita connection of T*M with anchor theta, the twist-twisted Koszul
// bracket, and the fiber metric g_A = G^{-1}. Frame e_i = dx^i.
class AlgebroidConnection {
public:
    // Throws NotTwistedPoisson or NotPositiveDefinite.
    AlgebroidConnection(TensorField theta, TensorField twist, TensorField G, double tol = 1e-9);

    const ChartPtr& chart() const { return theta_.chart(); }
    int dim() const { return theta_.dim(); }
    const TensorField& theta() const { return theta_; }
    const TensorField& twist() const { return twist_; }
    const TensorField& G() const { return G_; }
    const TensorField& g_A() const { return gA_; }

    // a(e_i) f.
    Expr rho(int i, const Expr& f) const;
    // [e_i, e_j]_A = c(k, i, j) e_k.
    const Expr& structure(int k, int i, int j) const;
    // nabla_{e_i} e_j = gamma(k, i, j) e_k.
    const Expr& gamma(int k, int i, int j) const;
    // Components of nabla_xi eta for 1-forms xi, eta.
    std::vector<Expr> covariant(const std::vector<Expr>& xi, const std::vector<Expr>& eta) const;
    std::vector<Expr> bracket(const std::vector<Expr>& xi, const std::vector<Expr>& eta) const;

private:
    TensorField theta_;
    TensorField twist_;
    TensorField G_;
    TensorField gA_;
    std::vector<Expr> c_;
    std::vector<Expr> gamma_;
};

struct AlgebroidCurvature {
    std::vector<Expr> riemann;  // R(e_i, e_j) e_k = R(m, k, i, j) e_m at ((m*n + k)*n + i)*n + j
    TensorField ricci;          // Ric(e_k, e_j) as a (2,0) field
    Expr scalar;                // trace with g_A^{-1} = G
};

AlgebroidCurvature algebroid_curvature(const AlgebroidConnection& c);
// (nabla_{e_i} d_theta phi)(e_j) as a (2,0) field.
TensorField algebroid_hessian(const AlgebroidConnection& c, const Expr& phi);
// (nabla_{psi^k} d_theta phi)(G psi_k).
Expr algebroid_laplacian(const AlgebroidConnection& c, const Expr& phi);
// (nabla_{e_m} T)(e_i, ...) for a (p,0) field T, derivative index first.
TensorField algebroid_covariant_derivative(const AlgebroidConnection& c, const TensorField& t);

struct SymplecticPackage {
    TensorField theta;     // B^{-1}
    TensorField G;         // -B g^{-1} B
    TensorField Hp_theta;  // H'(theta ., theta ., theta .)
    std::optional<TensorField> Theta;  // -1/2 [theta, theta]_S, set when H vanishes
    AlgebroidConnection connection;
    AlgebroidCurvature curvature;
};

// Throws SingularB.
SymplecticPackage symplectic_package(const Background& bg);

struct SymplecticResiduals {
    Expr scalar;        // scalar equation
    TensorField sym;    // symmetric (2,0) equation
    TensorField skew;   // antisymmetric (2,0) equation
};

SymplecticResiduals symplectic_residuals(const Background& bg);
SymplecticResiduals symplectic_residuals(const Background& bg, const SymplecticPackage& pkg);

// nabla^theta with F(nabla^theta_a b) = nabla_{F a} F b, on the frame with
// rho_theta = rho o F.
GenConnection theta_transport(const GenConnection& conn, const TensorField& theta, const TensorField& B);
// Inverse of G_theta = F^T G F, BlockDiag(G^{-1}, G) in frame order.
ExprMatrix g_theta_inverse(const SymplecticPackage& pkg);
// Columns are (+-G^{-1} dx^i, dx^i), spanning V_+- of G_theta.
ExprMatrix theta_psi_matrix(const SymplecticPackage& pkg, int sign);

struct EquivalenceReport {
    double beta_max = 0.0;
    double symplectic_max = 0.0;
    double transport_max = 0.0;
    // Sample points where each maximum is attained.
    std::vector<double> beta_point, symplectic_point, transport_point;
    bool beta_vanish = false;
    bool symplectic_vanish = false;
    std::string verdict;
};

// Threshold for a residual family to count as vanishing.
inline constexpr double kVanishThreshold = 1e-7;

EquivalenceReport equivalence_report(const Background& bg, double threshold = kVanishThreshold);

}  // namespace gencourant
