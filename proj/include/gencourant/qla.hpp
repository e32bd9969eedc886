#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace gencourant {

using Rational = boost::multiprecision::cpp_rational;

struct RMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> a;
    RMatrix() = default;
    RMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c)) {}
    static RMatrix identity(int n);
    Rational& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
    const Rational& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
};

RMatrix operator*(const RMatrix& x, const RMatrix& y);
RMatrix transpose(const RMatrix& x);
int rank(RMatrix m);
// Throws std::domain_error when singular.
RMatrix inverse(RMatrix m);
// Columns span the kernel.
RMatrix null_space(RMatrix m);

// A finite-dimensional Lie algebra with an invariant pairing and a choice of
// positive definite subspace V+.
struct QuadraticLieAlgebra {
    int dim = 0;
    std::vector<Rational> structure;  // c^k_{ij} at (i*dim + j)*dim + k
    RMatrix pairing;
    RMatrix vplus;  // columns span V+

    const Rational& c(int k, int i, int j) const {
        return structure[static_cast<std::size_t>((i * dim + j) * dim + k)];
    }
    std::vector<Rational> bracket(const std::vector<Rational>& x, const std::vector<Rational>& y) const;
    Rational pair(const std::vector<Rational>& x, const std::vector<Rational>& y) const;
    // Throws InvalidLieAlgebra naming the failed axiom.
    void validate() const;
    // Projector onto V+ along its orthogonal complement.
    RMatrix projector_plus() const;

    // so(3) + so(3) with pairing +delta on the first factor and -delta on
    // the second; V+ is the first factor unless a tilt is given, in which
    // case V+ = span(e_i + tilt f_i).
    static QuadraticLieAlgebra so3_plus_so3(const Rational& tilt = 0);
    static QuadraticLieAlgebra abelian(RMatrix pairing, RMatrix vplus);
};

// <nabla_{e_i} e_j, e_k> at (i*d + j)*d + k.
struct QlaConnection {
    int dim = 0;
    std::vector<Rational> lowered;
    const Rational& operator()(int i, int j, int k) const {
        return lowered[static_cast<std::size_t>((i * dim + j) * dim + k)];
    }
};

QlaConnection qla_lc(const QuadraticLieAlgebra& q);
// T_G(e_i, e_j, e_k).
std::vector<Rational> qla_torsion(const QuadraticLieAlgebra& q, const QlaConnection& c);
// <nabla_x y, z> + <y, nabla_x z> on basis vectors.
std::vector<Rational> qla_pairing_defect(const QuadraticLieAlgebra& q, const QlaConnection& c);
// <nabla_{e_i} y, z> for y in V+, z in its complement.
std::vector<Rational> qla_metric_defect(const QuadraticLieAlgebra& q, const QlaConnection& c);

// Dimension of the space of differences of Levi-Civita connections on
// TM + T*M at one point, for the generalized metric of (g, 0).
int lc_difference_rank(const RMatrix& g);

}  // namespace gencourant
