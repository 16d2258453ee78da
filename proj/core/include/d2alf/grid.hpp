#pragma once

// Chebyshev-Gauss-Lobatto discretization of [0, L]: nodes in ascending
// order, spectral differentiation matrix (barycentric form), and
// Clenshaw-Curtis quadrature weights.  MatFn stores 2x2-matrix samples on a
// grid together with endpoint constraint tags.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "d2alf/mat2.hpp"

namespace d2alf {

struct Grid {
    double L = 1.0;
    int N = 0;
    Eigen::VectorXd nodes;    // ascending, nodes(0) = 0, nodes(N-1) = L
    Eigen::MatrixXd diff;     // N x N differentiation matrix
    Eigen::MatrixXd integ;    // N x N antiderivative matrix, (integ f)(0) = 0
    Eigen::VectorXd weights;  // Clenshaw-Curtis weights, sum = L
    Eigen::VectorXd bary;     // barycentric interpolation weights

    // Value of the interpolant of `samples` at an arbitrary point t.
    double interpolate(const Eigen::VectorXd& samples, double t) const;
    cplx interpolate(const Eigen::VectorXcd& samples, double t) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double L, int N);

// Endpoint constraint tags for values and first derivatives.
enum class BcKind {
    Free,
    Diagonal,
    OffDiagonal,
    OffDiagonalPlusFixedDiagonal,  // off-diagonal part free, diagonal pinned to sz_coeff * sz
};

struct BcTag {
    BcKind value = BcKind::Free;
    BcKind deriv = BcKind::Free;
    cplx value_sz = 0.0;  // sigma_z coefficient of the pinned diagonal part (value constraint)
    cplx deriv_sz = 0.0;  // same for the derivative constraint
};

class MatFn {
public:
    MatFn() = default;
    explicit MatFn(GridPtr grid, const Mat2& constant = Mat2::Zero());

    GridPtr grid;
    std::vector<Mat2> values;  // one sample per node
    BcTag bc0, bcL;

    int size() const { return static_cast<int>(values.size()); }
    const Mat2& operator[](int i) const { return values[i]; }
    Mat2& operator[](int i) { return values[i]; }

    MatFn deriv() const;  // spectral derivative, tags reset to Free

    MatFn operator+(const MatFn& other) const;
    MatFn operator-(const MatFn& other) const;
    MatFn operator*(const MatFn& other) const;  // pointwise matrix product
    MatFn operator*(cplx scalar) const;
    MatFn adjoint() const;

    double max_norm() const;
    Mat2 interpolate(double t) const;

    // Max violation of the endpoint tags over both endpoints.
    double bc_violation() const;
};

MatFn commutator(const MatFn& a, const MatFn& b);

void check_same_grid(const MatFn& a, const MatFn& b);

// Drop Chebyshev coefficients below rel_cut times the largest one, per
// entry channel.  Analytic fields pass through unchanged; node-level noise
// (which otherwise gets amplified by differentiation) is removed.
MatFn spectral_filter(const MatFn& f, double rel_cut = 1e-14);

// Real L2 pairing of su(2) quadruples: -(1/2L) Int Tr(sum_mu a^mu b^mu).
using Quad = std::array<MatFn, 4>;
double l2_inner(const Quad& a, const Quad& b);

// Complex L2 inner product of single fields: Int Tr(a b^dagger).
cplx l2_inner_field(const MatFn& a, const MatFn& b);

// Least-squares correction of the two endpoint samples (and, for derivative
// tags, of the endpoint rows of the spectral derivative) so the tags hold.
// Interior samples are unchanged.
MatFn project_bc(const MatFn& f);

}  // namespace d2alf
