#pragma once

// 2x2 complex matrix algebra: Pauli basis, closed-form Hermitian
// eigendecomposition, exp/log/sqrt of Hermitian matrices, and the
// positive-definite quasigroup product g1 x g2 = (g1 g2^2 g1)^{1/2}.

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "d2alf/errors.hpp"

namespace d2alf {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using cplx = std::complex<double>;

inline constexpr double kPredicateTol = 1e-10;  // default tolerance for structural predicates

const Mat2& pauli_x();
const Mat2& pauli_y();
const Mat2& pauli_z();
const Mat2& mat2_id();

// Frobenius norm helpers.
double mat2_norm(const Mat2& m);

// Structural predicates, each to an absolute tolerance.
bool is_traceless(const Mat2& m, double tol = kPredicateTol);
bool is_hermitian(const Mat2& m, double tol = kPredicateTol);
bool is_skew_hermitian(const Mat2& m, double tol = kPredicateTol);
bool is_su2(const Mat2& m, double tol = kPredicateTol);        // traceless + skew-Hermitian
bool is_sl2c(const Mat2& m, double tol = kPredicateTol);       // traceless
bool is_diagonal(const Mat2& m, double tol = kPredicateTol);
bool is_offdiagonal(const Mat2& m, double tol = kPredicateTol);

// M = -i(x sx + y sy + z sz) for traceless skew-Hermitian M.
// Throws NotSkewHermitian when the structure fails beyond `tol`.
Eigen::Vector3d pauli_expand(const Mat2& m, double tol = kPredicateTol);
Mat2 pauli_assemble(const Eigen::Vector3d& v);  // -i(v . sigma)

// Components in the plain sigma basis: M = c_x sx + c_y sy + c_z sz
// (complex for sl(2,C), real for Hermitian traceless input).
Eigen::Vector3cd sigma_components(const Mat2& m);
Mat2 sigma_assemble(const Eigen::Vector3cd& c);

// Hermitian part extraction for traceless Hermitian fields.
Eigen::Vector3d hermitian_components(const Mat2& m, double tol = kPredicateTol);

// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
// Columns of `vectors` are orthonormal; eigenvalues ascending.
struct HermEig {
    Eigen::Vector2d values;
    Mat2 vectors;
};
HermEig herm_eig(const Mat2& h);

Mat2 herm_exp(const Mat2& h);                 // h Hermitian
Mat2 herm_log(const Mat2& g);                 // g Hermitian positive-definite
Mat2 herm_sqrt(const Mat2& g);                // g Hermitian positive semi-definite
Mat2 quasigroup_product(const Mat2& g1, const Mat2& g2);

// exp of a traceless 2x2 matrix in closed form (X^2 = det(-X) Id).
Mat2 exp_traceless(const Mat2& x);

}  // namespace d2alf
