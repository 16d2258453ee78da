#pragma once

// Linearized operators at real pre-Nahm data: d0, d1 and their formal
// adjoints, the scalar-field Laplacian Delta0 with tau-method boundary rows,
// Kahler forms on tangent quadruples, and real packings of matrix fields.
//
// Packing conventions (3 reals per node, index 3*node + component):
//   su(2) fields       X = -i(x sx + y sy + z sz)
//   Hermitian traceless X =    x sx + y sy + z sz
// Commutation with su(2) data acts as the same cross-product blocks in both
// packings, so one assembled operator serves both.

#include <Eigen/Dense>

#include "d2alf/nahm_data.hpp"

namespace d2alf {

Eigen::VectorXd pack_su2(const MatFn& f);
MatFn unpack_su2(GridPtr grid, const Eigen::VectorXd& v);
Eigen::VectorXd pack_herm(const MatFn& f);
MatFn unpack_herm(GridPtr grid, const Eigen::VectorXd& v);

Eigen::VectorXd pack_quad(const Quad& q);                 // 12N, A0..A3 blocks
Quad unpack_quad(GridPtr grid, const Eigen::VectorXd& v);

// Matrix-level operators (h in the gauge algebra, a in the tangent space).
Quad d0(const RealNahm& A, const MatFn& h);
MatFn d0_star(const RealNahm& A, const Quad& a);
std::array<MatFn, 3> d1(const RealNahm& A, const Quad& a);
Quad d1_star(const RealNahm& A, const std::array<MatFn, 3>& f);

// Kahler forms and holomorphic symplectic form on tangent quadruples.
double omega_form(int i, const Quad& a, const Quad& b);  // i in {1,2,3}
cplx omega_complex(const Quad& a, const Quad& b);

// Dense assembled operators (real, acting on packed fields).
struct LinearizedOps {
    GridPtr grid;
    Eigen::MatrixXd d0;       // 12N x 3N
    Eigen::MatrixXd d0s;      // 3N x 12N
    Eigen::MatrixXd d1;       // 9N x 12N
    Eigen::MatrixXd d1s;      // 12N x 9N
};
LinearizedOps assemble_ops(const RealNahm& A);

// Boundary rows of a gauge-algebra field (value diagonal, derivative
// off-diagonal): x,y value rows at both endpoints, z derivative rows.
// rhs_dz0 / rhs_dzL prescribe the sigma_z coefficient of the endpoint
// derivative (zero for the plain algebra).
struct Delta0Solve {
    Eigen::MatrixXd K;      // tau-conditioned Delta0
    Eigen::MatrixXd K_raw;  // plain collocation Delta0 (no boundary rows)
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    GridPtr grid;

    // rhs given as a packed interior field; boundary rows overridden.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double rhs_dz0 = 0.0,
                          double rhs_dzL = 0.0) const;
    double solve_residual(const Eigen::VectorXd& rhs, const Eigen::VectorXd& sol,
                          double rhs_dz0 = 0.0, double rhs_dzL = 0.0) const;
};
Delta0Solve make_delta0_solve(const RealNahm& A);

// Coulomb projection: remove the d0-exact part of a tangent quadruple,
// leaving a representative with d0* a = 0.  Throws Reducible when the
// constrained Laplacian is singular.
Quad coulomb_project(const RealNahm& A, const Delta0Solve& solver, const Quad& a);

}  // namespace d2alf
