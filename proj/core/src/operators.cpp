#include "d2alf/operators.hpp"

#include <cmath>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {

Eigen::Matrix3d cross_mat(const Eigen::Vector3d& a) {
    Eigen::Matrix3d m;
    m << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
    return m;
}

// Per-node components of su(2) data, 2*[a]_x blocks (the commutator acts as
// eta -> 2 a x eta in both packings).
std::vector<Eigen::Matrix3d> comm_blocks(const MatFn& f) {
    std::vector<Eigen::Matrix3d> out(f.size());
    for (int k = 0; k < f.size(); ++k)
        out[k] = 2.0 * cross_mat(pauli_expand(f.values[k], 1e-6));
    return out;
}

// y += (D kron I3) x  restricted to one 3N block.
void add_deriv(const Grid& g, const Eigen::VectorXd& x, Eigen::VectorXd& y, double sign = 1.0) {
    const int N = g.N;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double d = sign * g.diff(i, j);
            if (d == 0.0) continue;
            y.segment<3>(3 * i) += d * x.segment<3>(3 * j);
        }
}

void put_deriv(const Grid& g, Eigen::MatrixXd& M, int row0, int col0, double sign = 1.0) {
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j) {
            const double d = sign * g.diff(i, j);
            M.block<3, 3>(row0 + 3 * i, col0 + 3 * j) += d * Eigen::Matrix3d::Identity();
        }
}

void put_blocks(const std::vector<Eigen::Matrix3d>& blocks, Eigen::MatrixXd& M, int row0, int col0,
                double sign = 1.0) {
    for (size_t k = 0; k < blocks.size(); ++k)
        M.block<3, 3>(row0 + 3 * k, col0 + 3 * k) += sign * blocks[k];
}

}  // namespace

Eigen::VectorXd pack_su2(const MatFn& f) {
    Eigen::VectorXd v(3 * f.size());
    for (int k = 0; k < f.size(); ++k) v.segment<3>(3 * k) = pauli_expand(f.values[k], 1e-6);
    return v;
}

MatFn unpack_su2(GridPtr grid, const Eigen::VectorXd& v) {
    MatFn f(grid);
    for (int k = 0; k < grid->N; ++k) f.values[k] = pauli_assemble(v.segment<3>(3 * k));
    return f;
}

Eigen::VectorXd pack_herm(const MatFn& f) {
    Eigen::VectorXd v(3 * f.size());
    for (int k = 0; k < f.size(); ++k) v.segment<3>(3 * k) = hermitian_components(f.values[k], 1e-6);
    return v;
}

MatFn unpack_herm(GridPtr grid, const Eigen::VectorXd& v) {
    MatFn f(grid);
    for (int k = 0; k < grid->N; ++k) {
        Eigen::Vector3cd c = v.segment<3>(3 * k).cast<cplx>();
        f.values[k] = sigma_assemble(c);
    }
    return f;
}

Eigen::VectorXd pack_quad(const Quad& q) {
    const int n3 = 3 * q[0].size();
    Eigen::VectorXd v(4 * n3);
    for (int mu = 0; mu < 4; ++mu) v.segment(mu * n3, n3) = pack_su2(q[mu]);
    return v;
}

Quad unpack_quad(GridPtr grid, const Eigen::VectorXd& v) {
    Quad q;
    const int n3 = 3 * grid->N;
    for (int mu = 0; mu < 4; ++mu) q[mu] = unpack_su2(grid, v.segment(mu * n3, n3));
    return q;
}

Quad d0(const RealNahm& A, const MatFn& h) {
    Quad out;
    out[0] = h.deriv() + commutator(A.A[0], h);
    for (int i = 1; i < 4; ++i) out[i] = commutator(A.A[i], h);
    return out;
}

MatFn d0_star(const RealNahm& A, const Quad& a) {
    MatFn out = (a[0].deriv() + commutator(A.A[0], a[0])) * cplx(-1.0);
    for (int i = 1; i < 4; ++i) out = out - commutator(A.A[i], a[i]);
    return out;
}

std::array<MatFn, 3> d1(const RealNahm& A, const Quad& a) {
    std::array<MatFn, 3> out;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        out[i] = a[i + 1].deriv() + commutator(A.A[0], a[i + 1]) - commutator(A.A[i + 1], a[0]) +
                 commutator(A.A[j + 1], a[k + 1]) - commutator(A.A[k + 1], a[j + 1]);
    }
    return out;
}

Quad d1_star(const RealNahm& A, const std::array<MatFn, 3>& f) {
    Quad out;
    out[0] = commutator(A.A[1], f[0]) + commutator(A.A[2], f[1]) + commutator(A.A[3], f[2]);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        out[i + 1] = (f[i].deriv() + commutator(A.A[0], f[i])) * cplx(-1.0) +
                     commutator(A.A[j + 1], f[k]) - commutator(A.A[k + 1], f[j]);
    }
    return out;
}

double omega_form(int i, const Quad& a, const Quad& b) {
    if (i < 1 || i > 3) throw InvalidParams("omega_form index must be 1, 2 or 3");
    const Grid& g = *a[0].grid;
    const int j = i % 3 + 1, k = (i + 1) % 3 + 1;  // cyclic successor pair of i
    double acc = 0.0;
    for (int n = 0; n < g.N; ++n) {
        cplx tr = (a[0].values[n] * b[i].values[n]).trace() -
                  (a[i].values[n] * b[0].values[n]).trace() +
                  (a[j].values[n] * b[k].values[n]).trace() -
                  (a[k].values[n] * b[j].values[n]).trace();
        acc += g.weights(n) * tr.real();
    }
    return -acc / (2.0 * g.L);
}

cplx omega_complex(const Quad& a, const Quad& b) {
    const Grid& g = *a[0].grid;
    const cplx I(0, 1);
    cplx acc = 0.0;
    for (int n = 0; n < g.N; ++n) {
        const Mat2 a01 = a[0].values[n] + I * a[1].values[n];
        const Mat2 a23 = a[2].values[n] + I * a[3].values[n];
        const Mat2 b01 = b[0].values[n] + I * b[1].values[n];
        const Mat2 b23 = b[2].values[n] + I * b[3].values[n];
        acc += g.weights(n) * (a01 * b23 - a23 * b01).trace();
    }
    return -acc / (2.0 * g.L);
}

LinearizedOps assemble_ops(const RealNahm& A) {
    const Grid& g = *A.grid;
    const int N = g.N, n3 = 3 * N;
    LinearizedOps ops;
    ops.grid = A.grid;
    std::array<std::vector<Eigen::Matrix3d>, 4> X;
    for (int mu = 0; mu < 4; ++mu) X[mu] = comm_blocks(A.A[mu]);

    ops.d0 = Eigen::MatrixXd::Zero(4 * n3, n3);
    put_deriv(g, ops.d0, 0, 0);
    put_blocks(X[0], ops.d0, 0, 0);
    for (int i = 1; i < 4; ++i) put_blocks(X[i], ops.d0, i * n3, 0);

    ops.d0s = Eigen::MatrixXd::Zero(n3, 4 * n3);
    put_deriv(g, ops.d0s, 0, 0, -1.0);
    put_blocks(X[0], ops.d0s, 0, 0, -1.0);
    for (int i = 1; i < 4; ++i) put_blocks(X[i], ops.d0s, 0, i * n3, -1.0);

    ops.d1 = Eigen::MatrixXd::Zero(3 * n3, 4 * n3);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        put_deriv(g, ops.d1, i * n3, (i + 1) * n3);
        put_blocks(X[0], ops.d1, i * n3, (i + 1) * n3);
        put_blocks(X[i + 1], ops.d1, i * n3, 0, -1.0);
        put_blocks(X[j + 1], ops.d1, i * n3, (k + 1) * n3);
        put_blocks(X[k + 1], ops.d1, i * n3, (j + 1) * n3, -1.0);
    }

    ops.d1s = Eigen::MatrixXd::Zero(4 * n3, 3 * n3);
    for (int i = 0; i < 3; ++i) put_blocks(X[i + 1], ops.d1s, 0, i * n3);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        put_deriv(g, ops.d1s, (i + 1) * n3, i * n3, -1.0);
        put_blocks(X[0], ops.d1s, (i + 1) * n3, i * n3, -1.0);
        put_blocks(X[j + 1], ops.d1s, (i + 1) * n3, k * n3);
        put_blocks(X[k + 1], ops.d1s, (i + 1) * n3, j * n3, -1.0);
    }
    return ops;
}

Eigen::VectorXd Delta0Solve::solve(const Eigen::VectorXd& rhs, double rhs_dz0,
                                   double rhs_dzL) const {
    Eigen::VectorXd b = rhs;
    const int n = grid->N - 1;
    b(0) = 0.0;             // h_x(0)
    b(1) = 0.0;             // h_y(0)
    b(2) = rhs_dz0;         // (D h_z)(0)
    b(3 * n + 0) = 0.0;
    b(3 * n + 1) = 0.0;
    b(3 * n + 2) = rhs_dzL;
    return lu.solve(b);
}

double Delta0Solve::solve_residual(const Eigen::VectorXd& rhs, const Eigen::VectorXd& sol,
                                   double rhs_dz0, double rhs_dzL) const {
    Eigen::VectorXd b = rhs;
    const int n = grid->N - 1;
    b(0) = 0.0;
    b(1) = 0.0;
    b(2) = rhs_dz0;
    b(3 * n) = 0.0;
    b(3 * n + 1) = 0.0;
    b(3 * n + 2) = rhs_dzL;
    return (K * sol - b).norm() / (1.0 + b.norm());
}

Delta0Solve make_delta0_solve(const RealNahm& A) {
    Delta0Solve s;
    s.grid = A.grid;
    const Grid& g0 = *A.grid;
    const int n3 = 3 * g0.N;
    // Delta0 = -(D + X0)^2 - sum_i Xi^2 with Xi block-diagonal; assembling it
    // directly keeps the per-iteration cost at one 3N x 3N product.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n3, n3);
    put_deriv(g0, cov, 0, 0);
    put_blocks(comm_blocks(A.A[0]), cov, 0, 0);
    s.K = -(cov * cov);
    for (int i = 1; i < 4; ++i) {
        const auto X = comm_blocks(A.A[i]);
        for (int k = 0; k < g0.N; ++k) s.K.block<3, 3>(3 * k, 3 * k) -= X[k] * X[k];
    }
    const Grid& g = *A.grid;
    const int n = g.N - 1;
    s.K_raw = s.K;
    // Tau rows: value of the off-diagonal components at the endpoints,
    // derivative of the diagonal component.
    for (int node : {0, n}) {
        for (int c : {0, 1}) {
            s.K.row(3 * node + c).setZero();
            s.K(3 * node + c, 3 * node + c) = 1.0;
        }
        s.K.row(3 * node + 2).setZero();
        for (int j = 0; j <= n; ++j) s.K(3 * node + 2, 3 * j + 2) = g.diff(node, j);
    }
    s.lu.compute(s.K);
    return s;
}

Quad coulomb_project(const RealNahm& A, const Delta0Solve& solver, const Quad& a) {
    const Eigen::VectorXd rhs = pack_su2(d0_star(A, a));
    const Eigen::VectorXd h = solver.solve(rhs);
    if (solver.solve_residual(rhs, h) > 1e-6)
        throw Reducible("constrained Laplacian is singular; Coulomb projection undefined");
    const Quad dh = d0(A, unpack_su2(A.grid, h));
    Quad out;
    for (int mu = 0; mu < 4; ++mu) out[mu] = a[mu] - dh[mu];
    return out;
}

}  // namespace d2alf
