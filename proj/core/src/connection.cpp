#include "d2alf/connection.hpp"

#include <cmath>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);

MatFn solve_gauge_laplacian(const RealNahm& A, const Delta0Solve& solver,
                            const Eigen::VectorXd& rhs, double dz0, double dzL, bool hermitian) {
    const Eigen::VectorXd sol = solver.solve(rhs, dz0, dzL);
    if (solver.solve_residual(rhs, sol, dz0, dzL) > 1e-7)
        throw Reducible("constrained Laplacian is singular");
    return hermitian ? unpack_herm(A.grid, sol) : unpack_su2(A.grid, sol);
}

}  // namespace

BoundaryHarmonics boundary_harmonics(const RealNahm& A) {
    const Delta0Solve solver = make_delta0_solve(A);
    BoundaryHarmonics bh;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3 * A.grid->N);
    bh.h0 = solve_gauge_laplacian(A, solver, zero, 1.0, 0.0, true);
    bh.hL = solve_gauge_laplacian(A, solver, zero, 0.0, 1.0, true);
    auto resid = [&](const MatFn& h) {
        Eigen::VectorXd v = solver.K * pack_herm(h);
        // Discard the six tau rows; they carry the boundary data.
        const int n = A.grid->N - 1;
        v(0) = v(1) = v(2) = 0.0;
        v(3 * n) = v(3 * n + 1) = v(3 * n + 2) = 0.0;
        return v.norm() / std::max(1.0, pack_herm(h).norm());
    };
    bh.residual0 = resid(bh.h0);
    bh.residualL = resid(bh.hL);
    return bh;
}

Quad d0_hermitian(const RealNahm& A, const MatFn& h) {
    Quad out;
    out[0] = h.deriv() + commutator(A.A[0], h);
    for (int i = 1; i < 4; ++i) out[i] = commutator(A.A[i], h);
    return out;
}

Quad dbar0_dir(int k, const RealNahm& A, const MatFn& h) {
    if (k < 1 || k > 3) throw InvalidParams("dbar0 direction must be 1, 2 or 3");
    Quad out;
    out[0] = commutator(A.A[k], h) * I;
    const MatFn covh = h.deriv() + commutator(A.A[0], h);
    for (int l = 1; l <= 3; ++l) {
        MatFn acc(A.grid);
        if (l == k) acc = covh * cplx(-1.0);
        else {
            // epsilon^{k l m} [A^m, h] with m the remaining index
            const int m = 6 - k - l;
            const int sign = ((l - k + 3) % 3 == 1) ? +1 : -1;
            acc = acc + commutator(A.A[m], h) * cplx(sign);
        }
        out[l] = acc * I;
    }
    return out;
}

namespace {

// Variation of dbar0^{(k)} with the base data replaced by a tangent b.
Quad dbar0_var(int k, const Quad& b, const MatFn& h) {
    Quad out;
    GridPtr grid = h.grid;
    out[0] = commutator(b[k], h) * I;
    for (int l = 1; l <= 3; ++l) {
        MatFn acc(grid);
        if (l == k) acc = commutator(b[0], h) * cplx(-1.0);
        const int m = 6 - k - l;
        if (l != k && m >= 1 && m <= 3) {
            const int sign = ((l - k + 3) % 3 == 1) ? +1 : -1;
            acc = acc + commutator(b[m], h) * cplx(sign);
        }
        out[l] = acc * I;
    }
    return out;
}

}  // namespace

Quad horizontal_lift(const RealNahm& A, const BoundaryHarmonics& bh, const Eigen::Vector3d& dxi0,
                     const Eigen::Vector3d& dxiL) {
    Quad out;
    for (auto& f : out) f = MatFn(A.grid);
    for (int i = 1; i <= 3; ++i) {
        if (dxi0(i - 1) != 0.0) {
            const Quad a = dbar0_dir(i, A, bh.h0);
            for (int mu = 0; mu < 4; ++mu) out[mu] = out[mu] + a[mu] * cplx(dxi0(i - 1));
        }
        if (dxiL(i - 1) != 0.0) {
            const Quad a = dbar0_dir(i, A, bh.hL);
            for (int mu = 0; mu < 4; ++mu) out[mu] = out[mu] + a[mu] * cplx(dxiL(i - 1));
        }
    }
    return out;
}

Quad horizontal_lift(const RealNahm& A, const Eigen::Vector3d& dxi0, const Eigen::Vector3d& dxiL) {
    return horizontal_lift(A, boundary_harmonics(A), dxi0, dxiL);
}

Xi3 XiPath::at(double u) const {
    if (s.empty()) throw InvalidParams("empty path");
    if (u <= s.front()) return xi.front();
    if (u >= s.back()) return xi.back();
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        if (u <= s[k + 1]) {
            const double w = (u - s[k]) / (s[k + 1] - s[k]);
            Xi3 out;
            out.xi0 = (1.0 - w) * xi[k].xi0 + w * xi[k + 1].xi0;
            out.xiL = (1.0 - w) * xi[k].xiL + w * xi[k + 1].xiL;
            return out;
        }
    }
    return xi.back();
}

double XiPath::arclength() const {
    double len = 0.0;
    for (size_t k = 0; k + 1 < xi.size(); ++k)
        len += std::sqrt((xi[k + 1].xi0 - xi[k].xi0).squaredNorm() +
                         (xi[k + 1].xiL - xi[k].xiL).squaredNorm());
    return len;
}

namespace {

// One corrector pass: least-squares Newton step for (mu(A') = 0, d0* at the
// predicted point) over the class-preserving tangent space.
RealNahm corrector(const RealNahm& pred, int iters) {
    RealNahm cur = pred;
    const Grid& g = *pred.grid;
    const int N = g.N, n3 = 3 * N, n = N - 1;
    // Free indices: all but the endpoint z-components of each field.
    std::vector<int> free_idx;
    free_idx.reserve(4 * n3 - 8);
    for (int mu = 0; mu < 4; ++mu)
        for (int k = 0; k < N; ++k)
            for (int c = 0; c < 3; ++c) {
                if (c == 2 && (k == 0 || k == n)) continue;
                free_idx.push_back(mu * n3 + 3 * k + c);
            }
    const LinearizedOps ops_pred = assemble_ops(pred);
    for (int it = 0; it < iters; ++it) {
        const LinearizedOps ops = assemble_ops(cur);
        Eigen::MatrixXd K(4 * n3, static_cast<int>(free_idx.size()));
        for (size_t c = 0; c < free_idx.size(); ++c) {
            K.col(c).head(3 * n3) = ops.d1.col(free_idx[c]);
            K.col(c).tail(n3) = ops_pred.d0s.col(free_idx[c]);
        }
        const auto mu = moment_maps(cur);
        Eigen::VectorXd rhs(4 * n3);
        for (int i = 0; i < 3; ++i) rhs.segment(i * n3, n3) = -pack_su2(mu[i]);
        Quad diff;
        for (int m = 0; m < 4; ++m) diff[m] = cur.A[m] - pred.A[m];
        rhs.tail(n3) = -pack_su2(d0_star(pred, diff));
        const Eigen::VectorXd step = K.colPivHouseholderQr().solve(rhs);
        for (size_t c = 0; c < free_idx.size(); ++c) {
            const int idx = free_idx[c];
            const int m = idx / n3, k = (idx % n3) / 3, comp = idx % 3;
            Eigen::Vector3d v = pauli_expand(cur.A[m].values[k], 1e-6);
            v(comp) += step(static_cast<int>(c));
            cur.A[m].values[k] = pauli_assemble(v);
        }
    }
    for (auto& f : cur.A) f = project_bc(f);
    return cur;
}

}  // namespace

RealNahm parallel_transport_path(const RealNahm& A, const XiPath& path,
                                 const TransportOptions& opts) {
    const double len = path.arclength();
    const int nsteps = std::max(opts.min_steps, static_cast<int>(std::ceil(opts.steps_per_unit * len)));
    RealNahm cur = A;
    for (int k = 0; k < nsteps; ++k) {
        const double u1 = static_cast<double>(k + 1) / nsteps;
        const Xi3 next = path.at(u1);
        const double scale = std::max(1.0, std::sqrt(next.xi0.squaredNorm() + next.xiL.squaredNorm()));
        if ((next.xi0 - next.xiL).norm() < opts.wall_tube_rel * scale ||
            (next.xi0 + next.xiL).norm() < opts.wall_tube_rel * scale)
            throw PathHitsWall("path enters the non-generic tube");
        const Eigen::Vector3d d0v = next.xi0 - cur.xi.xi0;
        const Eigen::Vector3d dLv = next.xiL - cur.xi.xiL;
        const Quad lift = horizontal_lift(cur, d0v, dLv);
        RealNahm pred = cur;
        for (int mu = 0; mu < 4; ++mu) pred.A[mu] = cur.A[mu] + lift[mu];
        pred.xi = next;
        pred.retag();
        for (auto& f : pred.A) f = project_bc(f);
        cur = corrector(pred, opts.corrector_iters);
        cur.xi = next;
        cur.retag();
    }
    return cur;
}

Quad curvature_commutator(const RealNahm& A, const VariationSlot& sa, const VariationSlot& sb) {
    const BoundaryHarmonics bh = boundary_harmonics(A);
    const MatFn& h_a = (sa.endpoint == 0) ? bh.h0 : bh.hL;
    const MatFn& h_b = (sb.endpoint == 0) ? bh.h0 : bh.hL;
    const Quad a0 = dbar0_dir(sa.component, A, h_a);
    const Quad a1 = dbar0_dir(sb.component, A, h_b);

    const Delta0Solve solver = make_delta0_solve(A);
    const Quad d0ha = d0_hermitian(A, h_a);
    const Quad d0hb = d0_hermitian(A, h_b);

    MatFn rhsH0(A.grid), rhsH1(A.grid), rhsA0(A.grid);
    for (int mu = 0; mu < 4; ++mu) {
        rhsH0 = rhsH0 + commutator(a1[mu], d0ha[mu]) * cplx(2.0);
        rhsH1 = rhsH1 + commutator(a0[mu], d0hb[mu]) * cplx(2.0);
        rhsA0 = rhsA0 + commutator(a1[mu], a0[mu]) * cplx(-1.0);
    }
    const MatFn hH0 = solve_gauge_laplacian(A, solver, pack_herm(rhsH0), 0.0, 0.0, true);
    const MatFn hH1 = solve_gauge_laplacian(A, solver, pack_herm(rhsH1), 0.0, 0.0, true);
    const MatFn hA0 = solve_gauge_laplacian(A, solver, pack_su2(rhsA0), 0.0, 0.0, false);
    const MatFn hA1 = hA0 * cplx(-1.0);

    const Quad term1 = dbar0_var(sa.component, a1, h_a);
    const Quad term2 = dbar0_var(sb.component, a0, h_b);
    const Quad liftH0 = dbar0_dir(sa.component, A, hH0);
    const Quad liftH1 = dbar0_dir(sb.component, A, hH1);
    const Quad dA0 = d0(A, hA0);
    const Quad dA1 = d0(A, hA1);

    Quad out;
    for (int mu = 0; mu < 4; ++mu)
        out[mu] = term1[mu] - term2[mu] + liftH0[mu] + dA0[mu] - liftH1[mu] - dA1[mu];
    return out;
}

}  // namespace d2alf
