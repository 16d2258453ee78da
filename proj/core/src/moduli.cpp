#include "d2alf/moduli.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "d2alf/errors.hpp"
#include "d2alf/parallel.hpp"

namespace d2alf {

namespace {

// Append `rows` unit rows that pin component `comp` of field `field` at
// `node` (value row) or its spectral derivative (deriv row).
struct StackBuilder {
    Eigen::MatrixXd M;
    int row = 0;

    StackBuilder(int rows, int cols) : M(Eigen::MatrixXd::Zero(rows, cols)) {}

    void put_block(const Eigen::MatrixXd& B) {
        M.block(row, 0, B.rows(), B.cols()) = B;
        row += static_cast<int>(B.rows());
    }
    void value_row(int field, int comp, int node, int n3) {
        M(row++, field * n3 + 3 * node + comp) = 1.0;
    }
    void deriv_row(const Grid& g, int field, int comp, int node, int n3) {
        for (int j = 0; j < g.N; ++j) M(row, field * n3 + 3 * j + comp) = g.diff(node, j);
        ++row;
    }
};

struct CutResult {
    int dim = 0;
    double gap = 0.0;
};

CutResult count_kernel(const Eigen::VectorXd& sv, double rel_cut) {
    const double smax = sv.maxCoeff();
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < rel_cut * smax) ++k;
    CutResult out;
    out.dim = k;
    if (k == 0) {
        out.gap = smax / std::max(sv.minCoeff(), 1e-300);
        // no kernel: report the distance of the smallest value from the cut
        out.gap = sv.minCoeff() / (rel_cut * smax);
    } else if (k == sv.size()) {
        out.gap = 1e300;
    } else {
        const double above = sv(sv.size() - k - 1);
        const double below = std::max(sv(sv.size() - k), 1e-300);
        out.gap = above / below;
    }
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues();
}

Eigen::MatrixXd stack_h0(const LinearizedOps& ops) {
    const Grid& g = *ops.grid;
    const int n3 = 3 * g.N, n = g.N - 1;
    StackBuilder sb(4 * n3 + 6, n3);
    sb.put_block(ops.d0);
    sb.value_row(0, 0, 0, n3);
    sb.value_row(0, 1, 0, n3);
    sb.value_row(0, 0, n, n3);
    sb.value_row(0, 1, n, n3);
    sb.deriv_row(g, 0, 2, 0, n3);
    sb.deriv_row(g, 0, 2, n, n3);
    return sb.M;
}

Eigen::MatrixXd stack_h1(const LinearizedOps& ops, bool special) {
    const Grid& g = *ops.grid;
    const int n3 = 3 * g.N, n = g.N - 1;
    const int nbc = special ? 8 : 2;
    StackBuilder sb(n3 + 3 * n3 + nbc, 4 * n3);
    sb.put_block(ops.d0s);
    sb.put_block(ops.d1);
    const int fields = special ? 4 : 1;
    for (int mu = 0; mu < fields; ++mu) {
        sb.value_row(mu, 2, 0, n3);
        sb.value_row(mu, 2, n, n3);
    }
    return sb.M;
}

Eigen::MatrixXd stack_h2(const LinearizedOps& ops) {
    const Grid& g = *ops.grid;
    const int n3 = 3 * g.N, n = g.N - 1;
    StackBuilder sb(4 * n3 + 18, 3 * n3);
    sb.put_block(ops.d1s);
    for (int i = 0; i < 3; ++i) {
        sb.value_row(i, 0, 0, n3);
        sb.value_row(i, 1, 0, n3);
        sb.value_row(i, 0, n, n3);
        sb.value_row(i, 1, n, n3);
        sb.deriv_row(g, i, 2, 0, n3);
        sb.deriv_row(g, i, 2, n, n3);
    }
    return sb.M;
}

}  // namespace

KernelDims kernel_dims(const RealNahm& A, double rel_cut) {
    const LinearizedOps ops = assemble_ops(A);
    KernelDims out;
    out.worst_gap = 1e300;
    auto run = [&](const Eigen::MatrixXd& M) {
        const CutResult c = count_kernel(singular_values(M), rel_cut);
        if (c.dim > 0 && c.gap < 10.0)
            throw IllConditioned("singular-value gap at the kernel cut below 10x threshold");
        out.worst_gap = std::min(out.worst_gap, c.gap);
        return c.dim;
    };
    out.h0 = run(stack_h0(ops));
    out.h1sp = run(stack_h1(ops, true));
    out.h1gen = run(stack_h1(ops, false));
    out.h2sp = run(stack_h2(ops));
    return out;
}

HarmonicFrame harmonic_frame(const RealNahm& A, double rel_cut) {
    const LinearizedOps ops = assemble_ops(A);
    {
        const CutResult h0 = count_kernel(singular_values(stack_h0(ops)), rel_cut);
        if (h0.dim != 0) throw NotIrreducible("base point has reducible directions");
    }
    const Eigen::MatrixXd M = stack_h1(ops, true);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const CutResult cut = count_kernel(sv, rel_cut);
    if (cut.dim != 4) throw WrongDimension("harmonic tangent space is not 4-dimensional");

    HarmonicFrame fr;
    fr.base = A;
    std::array<Eigen::VectorXd, 4> vecs;
    const int cols = static_cast<int>(M.cols());
    for (int k = 0; k < 4; ++k) vecs[k] = svd.matrixV().col(cols - 1 - k);

    // Gram-Schmidt in the L2 metric.
    std::array<Quad, 4> basis;
    for (int k = 0; k < 4; ++k) basis[k] = unpack_quad(A.grid, vecs[k]);
    for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < k; ++j) {
            const double c = l2_inner(basis[k], basis[j]);
            for (int mu = 0; mu < 4; ++mu) basis[k][mu] = basis[k][mu] - basis[j][mu] * cplx(c);
        }
        const double nrm = std::sqrt(l2_inner(basis[k], basis[k]));
        for (int mu = 0; mu < 4; ++mu) basis[k][mu] = basis[k][mu] * cplx(1.0 / nrm);
    }
    fr.basis = basis;

    double resid = 0.0;
    for (const auto& a : fr.basis) {
        resid = std::max(resid, d0_star(A, a).max_norm());
        for (const auto& f : d1(A, a)) resid = std::max(resid, f.max_norm());
    }
    fr.kernel_residual = resid;

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) fr.G(a, b) = l2_inner(fr.basis[a], fr.basis[b]);
    for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                fr.Omega[i](a, b) = omega_form(i + 1, fr.basis[a], fr.basis[b]);
        fr.J[i] = fr.G.inverse() * fr.Omega[i];
    }
    return fr;
}

std::vector<ChartPoint> metric_pullback_chart(const std::vector<cplx>& alpha0s,
                                              const std::vector<cplx>& betaxs, GridPtr grid,
                                              const ChartOptions& opts) {
    std::vector<ChartPoint> out(alpha0s.size() * betaxs.size());
    const int nb = static_cast<int>(betaxs.size());
    parallel_for(static_cast<int>(out.size()), [&](int idx) {
        ChartPoint& pt = out[idx];
        pt.alpha0 = alpha0s[idx / nb];
        pt.beta_x = betaxs[idx % nb];
        try {
            FamilyParams p;
            p.alpha0 = pt.alpha0;
            p.beta_x = pt.beta_x;
            const ComplexNahm b =
                complex_nahm_family(FamilyKind::I, p, opts.xiC0, opts.xiCL, grid->L, grid);
            const DuyResult r = solve_duy(b, opts.xiR0, opts.xiRL, opts.duy);
            const HarmonicFrame fr = harmonic_frame(r.A);
            pt.residual = r.residual;
            pt.G = fr.G;
            pt.Omega = fr.Omega;
            pt.converged = true;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    }, opts.workers);
    return out;
}

}  // namespace d2alf
