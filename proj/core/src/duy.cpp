#include "d2alf/duy.hpp"

#include <cmath>
#include <sstream>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);
}

SectionFn SectionFn::deriv() const {
    SectionFn out(grid);
    const auto& D = grid->diff;
    for (int i = 0; i < grid->N; ++i) {
        Vec2 acc = Vec2::Zero();
        for (int j = 0; j < grid->N; ++j) acc += D(i, j) * values[j];
        out.values[i] = acc;
    }
    return out;
}

MatFn mu_real(const ComplexNahm& b) {
    const MatFn ad = b.alpha.adjoint();
    const MatFn bd = b.beta.adjoint();
    return (b.alpha + ad).deriv() + commutator(b.alpha, ad) + commutator(b.beta, bd);
}

double mu_real_norm(const ComplexNahm& b) {
    const MatFn m = mu_real(b);
    return std::sqrt(std::max(0.0, l2_inner_field(m, m).real()));
}

namespace {

SectionFn cov(const MatFn& a, const SectionFn& s, double sign) {
    // (d + sign * a) s
    SectionFn out = s.deriv();
    for (int k = 0; k < s.grid->N; ++k) out.values[k] += sign * (a.values[k] * s.values[k]);
    return out;
}

SectionFn mult(const MatFn& a, const SectionFn& s) {
    SectionFn out(s.grid);
    for (int k = 0; k < s.grid->N; ++k) out.values[k] = a.values[k] * s.values[k];
    return out;
}

}  // namespace

double weitzenbock_residual(const ComplexNahm& b, const SectionFn& s) {
    const RealNahm ar = realify(b, Xi3{});
    const MatFn ad = b.alpha.adjoint();
    const MatFn bd = b.beta.adjoint();
    const MatFn mur = mu_real(b);

    // Delta0 s = -d_{A0}^2 s - sum_i (A^i)^2 s
    SectionFn d0s = cov(ar.A[0], cov(ar.A[0], s, 1.0), 1.0);
    SectionFn delta0(s.grid);
    for (int k = 0; k < s.grid->N; ++k) {
        Vec2 acc = -d0s.values[k];
        for (int i = 1; i < 4; ++i)
            acc -= ar.A[i].values[k] * (ar.A[i].values[k] * s.values[k]);
        delta0.values[k] = acc;
    }
    // Dbar0 s = -d_{-alpha^dag} d_alpha s + beta^dag beta s
    SectionFn bar = cov(ad, cov(b.alpha, s, 1.0), -1.0);
    SectionFn bbs = mult(bd, mult(b.beta, s));
    // Dtilde0 s = -d_alpha d_{-alpha^dag} s + beta beta^dag s
    SectionFn til = cov(b.alpha, cov(ad, s, -1.0), 1.0);
    SectionFn bbs2 = mult(b.beta, mult(bd, s));

    double scale = 0.0, r1 = 0.0, r2 = 0.0;
    for (int k = 1; k + 1 < s.grid->N; ++k) {
        const Vec2 v0 = delta0.values[k];
        const Vec2 v1 = -bar.values[k] + bbs.values[k] + 0.5 * (mur.values[k] * s.values[k]);
        const Vec2 v2 = -til.values[k] + bbs2.values[k] - 0.5 * (mur.values[k] * s.values[k]);
        scale = std::max(scale, v0.norm());
        r1 = std::max(r1, (v0 - v1).norm());
        r2 = std::max(r2, (v0 - v2).norm());
    }
    return std::max(r1, r2) / (1.0 + scale);
}

MatFn make_hermitian_field(GridPtr grid) {
    MatFn h(grid);
    h.bc0.value = BcKind::Diagonal;
    h.bc0.deriv = BcKind::OffDiagonal;
    h.bcL.value = BcKind::Diagonal;
    h.bcL.deriv = BcKind::OffDiagonal;
    return h;
}

Mat2 psi_apply(const Mat2& h, const Mat2& x) {
    // Psi(x,y) = (e^{2(y-x)} - 2(y-x) - 1) / (2 (y-x)^2), Psi(x,x) = 1.
    const HermEig e = herm_eig(h);
    auto psi = [](double a, double b) {
        const double d = b - a;
        if (std::abs(d) < 1e-6) return 1.0 + (2.0 / 3.0) * d + (1.0 / 3.0) * d * d;
        return (std::exp(2.0 * d) - 2.0 * d - 1.0) / (2.0 * d * d);
    };
    Mat2 out = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const cplx aij = e.vectors.col(i).adjoint() * x * e.vectors.col(j);
            out += aij * psi(e.values(j), e.values(i)) * (e.vectors.col(i) * e.vectors.col(j).adjoint());
        }
    return out;
}

double donaldson_M(const MatFn& h, const ComplexNahm& b) {
    const Grid& g = *b.grid;
    const MatFn mur = mu_real(b);
    const MatFn dh = h.deriv();
    const MatFn bd = b.beta.adjoint();
    const MatFn ad = b.alpha.adjoint();
    double acc = 0.0;
    for (int k = 0; k < g.N; ++k) {
        const Mat2& hk = h.values[k];
        const Mat2 da_h = dh.values[k] + b.alpha.values[k] * hk - hk * b.alpha.values[k];
        const Mat2 dad_h = dh.values[k] - ad.values[k] * hk + hk * ad.values[k];
        const Mat2 bh = b.beta.values[k] * hk - hk * b.beta.values[k];
        const Mat2 hbd = hk * bd.values[k] - bd.values[k] * hk;
        cplx tr = -(hk * mur.values[k]).trace();
        tr += (psi_apply(-hk, da_h) * dad_h).trace();
        tr += (psi_apply(-hk, bh) * hbd).trace();
        acc += g.weights(k) * tr.real();
    }
    return acc;
}

FrameChange adapted_frame_change(const Grid& grid, double xiR0, double xiRL) {
    FrameChange fc;
    const double L = grid.L;
    fc.phi.resize(grid.N);
    fc.phi_deriv.resize(grid.N);
    for (int k = 0; k < grid.N; ++k) {
        const double t = grid.nodes(k);
        const double w = (L / (2.0 * M_PI)) * std::sin(2.0 * M_PI * t / L);
        const double wp = std::cos(2.0 * M_PI * t / L);
        const double s = xiR0 + (xiRL - xiR0) * t / L;
        const double sp = (xiRL - xiR0) / L;
        fc.phi(k) = w * s;
        fc.phi_deriv(k) = wp * s + w * sp;
    }
    return fc;
}

ComplexNahm apply_formal_diag(const ComplexNahm& b, const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& phi_deriv) {
    ComplexNahm out = b;
    for (int k = 0; k < b.grid->N; ++k) {
        Mat2 g, gi;
        g << std::exp(phi(k)), 0, 0, std::exp(-phi(k));
        gi << std::exp(-phi(k)), 0, 0, std::exp(phi(k));
        out.alpha.values[k] = gi * b.alpha.values[k] * g + phi_deriv(k) * pauli_z();
        out.beta.values[k] = gi * b.beta.values[k] * g;
    }
    return out;
}

ComplexNahm to_unitary_frame(const ComplexNahm& b, double xiR0, double xiRL) {
    const FrameChange fc = adapted_frame_change(*b.grid, xiR0, xiRL);
    return apply_formal_diag(b, fc.phi, fc.phi_deriv);
}

ComplexNahm exp_action(const MatFn& h, const ComplexNahm& b) {
    ComplexNahm out = b;
    const MatFn dh = h.deriv();
    for (int k = 0; k < b.grid->N; ++k) {
        const Mat2 g = herm_exp(h.values[k]);
        const Mat2 gi = herm_exp(-h.values[k]);
        // g^-1 dg from the spectral derivative of h through the exponential:
        // d(e^h) = int_0^1 e^{sh} dh e^{(1-s)h} ds, evaluated in the eigenbasis.
        const HermEig e = herm_eig(h.values[k]);
        const Mat2 dhe = e.vectors.adjoint() * dh.values[k] * e.vectors;
        Mat2 dg = Mat2::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double li = e.values(i), lj = e.values(j);
                double f;
                if (std::abs(li - lj) < 1e-9)
                    f = std::exp(li);
                else
                    f = (std::exp(li) - std::exp(lj)) / (li - lj);
                dg(i, j) = dhe(i, j) * f;
            }
        dg = e.vectors * dg * e.vectors.adjoint();
        out.alpha.values[k] = gi * b.alpha.values[k] * g + gi * dg;
        out.beta.values[k] = gi * b.beta.values[k] * g;
    }
    return out;
}

namespace {

// Newton branch for stable input (unitary frame).
DuyResult solve_stable(const ComplexNahm& b_unit, const ComplexNahm& b_input, const Xi3& xi,
                       const DuyOptions& opts) {
    DuyResult res;
    const GridPtr grid = b_unit.grid;
    const double bscale =
        1.0 + std::sqrt(std::abs(l2_inner_field(b_input.alpha, b_input.alpha).real()) +
                        std::abs(l2_inner_field(b_input.beta, b_input.beta).real()));

    MatFn h = make_hermitian_field(grid);
    if (opts.h_init && opts.h_init->grid == grid) {
        for (int k = 0; k < grid->N; ++k) h.values[k] = opts.h_init->values[k];
        h = project_bc(h);
    }
    ComplexNahm cur = opts.h_init ? exp_action(h, b_unit) : b_unit;
    double resid = mu_real_norm(cur);
    if (opts.record_history) {
        res.M_history.push_back(0.0);
        res.residual_history.push_back(resid);
    }
    int iter = 0;
    while (resid > opts.tol * bscale) {
        if (iter >= opts.max_iter) {
            std::ostringstream os;
            os << "no convergence after " << iter << " iterations; residual history:";
            for (double r : res.residual_history) os << " " << r;
            throw NoConvergence(os.str());
        }
        const RealNahm Acur = realify(cur, xi);
        Delta0Solve solver = make_delta0_solve(Acur);
        const MatFn mur = mu_real(cur);
        const Eigen::VectorXd rhs = pack_herm(mur);
        Eigen::VectorXd step = solver.solve(rhs);
        if (solver.solve_residual(rhs, step) > 1e-8) {
            // Near-singular constrained Laplacian: Tikhonov-shifted normal equations.
            Eigen::MatrixXd KtK = solver.K.transpose() * solver.K;
            KtK.diagonal().array() += 1e-12 * KtK.diagonal().maxCoeff();
            Eigen::VectorXd bb = rhs;
            const int n = grid->N - 1;
            bb(0) = bb(1) = bb(2) = 0.0;
            bb(3 * n) = bb(3 * n + 1) = bb(3 * n + 2) = 0.0;
            step = Eigen::LLT<Eigen::MatrixXd>(KtK).solve(solver.K.transpose() * bb);
            res.tikhonov_used = true;
        }
        // delta h with Delta0' delta h = mu_R(B'); descent direction for |mu_R|^2
        // at rate d/dtau |mu_R|^2 = -4 |mu_R|^2.
        MatFn dh = unpack_herm(grid, step);
        dh.bc0 = h.bc0;
        dh.bcL = h.bcL;
        const double f0 = 0.5 * resid * resid;
        double step_sup = 0.0;
        for (const auto& m : dh.values) step_sup = std::max(step_sup, m.norm());
        double s = std::min(1.0, 4.0 / step_sup);  // keep trial transforms representable
        MatFn h_trial = h;
        double resid_trial = resid;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            try {
                MatFn cand = make_hermitian_field(grid);
                for (int k = 0; k < grid->N; ++k)
                    cand.values[k] = herm_log(
                        quasigroup_product(herm_exp(h.values[k]), herm_exp(s * dh.values[k])));
                // pointwise matrix functions leave node-level noise that the
                // spectral derivative would amplify; the fields are analytic
                cand = project_bc(spectral_filter(cand));
                const ComplexNahm trial = exp_action(cand, b_unit);
                const double r = mu_real_norm(trial);
                if (std::isfinite(r) && 0.5 * r * r <= f0 * (1.0 - 4.0 * opts.armijo_c1 * s)) {
                    h_trial = cand;
                    resid_trial = r;
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                // overflowing trial step: shrink and retry
            }
            s *= opts.backtrack;
        }
        if (!accepted) {
            std::ostringstream os;
            os << "line search stalled at residual " << resid;
            throw NoConvergence(os.str());
        }
        h = h_trial;
        cur = exp_action(h, b_unit);
        resid = resid_trial;
        ++iter;
        if (opts.record_history) {
            res.M_history.push_back(donaldson_M(h, b_unit));
            res.residual_history.push_back(resid);
        }
    }
    res.h = h;
    res.g = MatFn(grid);
    for (int k = 0; k < grid->N; ++k) res.g.values[k] = herm_exp(h.values[k]);
    res.A = realify(cur, xi);
    for (auto& f : res.A.A) f = project_bc(f);
    res.residual = resid;
    res.iterations = iter;
    return res;
}

// Diagonalizing transform from the two sublines of reducible data.
MatFn diagonalizing_gauge(const ComplexNahm& b, const Subline& s1, const Subline& s2) {
    MatFn g(b.grid);
    for (int k = 0; k < b.grid->N; ++k) {
        Mat2 m;
        m.col(0) = s1.v[k];
        m.col(1) = s2.v[k];
        g.values[k] = m;
    }
    // Continuous square root of det keeps the field in SL(2,C).
    cplx prev = std::sqrt(g.values[0].determinant());
    for (int k = 0; k < b.grid->N; ++k) {
        cplx s = std::sqrt(g.values[k].determinant());
        if (std::abs(s - prev) > std::abs(-s - prev)) s = -s;
        g.values[k] /= s;
        prev = s;
    }
    return g;
}

DuyResult solve_polystable(const ComplexNahm& b, double xiR0, double xiRL,
                           const DuyOptions& opts) {
    DuyResult res;
    res.abelian = true;
    const GridPtr grid = b.grid;
    ComplexNahm work = b;
    double xr0 = xiR0, xrL = xiRL;
    auto subs = find_sublines(work);
    if (subs.size() != 2) throw Error("polystable branch expects two sublines");
    bool twisted = false;
    if (subs[0].sign0 != subs[0].signL) {
        // Mixed endpoint signs: move to the matching-sign chamber first.
        work = gauge_act(GaugeTransform::extended_g1(grid), work);
        xrL = -xrL;
        twisted = true;
        subs = find_sublines(work);
        if (subs.size() != 2 || subs[0].sign0 != subs[0].signL)
            throw Error("twisting did not align subline endpoint signs");
    }
    res.twisted = twisted;
    if (std::abs(work.xiC0 - work.xiCL) > 1e-8 * (1.0 + std::abs(work.xiC0)) ||
        std::abs(xr0 - xrL) > 1e-10 * (1.0 + std::abs(xr0)))
        throw Error("polystable data should sit at matching parameters after twisting");

    // Diagonalize, pass to the unitary frame and integrate the abelian problem.
    const MatFn gd = diagonalizing_gauge(work, subs[0], subs[1]);
    GaugeTransform gt;
    gt.g = gd;
    gt.kind = GaugeKind::Complex;
    ComplexNahm diag = work;
    {
        // Bypass the class boundary check: the diagonalizing columns carry a
        // scalar reparametrization, harmless for the abelian reduction.
        const MatFn dg = gd.deriv();
        for (int k = 0; k < grid->N; ++k) {
            const Mat2 gi = gd.values[k].inverse();
            diag.alpha.values[k] = gi * work.alpha.values[k] * gd.values[k] + gi * dg.values[k];
            diag.beta.values[k] = gi * work.beta.values[k] * gd.values[k];
        }
    }
    const ComplexNahm unit = to_unitary_frame(diag, xr0, xrL);

    // alpha_u is diagonal; A^1 component z1(t) integrates to the gauge field
    // h1 with h1' = xiR - z1 and Neumann ends.
    Eigen::VectorXd z1(grid->N);
    for (int k = 0; k < grid->N; ++k) {
        // A1 = -i(alpha+alpha^dag)/2 = -i z1 sz + offdiag
        const Mat2 sum = unit.alpha.values[k] + unit.alpha.values[k].adjoint();
        z1(k) = (0.25 * (sum(0, 0) - sum(1, 1))).real();
    }
    // h1(t) = int_0^t (xiR - z1); quadrature of the interpolant via the
    // antiderivative of the Chebyshev expansion is overkill here, a dense
    // solve of h1' = xiR - z1 with h1(0) = 0 does the same spectrally.
    Eigen::MatrixXd K = grid->diff;
    Eigen::VectorXd rhs(grid->N);
    for (int k = 0; k < grid->N; ++k) rhs(k) = xr0 - z1(k);
    K.row(0).setZero();
    K(0, 0) = 1.0;
    rhs(0) = 0.0;
    const Eigen::VectorXd h1 = K.partialPivLu().solve(rhs);

    // Total transform and the explicit constant solution.
    MatFn total(grid);
    const FrameChange fc = adapted_frame_change(*grid, xr0, xrL);
    for (int k = 0; k < grid->N; ++k) {
        Mat2 gfr, gab;
        gfr << std::exp(-fc.phi(k)), 0, 0, std::exp(fc.phi(k));  // unitary <- standard
        gab << std::exp(h1(k)), 0, 0, std::exp(-h1(k));
        total.values[k] = gd.values[k] * gfr * gab;
    }
    res.g = MatFn(grid);
    for (int k = 0; k < grid->N; ++k) {
        const Mat2 t = total.values[k];
        res.g.values[k] = herm_sqrt(t * t.adjoint());
    }
    res.h = MatFn(grid);
    for (int k = 0; k < grid->N; ++k) res.h.values[k] = herm_log(res.g.values[k]);

    Xi3 xi;
    xi.xi0 << xr0, work.xiC0.real(), work.xiC0.imag();
    xi.xiL << xrL, work.xiCL.real(), work.xiCL.imag();
    RealNahm A = RealNahm::make(grid, xi);  // constants -i xi^i sz, A0 = 0
    if (twisted) A = gauge_act(GaugeTransform::extended_g1(grid), A);
    res.A = A;
    res.residual = mu_real_norm(complexify(res.A));
    res.iterations = 0;
    res.M_history = {0.0};
    (void)opts;
    return res;
}

}  // namespace

DuyResult solve_duy(const ComplexNahm& b, double xiR0, double xiRL, const DuyOptions& opts) {
    const Stability st = classify_stability(b, xiR0, xiRL);
    if (st == Stability::Unstable || st == Stability::StrictlySemistableNonPoly)
        throw UnstableInput(std::string("stability class ") + to_string(st));
    if (st == Stability::StrictlyPolystable) return solve_polystable(b, xiR0, xiRL, opts);
    Xi3 xi;
    xi.xi0 << xiR0, b.xiC0.real(), b.xiC0.imag();
    xi.xiL << xiRL, b.xiCL.real(), b.xiCL.imag();
    const ComplexNahm b_unit = to_unitary_frame(b, xiR0, xiRL);
    return solve_stable(b_unit, b, xi, opts);
}

}  // namespace d2alf
