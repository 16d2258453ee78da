#include <doctest.h>

#include <cmath>
#include <random>

#include "d2alf/moduli.hpp"

using namespace d2alf;

namespace {
const cplx I(0, 1);
std::mt19937 rng(31);
double un(double a = -1.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

GridPtr grid48() {
    static GridPtr g = make_grid(1.0, 48);
    return g;
}

RealNahm duy_solution(GridPtr g, cplx alpha0, cplx betax, double x0, double xL) {
    FamilyParams p;
    p.alpha0 = alpha0;
    p.beta_x = betax;
    const ComplexNahm b = complex_nahm_family(FamilyKind::I, p, 0.1, -0.2, g->L, g);
    return solve_duy(b, x0, xL).A;
}

MatFn random_gauge_field(GridPtr g) {
    MatFn f(g);
    const double p1 = un(0, 3);
    for (int k = 0; k < g->N; ++k) {
        const double t = g->nodes(k), s = t / g->L;
        f.values[k] = pauli_assemble(Eigen::Vector3d(
            0.5 * std::sin(p1 + 2 * t) * s * (1 - s), -0.4 * s * (1 - s), 0.3 * s * s * (3 - 2 * s)));
    }
    return f;
}

Quad random_tangent(GridPtr g) {
    Quad a;
    for (auto& f : a) {
        f = MatFn(g);
        const double p1 = un(0, 3), p2 = un(0, 3);
        for (int k = 0; k < g->N; ++k) {
            const double t = g->nodes(k), s = t / g->L;
            f.values[k] = pauli_assemble(Eigen::Vector3d(std::sin(p1 + t), std::cos(p2 + 2 * t),
                                                         std::sin(3 * t) * s * (1 - s)));
        }
    }
    return a;
}

}  // namespace

TEST_CASE("linearized operators: complex property and flat point") {
    GridPtr g = grid48();

    RealNahm zero = RealNahm::make(g, Xi3{});
    const MatFn h = random_gauge_field(g);
    const Quad d0h = d0(zero, h);
    CHECK((d0h[0].values[10] - h.deriv().values[10]).norm() < 1e-12);
    for (int i = 1; i < 4; ++i) CHECK(d0h[i].max_norm() < 1e-14);

    const RealNahm A = duy_solution(g, cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const auto comp = d1(A, d0(A, h));
    double worst = 0.0;
    for (const auto& f : comp) worst = std::max(worst, f.max_norm());
    CHECK(worst < 1e-8);
}

TEST_CASE("adjoint pairings by quadrature") {
    GridPtr g = grid48();
    Xi3 xi;
    xi.xi0 << 0.4, -0.2, 0.7;
    xi.xiL << 1.1, 0.5, -0.3;
    RealNahm A = RealNahm::make(g, xi);
    for (int mu = 0; mu < 4; ++mu) {
        const double p1 = un(0, 3);
        for (int k = 0; k < g->N; ++k) {
            const double t = g->nodes(k), s = t / g->L;
            A.A[mu].values[k] += pauli_assemble(
                Eigen::Vector3d(0.4 * std::sin(p1 + t), 0.3 * std::cos(2 * t), 0.5 * s * (1 - s)));
        }
    }
    const MatFn h = random_gauge_field(g);
    const Quad a = random_tangent(g);
    const Quad d0h = d0(A, h);
    const double lhs = l2_inner(d0h, a);
    const MatFn d0sa = d0_star(A, a);
    double rhs = 0.0;
    for (int k = 0; k < g->N; ++k)
        rhs += g->weights(k) * (h.values[k] * d0sa.values[k]).trace().real();
    rhs *= -1.0 / (2.0 * g->L);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));

    std::array<MatFn, 3> f;
    for (auto& ff : f) {
        ff = MatFn(g);
        const double p2 = un(0, 3);
        for (int k = 0; k < g->N; ++k) {
            const double t = g->nodes(k), s = t / g->L;
            ff.values[k] = pauli_assemble(Eigen::Vector3d(0.4 * s * (1 - s) * std::sin(p2 + t),
                                                          0.2 * s * (1 - s), std::cos(p2 + 2 * t)));
        }
    }
    const auto d1a = d1(A, a);
    double lhs2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < g->N; ++k)
            lhs2 += g->weights(k) * (d1a[i].values[k] * f[i].values[k]).trace().real();
    const Quad d1sf = d1_star(A, f);
    double rhs2 = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int k = 0; k < g->N; ++k)
            rhs2 += g->weights(k) * (a[mu].values[k] * d1sf[mu].values[k]).trace().real();
    // boundary terms vanish through the class tags of a and f
    CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-9));
}

TEST_CASE("kernel dimensions at the flat point and at solutions") {
    GridPtr g = grid48();
    const KernelDims flat = kernel_dims(RealNahm::make(g, Xi3{}));
    CHECK(flat.h0 == 1);
    CHECK(flat.h1sp == 8);
    CHECK(flat.h1gen == 11);
    CHECK(flat.h2sp == 3);

    const RealNahm A = duy_solution(g, cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const KernelDims kd = kernel_dims(A);
    CHECK(kd.h0 == 0);
    CHECK(kd.h1sp == 4);
    CHECK(kd.h1gen == 10);
    CHECK(kd.h2sp == 0);
    CHECK(kd.worst_gap > 1e3);

    CHECK(kd.h1sp - kd.h0 - kd.h2sp == 4);
    CHECK(kd.h1gen - kd.h1sp == 6 - kd.h2sp);
    CHECK(flat.h1sp - flat.h0 - flat.h2sp == 4);
    CHECK(flat.h1gen - flat.h1sp == 6 - flat.h2sp);

    Xi3 xi;
    xi.xi0 << 0.6, 0.2, -0.1;
    xi.xiL = xi.xi0;
    const KernelDims red = kernel_dims(RealNahm::make(g, xi));
    CHECK(red.h0 == 1);
}

TEST_CASE("kernel dimensions agree across resolutions") {
    const RealNahm A32 = duy_solution(make_grid(1.0, 32), cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const RealNahm A64 = duy_solution(make_grid(1.0, 64), cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const KernelDims k32 = kernel_dims(A32);
    const KernelDims k64 = kernel_dims(A64);
    CHECK(k32.h0 == k64.h0);
    CHECK(k32.h1sp == k64.h1sp);
    CHECK(k32.h1gen == k64.h1gen);
    CHECK(k32.h2sp == k64.h2sp);
}

TEST_CASE("harmonic frame: orthonormality, forms, quaternions") {
    GridPtr g = grid48();
    const RealNahm A = duy_solution(g, cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const HarmonicFrame fr = harmonic_frame(A);
    CHECK(fr.kernel_residual < 1e-6);
    CHECK((fr.G - Eigen::Matrix4d::Identity()).norm() < 1e-10);
    CHECK(fr.G.determinant() > 0.0);
    for (int i = 0; i < 3; ++i) {
        CHECK((fr.Omega[i] + fr.Omega[i].transpose()).norm() < 1e-10);
        CHECK((fr.J[i] * fr.J[i] + Eigen::Matrix4d::Identity()).norm() < 1e-6);
    }
    CHECK((fr.J[0] * fr.J[1] - fr.J[2]).norm() < 1e-6);

    Xi3 xi;
    xi.xi0 << 0.6, 0.2, -0.1;
    xi.xiL = xi.xi0;
    CHECK_THROWS_AS(harmonic_frame(RealNahm::make(g, xi)), NotIrreducible);
}

TEST_CASE("frame forms rotate with simultaneous parameter rotation") {
    GridPtr g = grid48();
    const RealNahm A = duy_solution(g, cplx(0.5, 0.4), cplx(0.3, -0.2), 1.0, 2.0);
    const HarmonicFrame fr = harmonic_frame(A);
    const double th = 0.7;
    Eigen::Matrix3d R;
    R << 1, 0, 0, 0, std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th);
    RealNahm Ar = A;
    Ar.xi.xi0 = R * A.xi.xi0;
    Ar.xi.xiL = R * A.xi.xiL;
    for (int k = 0; k < g->N; ++k)
        for (int i = 0; i < 3; ++i) {
            Mat2 acc = Mat2::Zero();
            for (int j = 0; j < 3; ++j) acc += R(i, j) * A.A[j + 1].values[k];
            Ar.A[i + 1].values[k] = acc;
        }
    Ar.retag();
    const HarmonicFrame fr2 = harmonic_frame(Ar);
    Eigen::Matrix4d s1 = Eigen::Matrix4d::Zero(), s2 = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) {
        s1 += fr.Omega[i] * fr.Omega[i].transpose();
        s2 += fr2.Omega[i] * fr2.Omega[i].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> e1(s1), e2(s2);
    CHECK((e1.eigenvalues() - e2.eigenvalues()).norm() < 1e-6);
}

TEST_CASE("chart table and its symmetry") {
    GridPtr g = grid48();
    ChartOptions opts;
    opts.xiR0 = 1.0;
    opts.xiRL = 2.0;
    opts.xiC0 = 0.0;
    opts.xiCL = 0.0;
    std::vector<cplx> a0s = {cplx(0.4, 0.3), cplx(0.5, 0.5), cplx(0.6, 0.7)};
    std::vector<cplx> bxs = {cplx(-0.4, 0.0), cplx(0.0, 0.0), cplx(0.4, 0.0)};
    const auto pts = metric_pullback_chart(a0s, bxs, g, opts);
    REQUIRE(pts.size() == 9);
    for (const auto& p : pts) {
        CHECK(p.converged);
        CHECK(p.residual < 1e-8);
    }
    const RealNahm A = duy_solution(g, a0s[1], bxs[1], 1.0, 2.0);
    const HarmonicFrame fr = harmonic_frame(A);
    const ChartPoint& mid = pts[4];
    Eigen::Matrix4d s1 = Eigen::Matrix4d::Zero(), s2 = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) {
        s1 += fr.Omega[i] * fr.Omega[i].transpose();
        s2 += mid.Omega[i] * mid.Omega[i].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> e1(s1), e2(s2);
    CHECK((e1.eigenvalues() - e2.eigenvalues()).norm() < 1e-6);

    Eigen::Matrix4d sm = Eigen::Matrix4d::Zero(), sp = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) {
        sm += pts[3].Omega[i] * pts[3].Omega[i].transpose();
        sp += pts[5].Omega[i] * pts[5].Omega[i].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> em(sm), ep(sp);
    CHECK((em.eigenvalues() - ep.eigenvalues()).norm() < 1e-6);
}
