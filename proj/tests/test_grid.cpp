#include <doctest.h>

#include <cmath>
#include <random>

#include "d2alf/grid.hpp"

using namespace d2alf;

namespace {
std::mt19937 rng(777);
double un(double a = -1.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}
}  // namespace

TEST_CASE("grid construction basics") {
    CHECK_THROWS_AS(make_grid(-1.0, 32), InvalidSize);
    CHECK_THROWS_AS(make_grid(1.0, 4), InvalidSize);
    GridPtr g = make_grid(1.0, 8);
    CHECK(g->nodes(0) == doctest::Approx(0.0));
    CHECK(g->nodes(7) == doctest::Approx(1.0));
}

TEST_CASE("differentiation and quadrature exact on low-degree monomials") {
    GridPtr g = make_grid(2.0, 32);
    for (int k = 0; k <= 10; ++k) {
        Eigen::VectorXd tk(g->N), dtk(g->N);
        for (int i = 0; i < g->N; ++i) {
            tk(i) = std::pow(g->nodes(i), k);
            dtk(i) = k == 0 ? 0.0 : k * std::pow(g->nodes(i), k - 1);
        }
        CHECK((g->diff * tk - dtk).lpNorm<Eigen::Infinity>() < 1e-12 * std::pow(2.0, k) * 50);
        const double integral = g->weights.dot(tk);
        const double exact = std::pow(2.0, k + 1) / (k + 1);
        CHECK(std::abs(integral - exact) < 1e-12 * exact);
    }
}

TEST_CASE("quadrature weights positive and summing to L") {
    for (int N : {8, 33, 96}) {
        GridPtr g = make_grid(1.7, N);
        CHECK(g->weights.minCoeff() > 0.0);
        CHECK(std::abs(g->weights.sum() - 1.7) < 1e-12);
    }
}

TEST_CASE("integral of cosh and endpoint derivative of sine") {
    GridPtr g = make_grid(1.0, 32);
    Eigen::VectorXd f(g->N);
    for (int i = 0; i < g->N; ++i) f(i) = std::cosh(2.0 * 0.5 * g->nodes(i));
    CHECK(std::abs(g->weights.dot(f) - std::sinh(1.0)) < 1e-12);

    GridPtr g48 = make_grid(2.5, 48);
    Eigen::VectorXd s(g48->N);
    for (int i = 0; i < g48->N; ++i) s(i) = std::sin(M_PI * g48->nodes(i) / g48->L);
    const Eigen::VectorXd ds = g48->diff * s;
    CHECK(std::abs(ds(0) - M_PI / g48->L) < 1e-10);
}

TEST_CASE("l2 inner product basics and dense-quadrature oracle") {
    GridPtr g = make_grid(1.3, 48);
    const cplx I(0, 1);
    Quad a, b;
    for (auto& f : a) f = MatFn(g);
    for (auto& f : b) f = MatFn(g);
    for (int i = 0; i < g->N; ++i) a[0].values[i] = -I * pauli_x();
    b = a;
    CHECK(l2_inner(a, a) == doctest::Approx(1.0).epsilon(1e-13));

    // pointwise Pauli-orthogonal pair pairs to zero
    Quad c = a;
    for (int i = 0; i < g->N; ++i) c[0].values[i] = -I * pauli_y();
    CHECK(std::abs(l2_inner(a, c)) < 1e-13);

    // random smooth pair against a dense trapezoid oracle
    GridPtr gq = make_grid(1.0, 48);
    Quad u, v;
    for (auto& f : u) f = MatFn(gq);
    for (auto& f : v) f = MatFn(gq);
    auto smooth = [&](double t, double p1, double p2, double p3) {
        return pauli_assemble(Eigen::Vector3d(std::sin(p1 + 2.0 * t), std::cos(p2 + t),
                                              std::sin(p3 + 3.0 * t) * t));
    };
    std::array<std::array<double, 3>, 4> pu, pv;
    for (int mu = 0; mu < 4; ++mu) {
        pu[mu] = {un(0, 3), un(0, 3), un(0, 3)};
        pv[mu] = {un(0, 3), un(0, 3), un(0, 3)};
        for (int i = 0; i < gq->N; ++i) {
            u[mu].values[i] = smooth(gq->nodes(i), pu[mu][0], pu[mu][1], pu[mu][2]);
            v[mu].values[i] = smooth(gq->nodes(i), pv[mu][0], pv[mu][1], pv[mu][2]);
        }
    }
    const double spectral = l2_inner(u, v);
    const int M = 2048;
    double trapz = 0.0;
    for (int i = 0; i <= M; ++i) {
        const double t = gq->L * i / M;
        cplx tr = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            tr += (smooth(t, pu[mu][0], pu[mu][1], pu[mu][2]) *
                   smooth(t, pv[mu][0], pv[mu][1], pv[mu][2]))
                      .trace();
        const double w = (i == 0 || i == M) ? 0.5 : 1.0;
        trapz += w * tr.real();
    }
    trapz *= -(gq->L / M) / (2.0 * gq->L);
    CHECK(spectral == doctest::Approx(trapz).epsilon(1e-8));
}

TEST_CASE("spectral convergence of the inner product on analytic fields") {
    auto value = [](GridPtr g) {
        Quad u;
        for (auto& f : u) f = MatFn(g);
        for (int mu = 0; mu < 4; ++mu)
            for (int i = 0; i < g->N; ++i) {
                const double t = g->nodes(i);
                u[mu].values[i] = pauli_assemble(
                    Eigen::Vector3d(std::sin(5.0 * t + mu), std::cos(4.0 * t), std::sin(7.0 * t)));
            }
        return l2_inner(u, u);
    };
    const double exact = value(make_grid(1.0, 256));
    const double e16 = std::abs(value(make_grid(1.0, 16)) - exact);
    const double e32 = std::abs(value(make_grid(1.0, 32)) - exact);
    CHECK(e32 * 4.0 < e16);
}

TEST_CASE("grid mismatch is detected") {
    MatFn a(make_grid(1.0, 16)), b(make_grid(1.0, 24));
    CHECK_THROWS_AS(a + b, GridMismatch);
}

TEST_CASE("project_bc examples") {
    GridPtr g = make_grid(1.0, 32);
    const cplx I(0, 1);

    // already satisfying tags: unchanged
    MatFn f(g);
    for (int i = 0; i < g->N; ++i) f.values[i] = -I * pauli_x();
    f.bc0.value = BcKind::OffDiagonal;
    f.bcL.value = BcKind::OffDiagonal;
    const MatFn p = project_bc(f);
    double diff = 0.0;
    for (int i = 0; i < g->N; ++i) diff = std::max(diff, (p.values[i] - f.values[i]).norm());
    CHECK(diff < 1e-13);

    // constant diagonal with off-diagonal tag: endpoints zeroed
    MatFn h(g);
    for (int i = 0; i < g->N; ++i) h.values[i] = -I * pauli_z();
    h.bc0.value = BcKind::OffDiagonal;
    h.bcL.value = BcKind::OffDiagonal;
    const MatFn q = project_bc(h);
    CHECK(q.values[0].norm() < 1e-13);
    CHECK(q.values[g->N - 1].norm() < 1e-13);
    CHECK((q.values[5] - h.values[5]).norm() < 1e-13);  // interior untouched

    // pinned diagonal part
    MatFn w(g);
    w.bc0.value = BcKind::OffDiagonalPlusFixedDiagonal;
    w.bc0.value_sz = -I * 0.7;
    w.bcL.value = BcKind::OffDiagonalPlusFixedDiagonal;
    w.bcL.value_sz = -I * 0.2;
    const MatFn r = project_bc(w);
    CHECK((r.values[0] - (-I * 0.7) * pauli_z()).norm() < 1e-13);
    CHECK((r.values[g->N - 1] - (-I * 0.2) * pauli_z()).norm() < 1e-13);
    CHECK(r.bc_violation() < 1e-13);

    // derivative tags repaired by endpoint adjustments only
    MatFn s(g);
    for (int i = 0; i < g->N; ++i)
        s.values[i] = sigma_assemble(Eigen::Vector3cd(0, 0, std::sin(3.0 * g->nodes(i))));
    s.bc0.deriv = BcKind::OffDiagonal;
    s.bcL.deriv = BcKind::OffDiagonal;
    const MatFn u = project_bc(s);
    CHECK(u.bc_violation() < 1e-10);
    for (int i = 1; i + 1 < g->N; ++i) CHECK((u.values[i] - s.values[i]).norm() == 0.0);
}

TEST_CASE("matfn interpolation reproduces analytic samples") {
    GridPtr g = make_grid(1.0, 48);
    MatFn f(g);
    for (int i = 0; i < g->N; ++i)
        f.values[i] = sigma_assemble(
            Eigen::Vector3cd(std::cos(2.0 * g->nodes(i)), 0.0, std::sin(3.0 * g->nodes(i))));
    for (double t : {0.123, 0.5, 0.987}) {
        const Mat2 v = f.interpolate(t);
        const Mat2 exact = sigma_assemble(Eigen::Vector3cd(std::cos(2.0 * t), 0.0, std::sin(3.0 * t)));
        CHECK((v - exact).norm() < 1e-12);
    }
}
