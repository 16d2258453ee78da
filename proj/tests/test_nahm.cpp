#include <doctest.h>

#include <cmath>
#include <random>

#include "d2alf/nahm_data.hpp"
#include "d2alf/operators.hpp"

using namespace d2alf;

namespace {
const cplx I(0, 1);
std::mt19937 rng(2024);
double un(double a = -1.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}
cplx cun(double s = 1.0) { return {un(-s, s), un(-s, s)}; }

GridPtr grid96() {
    static GridPtr g = make_grid(1.0, 96);
    return g;
}

MatFn random_smooth_su2(GridPtr g, bool vanish_diag_ends) {
    MatFn f(g);
    const double p1 = un(0, 3), p2 = un(0, 3), p3 = un(0, 3);
    for (int i = 0; i < g->N; ++i) {
        const double t = g->nodes(i);
        double z = std::sin(p3 + 2.0 * t);
        if (vanish_diag_ends) z *= (t / g->L) * (1.0 - t / g->L);
        f.values[i] = pauli_assemble(Eigen::Vector3d(std::sin(p1 + t), std::cos(p2 + 2.0 * t), z));
    }
    return f;
}

RealNahm random_real(GridPtr g, const Xi3& xi) {
    RealNahm A = RealNahm::make(g, xi);
    for (int mu = 0; mu < 4; ++mu) A.A[mu] = A.A[mu] + random_smooth_su2(g, true);
    A.retag();
    return A;
}

// Independent single-node oracle for the moment maps, written directly in
// Pauli components: mu^i = dA^i + 2 a0 x a_i + 2 a_j x a_k (cyclic).
Eigen::Vector3d moment_oracle_node(const RealNahm& A, int i, int node) {
    const Grid& g = *A.grid;
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    for (int j = 0; j < g.N; ++j) d += g.diff(node, j) * pauli_expand(A.A[i + 1].values[j]);
    const Eigen::Vector3d a0 = pauli_expand(A.A[0].values[node]);
    const Eigen::Vector3d ai = pauli_expand(A.A[i + 1].values[node]);
    const Eigen::Vector3d aj = pauli_expand(A.A[(i + 1) % 3 + 1].values[node]);
    const Eigen::Vector3d ak = pauli_expand(A.A[(i + 2) % 3 + 1].values[node]);
    return d + 2.0 * a0.cross(ai) + 2.0 * aj.cross(ak);
}

}  // namespace

TEST_CASE("moment maps vanish on commuting constants") {
    GridPtr g = grid96();
    Xi3 xi;
    xi.xi0 << 0.4, -0.3, 0.9;
    xi.xiL = xi.xi0;
    RealNahm A = RealNahm::make(g, xi);  // constants -i xi^i sz
    for (const auto& m : moment_maps(A)) CHECK(m.max_norm() < 1e-11);

    RealNahm B = RealNahm::make(g, Xi3{});
    for (int k = 0; k < g->N; ++k) B.A[0].values[k] = I * 0.8 * pauli_x();
    for (const auto& m : moment_maps(B)) CHECK(m.max_norm() < 1e-11);
}

TEST_CASE("moment maps agree with the component oracle at a node") {
    GridPtr g = grid96();
    Xi3 xi;
    xi.xi0 << un(), un(), un();
    xi.xiL << un(), un(), un();
    const RealNahm A = random_real(g, xi);
    const auto mu = moment_maps(A);
    for (int i = 0; i < 3; ++i)
        for (int node : {3, 41, 77}) {
            const Eigen::Vector3d oracle = moment_oracle_node(A, i, node);
            CHECK((pauli_expand(mu[i].values[node]) - oracle).norm() < 1e-12);
        }
}

TEST_CASE("complex moment map on constants and solution families") {
    GridPtr g = grid96();
    ComplexNahm b = ComplexNahm::make(g, 0.3, 0.3);
    for (int k = 0; k < g->N; ++k) {
        b.alpha.values[k] = Mat2::Zero();
        b.beta.values[k] = -I * 0.3 * pauli_z();
    }
    CHECK(mu_complex(b).max_norm() < 1e-11);

    FamilyParams p;
    p.alpha0 = cplx(0.5, 0.0);
    p.beta_x = 0.0;
    const ComplexNahm fam = complex_nahm_family(FamilyKind::I, p, 1.0, 2.0, 1.0, g);
    CHECK(mu_complex(fam).max_norm() < 1e-11);

    // gauge covariance of solutions
    GaugeTransform u;
    u.kind = GaugeKind::Unitary;
    u.g = MatFn(g);
    for (int k = 0; k < g->N; ++k) {
        const double t = g->nodes(k);
        const double s = (t / g->L) * (1.0 - t / g->L);
        u.g.values[k] = exp_traceless(pauli_assemble(
            Eigen::Vector3d(0.6 * s, -0.4 * s, 0.3 * std::pow(t / g->L, 2) * (3 - 2 * t / g->L))));
    }
    const ComplexNahm fam2 = gauge_act(u, fam);
    CHECK(mu_complex(fam2).max_norm() < 1e-10);
}

TEST_CASE("family (i) beta profile matches the stated closed form") {
    GridPtr g = grid96();
    const double L = 1.0;
    const cplx a0(0.5, 0.0);
    FamilyParams p;
    p.alpha0 = a0;
    p.beta_x = 0.0;
    const cplx x0 = 1.0, xL = 2.0;
    const ComplexNahm fam = complex_nahm_family(FamilyKind::I, p, x0, xL, L, g);
    for (int k : {0, 20, 95}) {
        const double t = g->nodes(k);
        const cplx csch = 1.0 / std::sinh(2.0 * a0 * L);
        const cplx by = (-x0 * std::cosh(2.0 * a0 * (L - t)) + xL * std::cosh(2.0 * a0 * t)) * csch;
        const cplx bz = -I * (x0 * std::sinh(2.0 * a0 * (L - t)) + xL * std::sinh(2.0 * a0 * t)) * csch;
        const Mat2 expect = by * pauli_y() + bz * pauli_z();
        CHECK((fam.beta.values[k] - expect).norm() < 1e-13);
    }
    CHECK(fam.beta.bc_violation() < 1e-13);
}

TEST_CASE("all seven families solve the complex equation and satisfy their tags") {
    GridPtr g = grid96();
    for (int kind = 1; kind <= 7; ++kind) {
        FamilyParams p;
        p.alpha0 = cplx(0.4, 0.8);
        p.beta_x = cun();
        p.c = cun();
        p.subcase = 3;
        cplx x0 = cun(), xL = cun();
        if (kind == 6) xL = x0;
        if (kind == 7) xL = -x0;
        const ComplexNahm b =
            complex_nahm_family(static_cast<FamilyKind>(kind), p, x0, xL, 1.0, g);
        CHECK(mu_complex(b).max_norm() < 1e-10);
        CHECK(b.alpha.bc_violation() < 1e-10);
        CHECK(b.beta.bc_violation() < 1e-10);
    }
    CHECK_THROWS_AS(
        complex_nahm_family(FamilyKind::VI, FamilyParams{}, cplx(1, 0), cplx(0.5, 0), 1.0, g),
        XiMismatch);
    FamilyParams bad;
    bad.alpha0 = cplx(0.0, 0.0);
    CHECK_THROWS_AS(complex_nahm_family(FamilyKind::I, bad, 1.0, 2.0, 1.0, g), InvalidParams);
}

TEST_CASE("gauge action examples and covariance") {
    GridPtr g = grid96();
    Xi3 xi;
    xi.xi0 << 0.5, -0.2, 0.3;
    xi.xiL << 1.5, 0.4, -0.6;
    const RealNahm A = random_real(g, xi);

    const RealNahm idA = gauge_act(GaugeTransform::identity(g), A);
    for (int mu = 0; mu < 4; ++mu)
        CHECK((idA.A[mu].values[50] - A.A[mu].values[50]).norm() < 1e-13);

    // g1 flips xi_L
    const RealNahm tw = gauge_act(GaugeTransform::extended_g1(g), A);
    CHECK((tw.xi.xiL + xi.xiL).norm() == 0.0);
    CHECK(tw.structure_violation() < 1e-10);

    // covariance mu(g(A)) = g^-1 mu(A) g on 100 random pairs
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        Xi3 x;
        x.xi0 << un(), un(), un();
        x.xiL << un(), un(), un();
        const RealNahm B = random_real(g, x);
        GaugeTransform u;
        u.kind = GaugeKind::Unitary;
        u.g = MatFn(g);
        const double q1 = un(0, 2), q2 = un(0, 2);
        for (int k = 0; k < g->N; ++k) {
            const double t = g->nodes(k);
            const double sshape = (t / g->L) * (1.0 - t / g->L);
            u.g.values[k] = exp_traceless(pauli_assemble(Eigen::Vector3d(
                q1 * sshape, q2 * sshape, 0.4 * std::pow(t / g->L, 2) * (3 - 2 * t / g->L))));
        }
        const auto mu1 = moment_maps(gauge_act(u, B));
        const auto mu0 = moment_maps(B);
        for (int i = 0; i < 3; ++i)
            for (int k : {7, 48, 90}) {
                const Mat2 expect =
                    u.g.values[k].inverse() * mu0[i].values[k] * u.g.values[k];
                worst = std::max(worst, (mu1[i].values[k] - expect).norm());
            }
    }
    CHECK(worst < 1e-9);

    // malformed gauge data is rejected
    GaugeTransform badg;
    badg.kind = GaugeKind::Unitary;
    badg.g = MatFn(g, exp_traceless(pauli_assemble({1.0, 0.0, 0.0})));  // off-diagonal at ends
    Xi3 x0;
    CHECK_THROWS_AS(gauge_act(badg, RealNahm::make(g, x0)), BoundaryViolation);
}

TEST_CASE("parallel transport: constants and dense integrator oracle") {
    GridPtr g = grid96();
    MatFn alpha(g);
    CHECK((parallel_transport(alpha) - Mat2::Identity()).norm() < 1e-12);

    const double c = 0.8;
    for (int k = 0; k < g->N; ++k) alpha.values[k] = I * c * pauli_x();
    const Mat2 pt = parallel_transport(alpha);
    const Mat2 expect = exp_traceless(-I * c * g->L * pauli_x());
    CHECK((pt - expect).norm() < 1e-11);

    // random smooth connection against a 1e5-step RK4 oracle
    MatFn a2(g);
    const double r1 = un(0, 2), r2 = un(0, 2);
    for (int k = 0; k < g->N; ++k) {
        const double t = g->nodes(k);
        a2.values[k] = sigma_assemble(Eigen::Vector3cd(
            cplx(std::sin(r1 + 2 * t), 0.3 * std::cos(t)), cplx(0.2, 0.5 * std::sin(r2 + t)),
            cplx(std::cos(3 * t), 0.0)));
    }
    const Mat2 pt2 = parallel_transport(a2);
    Mat2 fund = Mat2::Identity();
    const int M = 100000;
    const double h = g->L / M;
    auto alpha_at = [&](double t) { return a2.interpolate(t); };
    for (int s = 0; s < M; ++s) {
        const double t = s * h;
        const Mat2 k1 = -(alpha_at(t) * fund);
        const Mat2 k2 = -(alpha_at(t + h / 2) * (fund + h / 2 * k1));
        const Mat2 k3 = -(alpha_at(t + h / 2) * (fund + h / 2 * k2));
        const Mat2 k4 = -(alpha_at(t + h) * (fund + h * k3));
        fund += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK((pt2 - fund).norm() < 1e-10 * fund.norm());
    CHECK(std::abs(pt2.determinant() - 1.0) < 1e-11);
}

TEST_CASE("axial classification") {
    GridPtr g = grid96();
    const double L = 1.0;

    MatFn alpha(g);
    for (int k = 0; k < g->N; ++k) alpha.values[k] = I * 0.9 * pauli_x();
    const AxialClass c1 = axial_normal_form(alpha);
    CHECK(c1.kind == AxialKind::I);
    CHECK(std::abs(c1.alpha0 - cplx(0, 0.9)) < 1e-10);

    MatFn zero(g);
    const AxialClass c0 = axial_normal_form(zero);
    CHECK(c0.kind == AxialKind::I);
    CHECK(std::abs(c0.alpha0) < 1e-10);

    // compactly supported bump with upper-triangular transport
    MatFn bump(g);
    for (int k = 0; k < g->N; ++k) {
        const double s = g->nodes(k) / L;
        Mat2 m = Mat2::Zero();
        m(0, 1) = 30.0 * s * s * (1.0 - s) * (1.0 - s);
        bump.values[k] = m;
    }
    const AxialClass c2 = axial_normal_form(bump);
    CHECK(c2.kind == AxialKind::II);

    // lower-triangular version
    MatFn bump2(g);
    for (int k = 0; k < g->N; ++k) bump2.values[k] = bump.values[k].transpose();
    CHECK(axial_normal_form(bump2).kind == AxialKind::III);

    // class with both a and c recovered from the transport invariant
    MatFn mixed(g);
    const cplx a0(0.6, 0.8);
    for (int k = 0; k < g->N; ++k) mixed.values[k] = a0 * pauli_x();
    const AxialClass c3 = axial_normal_form(mixed);
    CHECK(c3.kind == AxialKind::I);
    CHECK(std::abs(c3.alpha0 - a0) < 1e-9);

    // extended-twisted classes via the family representatives
    FamilyParams p;
    p.c = 0.3;
    const ComplexNahm b4 = complex_nahm_family(FamilyKind::IV, p, 0.2, 0.1, L, g);
    CHECK(axial_normal_form(b4.alpha).kind == AxialKind::IV);
    const ComplexNahm b5 = complex_nahm_family(FamilyKind::V, p, 0.2, 0.1, L, g);
    CHECK(axial_normal_form(b5.alpha).kind == AxialKind::V);
}

TEST_CASE("sublines: existence, absence, and the shooting oracle") {
    GridPtr g = grid96();

    // family (i) away from the degenerate points has no rank-one subdata
    FamilyParams p;
    p.alpha0 = cplx(0.5, 0.4);
    p.beta_x = cun();
    const ComplexNahm b1 = complex_nahm_family(FamilyKind::I, p, 0.7, -0.3, 1.0, g);
    CHECK(find_sublines(b1).empty());

    // constant diagonal data has the two coordinate sublines
    ComplexNahm bd = ComplexNahm::make(g, 0.4, 0.4);
    for (int k = 0; k < g->N; ++k) bd.beta.values[k] = -I * 0.4 * pauli_z();
    const auto subs = find_sublines(bd);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].sign0 == +1);
    CHECK(subs[0].signL == +1);
    CHECK(subs[1].sign0 == -1);
    CHECK(subs[1].signL == -1);

    // family (ii) at equal complex parameters: exactly one subline (+,+),
    // cross-checked against an independent dense projective march
    FamilyParams p2;
    p2.c = cplx(0.2, -0.6);
    const ComplexNahm b2 = complex_nahm_family(FamilyKind::II, p2, 0.0, 0.0, 1.0, g);
    const auto subs2 = find_sublines(b2);
    REQUIRE(subs2.size() == 1);
    CHECK(subs2[0].sign0 == +1);
    CHECK(subs2[0].signL == +1);
    {
        Vec2 v(1.0, 0.0);
        const int M = 100000;
        const double h = 1.0 / M;
        for (int s = 0; s < M; ++s) {
            const double t = s * h;
            auto f = [&](double tt, const Vec2& u) -> Vec2 {
                return -(b2.alpha.interpolate(tt) * u);
            };
            const Vec2 k1 = f(t, v), k2 = f(t + h / 2, v + h / 2 * k1),
                       k3 = f(t + h / 2, v + h / 2 * k2), k4 = f(t + h, v + h * k3);
            v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            v.normalize();
        }
        CHECK(std::abs(v(1)) < 1e-7);  // lands on the e1 line
    }

    // mismatched complex parameters leave no sublines at all
    const ComplexNahm b3 =
        complex_nahm_family(FamilyKind::II, p2, cplx(0.5, 0.1), cplx(-0.2, 0.7), 1.0, g);
    CHECK(find_sublines(b3).empty());
}

TEST_CASE("degree bookkeeping and gauge invariance") {
    Subline pp;
    pp.sign0 = +1;
    pp.signL = +1;
    CHECK(degree(pp, 3.0, 5.0) == doctest::Approx(2.0));
    Subline pm;
    pm.sign0 = +1;
    pm.signL = -1;
    CHECK(degree(pm, 3.0, 5.0) == doctest::Approx(-8.0));

    GridPtr g = grid96();
    FamilyParams p2;
    p2.c = cplx(0.2, -0.6);
    const ComplexNahm b2 = complex_nahm_family(FamilyKind::II, p2, 0.3, 0.3, 1.0, g);
    GaugeTransform u;
    u.kind = GaugeKind::Complex;
    u.g = MatFn(g);
    for (int k = 0; k < g->N; ++k) {
        const double t = g->nodes(k), L = g->L;
        const double sshape = (t / L) * (1.0 - t / L);
        u.g.values[k] = exp_traceless(sigma_assemble(Eigen::Vector3cd(
            cplx(0.4, 0.2) * sshape, cplx(-0.3, 0.5) * sshape,
            cplx(0.2, -0.1) * std::pow(t / L, 2) * (3 - 2 * t / L))));
    }
    const ComplexNahm b2g = gauge_act(u, b2);
    const auto s1 = find_sublines(b2);
    const auto s2 = find_sublines(b2g);
    REQUIRE(s1.size() == 1);
    REQUIRE(s2.size() == 1);
    CHECK(degree(s1[0], 1.2, 0.4) == doctest::Approx(degree(s2[0], 1.2, 0.4)));
}

TEST_CASE("stability classification and its gauge invariance") {
    GridPtr g = grid96();

    FamilyParams p;
    p.alpha0 = cplx(0.5, 0.0);
    const ComplexNahm b1 = complex_nahm_family(FamilyKind::I, p, 0.3, -0.1, 1.0, g);
    CHECK(classify_stability(b1, un(), un()) == Stability::Stable);

    ComplexNahm bd = ComplexNahm::make(g, 0.4, 0.4);
    for (int k = 0; k < g->N; ++k) bd.beta.values[k] = -I * 0.4 * pauli_z();
    CHECK(classify_stability(bd, 0.8, 0.8) == Stability::StrictlyPolystable);

    FamilyParams p2;
    p2.c = cplx(0.2, -0.6);
    const ComplexNahm b2 = complex_nahm_family(FamilyKind::II, p2, 0.0, 0.0, 1.0, g);
    CHECK(classify_stability(b2, 1.0, 0.5) == Stability::Stable);
    CHECK(classify_stability(b2, 0.5, 1.0) == Stability::Unstable);
    CHECK(classify_stability(b2, 0.7, 0.7) == Stability::StrictlySemistableNonPoly);

    // the extended transform flips the parameter assignments consistently
    const ComplexNahm b2t = gauge_act(GaugeTransform::extended_g1(g), b2);
    CHECK(classify_stability(b2t, 1.0, -0.5) == Stability::Stable);
    CHECK(classify_stability(b2t, 0.5, -1.0) == Stability::Unstable);
}
