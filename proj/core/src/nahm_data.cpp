#include "d2alf/nahm_data.hpp"

#include <cmath>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);

BcTag offdiag_value_tag() {
    BcTag t;
    t.value = BcKind::OffDiagonal;
    return t;
}

BcTag pinned_diag_tag(cplx sz) {
    BcTag t;
    t.value = BcKind::OffDiagonalPlusFixedDiagonal;
    t.value_sz = sz;
    return t;
}
}  // namespace

RealNahm RealNahm::make(GridPtr grid, const Xi3& xi) {
    RealNahm a;
    a.grid = grid;
    a.xi = xi;
    for (auto& f : a.A) f = MatFn(grid);
    a.retag();
    for (int i = 0; i < 3; ++i) {
        // Linear interpolant of the pinned diagonal parts keeps the zero
        // field inside the class.
        for (int k = 0; k < grid->N; ++k) {
            const double s = grid->nodes(k) / grid->L;
            const double z = (1.0 - s) * xi.xi0(i) + s * xi.xiL(i);
            a.A[i + 1].values[k] = -I * z * pauli_z();
        }
    }
    return a;
}

void RealNahm::retag() {
    A[0].bc0 = offdiag_value_tag();
    A[0].bcL = offdiag_value_tag();
    for (int i = 0; i < 3; ++i) {
        A[i + 1].bc0 = pinned_diag_tag(-I * xi.xi0(i));
        A[i + 1].bcL = pinned_diag_tag(-I * xi.xiL(i));
    }
}

double RealNahm::structure_violation() const {
    double v = 0.0;
    for (const auto& f : A) {
        v = std::max(v, f.bc_violation());
        for (const auto& m : f.values)
            v = std::max(v, std::max(std::abs(m.trace()), (m + m.adjoint()).norm()));
    }
    return v;
}

ComplexNahm ComplexNahm::make(GridPtr grid, cplx xiC0, cplx xiCL) {
    ComplexNahm b;
    b.grid = grid;
    b.xiC0 = xiC0;
    b.xiCL = xiCL;
    b.alpha = MatFn(grid);
    b.beta = MatFn(grid);
    b.retag();
    return b;
}

void ComplexNahm::retag() {
    alpha.bc0 = offdiag_value_tag();
    alpha.bcL = offdiag_value_tag();
    beta.bc0 = pinned_diag_tag(-I * xiC0);
    beta.bcL = pinned_diag_tag(-I * xiCL);
}

ComplexNahm complexify(const RealNahm& a) {
    ComplexNahm b = ComplexNahm::make(a.grid, a.xi.xi0(1) + I * a.xi.xi0(2), a.xi.xiL(1) + I * a.xi.xiL(2));
    b.alpha = a.A[0] + a.A[1] * I;
    b.beta = a.A[2] + a.A[3] * I;
    b.retag();
    return b;
}

RealNahm realify(const ComplexNahm& b, const Xi3& xi) {
    RealNahm a = RealNahm::make(b.grid, xi);
    const MatFn alphad = b.alpha.adjoint();
    const MatFn betad = b.beta.adjoint();
    a.A[0] = (b.alpha - alphad) * 0.5;
    a.A[1] = (b.alpha + alphad) * (-0.5 * I);
    a.A[2] = (b.beta - betad) * 0.5;
    a.A[3] = (b.beta + betad) * (-0.5 * I);
    a.retag();
    return a;
}

GaugeTransform GaugeTransform::identity(GridPtr grid) {
    GaugeTransform g;
    g.g = MatFn(grid, Mat2::Identity());
    g.kind = GaugeKind::Unitary;
    return g;
}

GaugeTransform GaugeTransform::extended_g1(GridPtr grid) {
    GaugeTransform g;
    g.g = MatFn(grid);
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        g.g.values[k] = exp_traceless(I * (M_PI * t / (2.0 * grid->L)) * pauli_x());
    }
    g.kind = GaugeKind::Extended;
    g.flips_xiL = true;
    return g;
}

GaugeTransform GaugeTransform::extended_g2(GridPtr grid) {
    GaugeTransform g;
    g.g = MatFn(grid);
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        g.g.values[k] = exp_traceless(I * (M_PI * (grid->L - t) / (2.0 * grid->L)) * pauli_x());
    }
    g.kind = GaugeKind::Extended;
    g.flips_xi0 = true;
    return g;
}

GaugeTransform GaugeTransform::constant_diagonal(GridPtr grid, cplx u) {
    GaugeTransform g;
    g.g = MatFn(grid);
    Mat2 m;
    m << u, 0, 0, 1.0 / u;
    for (auto& v : g.g.values) v = m;
    g.kind = GaugeKind::Complex;
    return g;
}

double GaugeTransform::boundary_violation() const {
    const int n = g.grid->N - 1;
    const MatFn dg = g.deriv();
    double v = 0.0;
    auto diag_part_off = [](const Mat2& m) {  // size of off-diagonal entries
        return std::max(std::abs(m(0, 1)), std::abs(m(1, 0)));
    };
    auto offdiag_defect = [](const Mat2& m) {  // size of diagonal part
        return std::max(std::abs(m(0, 0)), std::abs(m(1, 1)));
    };
    for (int k : {0, n}) {
        const Mat2& gk = g.values[k];
        const Mat2 lg = gk.inverse() * dg.values[k];
        const bool flipped_end =
            kind == GaugeKind::Extended && ((k == 0 && flips_xi0) || (k == n && flips_xiL));
        if (flipped_end) {
            // Twisted endpoint: g is off-diagonal there, g^-1 dg still off-diagonal.
            v = std::max(v, offdiag_defect(gk));
            v = std::max(v, std::abs(0.5 * (lg(0, 0) - lg(1, 1))));
        } else {
            v = std::max(v, diag_part_off(gk));
            v = std::max(v, std::abs(0.5 * (lg(0, 0) - lg(1, 1))));
        }
        v = std::max(v, std::abs(gk.determinant() - 1.0));
    }
    return v;
}

std::array<MatFn, 3> moment_maps(const RealNahm& a) {
    std::array<MatFn, 3> mu;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        mu[i] = a.A[i + 1].deriv() + commutator(a.A[0], a.A[i + 1]) +
                commutator(a.A[j + 1], a.A[k + 1]);
    }
    return mu;
}

MatFn mu_complex(const ComplexNahm& b) {
    return b.beta.deriv() + commutator(b.alpha, b.beta);
}

namespace {

void check_gauge(const GaugeTransform& g, double tol = 1e-7) {
    if (g.boundary_violation() > tol)
        throw BoundaryViolation("gauge transform fails its endpoint conditions");
}

MatFn transform_connection(const MatFn& g, const MatFn& alpha) {
    const MatFn dg = g.deriv();
    MatFn out(alpha.grid);
    for (int k = 0; k < alpha.size(); ++k) {
        const Mat2 gi = g.values[k].inverse();
        out.values[k] = gi * alpha.values[k] * g.values[k] + gi * dg.values[k];
    }
    return out;
}

MatFn conjugate_field(const MatFn& g, const MatFn& f) {
    MatFn out(f.grid);
    for (int k = 0; k < f.size(); ++k)
        out.values[k] = g.values[k].inverse() * f.values[k] * g.values[k];
    return out;
}

}  // namespace

RealNahm gauge_act(const GaugeTransform& g, const RealNahm& a) {
    check_gauge(g);
    RealNahm out = a;
    out.A[0] = transform_connection(g.g, a.A[0]);
    for (int i = 1; i < 4; ++i) out.A[i] = conjugate_field(g.g, a.A[i]);
    if (g.flips_xi0) out.xi.xi0 = -out.xi.xi0;
    if (g.flips_xiL) out.xi.xiL = -out.xi.xiL;
    out.retag();
    return out;
}

ComplexNahm gauge_act(const GaugeTransform& g, const ComplexNahm& b) {
    check_gauge(g);
    ComplexNahm out = b;
    out.alpha = transform_connection(g.g, b.alpha);
    out.beta = conjugate_field(g.g, b.beta);
    if (g.flips_xi0) out.xiC0 = -out.xiC0;
    if (g.flips_xiL) out.xiCL = -out.xiCL;
    out.retag();
    return out;
}

Mat2 parallel_transport(const MatFn& alpha) {
    // Collocation solve of dv + alpha v = 0 with v(0) prescribed; the row at
    // node 0 carries the initial condition (tau method).
    const Grid& g = *alpha.grid;
    const int N = g.N;
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    for (int i = 1; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            K(2 * i, 2 * j) += g.diff(i, j);
            K(2 * i + 1, 2 * j + 1) += g.diff(i, j);
        }
        const Mat2& a = alpha.values[i];
        K(2 * i, 2 * i) += a(0, 0);
        K(2 * i, 2 * i + 1) += a(0, 1);
        K(2 * i + 1, 2 * i) += a(1, 0);
        K(2 * i + 1, 2 * i + 1) += a(1, 1);
    }
    K(0, 0) = 1.0;
    K(1, 1) = 1.0;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * N, 2);
    rhs(0, 0) = 1.0;
    rhs(1, 1) = 1.0;
    Eigen::MatrixXcd sol = K.partialPivLu().solve(rhs);
    Mat2 pt;
    pt(0, 0) = sol(2 * (N - 1), 0);
    pt(1, 0) = sol(2 * (N - 1) + 1, 0);
    pt(0, 1) = sol(2 * (N - 1), 1);
    pt(1, 1) = sol(2 * (N - 1) + 1, 1);
    return pt;
}

AxialClass axial_normal_form(const MatFn& alpha, double window) {
    AxialClass out;
    const Mat2 pt = parallel_transport(alpha);
    out.transport = pt;
    const cplx H = pt(0, 0) * pt(1, 1);
    out.invariant_H = H;
    const double L = alpha.grid->L;
    const double scale = std::max(1.0, pt.norm());
    const double offB = std::abs(pt(0, 1));
    const double offC = std::abs(pt(1, 0));
    if (std::abs(H - 1.0) <= window) {
        // Fiber over H = 1: trivial class or one of the two nilpotent types.
        const bool hasB = offB > window * scale;
        const bool hasC = offC > window * scale;
        if (hasB && hasC) throw Degenerate("transport sits between class boundaries at H=1");
        if (hasB) out.kind = AxialKind::II;
        else if (hasC) out.kind = AxialKind::III;
        else {
            out.kind = AxialKind::I;
            out.alpha0 = 0.0;
        }
        return out;
    }
    if (std::abs(H) <= window) {
        // Fiber over H = 0: the c = pi/2L axial point or the twisted types.
        const double dA = std::abs(pt(0, 0));
        const double dD = std::abs(pt(1, 1));
        const bool hasA = dA > window * scale;
        const bool hasD = dD > window * scale;
        if (hasA && hasD) throw Degenerate("transport sits between class boundaries at H=0");
        if (hasD) out.kind = AxialKind::IV;
        else if (hasA) out.kind = AxialKind::V;
        else {
            out.kind = AxialKind::I;
            out.alpha0 = cplx(0.0, M_PI / (2.0 * L));
        }
        return out;
    }
    out.kind = AxialKind::I;
    // cosh(2 a0 L) = 2H - 1 on the strip Im in [0, pi].
    cplx z = std::acosh(cplx(2.0) * H - cplx(1.0));
    if (z.imag() < 0.0) z = -z;
    cplx a0 = z / (2.0 * L);
    const double edge = 1e-10;
    if (a0.imag() < edge || a0.imag() > M_PI / (2.0 * L) - edge)
        a0 = cplx(std::abs(a0.real()), a0.imag());
    out.alpha0 = a0;
    return out;
}

namespace {

ComplexNahm family_i(const FamilyParams& p, cplx xiC0, cplx xiCL, double L, GridPtr grid) {
    const cplx a0 = p.alpha0;
    const double c = a0.imag();
    const double edge = 1e-12;
    if (c < -edge || c > M_PI / (2.0 * L) + edge)
        throw InvalidParams("family (i) needs Im(alpha0) in [0, pi/2L]");
    if ((std::abs(c) <= edge || std::abs(c - M_PI / (2.0 * L)) <= edge) && a0.real() <= 0.0)
        throw InvalidParams("family (i) needs Re(alpha0) > 0 at the strip edges");
    const cplx sh = std::sinh(2.0 * a0 * L);
    if (std::abs(sh) < 1e-12) throw InvalidParams("family (i) is singular at sinh(2 alpha0 L) = 0");
    ComplexNahm b = ComplexNahm::make(grid, xiC0, xiCL);
    const cplx csch = 1.0 / sh;
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        b.alpha.values[k] = a0 * pauli_x();
        const cplx by = (-xiC0 * std::cosh(2.0 * a0 * (L - t)) + xiCL * std::cosh(2.0 * a0 * t)) * csch;
        const cplx bz = -I * (xiC0 * std::sinh(2.0 * a0 * (L - t)) + xiCL * std::sinh(2.0 * a0 * t)) * csch;
        b.beta.values[k] = p.beta_x * pauli_x() + by * pauli_y() + bz * pauli_z();
    }
    return b;
}

ComplexNahm family_ii(const FamilyParams& p, cplx xiC0, cplx xiCL, double L, GridPtr grid) {
    ComplexNahm b = ComplexNahm::make(grid, xiC0, xiCL);
    Mat2 al;
    al << 0, 1.0 / L, 0, 0;
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        Mat2 be;
        be(0, 0) = xiC0 * (L - t) + xiCL * t;
        be(0, 1) = xiCL * (L + t * t / L) - xiC0 * (L - t) * (L - t) / L + p.c;
        be(1, 0) = (xiC0 - xiCL) * L;
        be(1, 1) = -be(0, 0);
        b.alpha.values[k] = al;
        b.beta.values[k] = (-I / L) * be;
    }
    return b;
}

ComplexNahm family_iii(const FamilyParams& p, cplx xiC0, cplx xiCL, double L, GridPtr grid) {
    ComplexNahm b = ComplexNahm::make(grid, xiC0, xiCL);
    Mat2 al;
    al << 0, 0, 1.0 / L, 0;
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        Mat2 be;
        be(0, 0) = xiC0 * (L - t) + xiCL * t;
        be(0, 1) = -(xiC0 - xiCL) * L;
        be(1, 0) = xiC0 * (L - t) * (L - t) / L - xiCL * (L + t * t / L) + p.c;
        be(1, 1) = -be(0, 0);
        b.alpha.values[k] = al;
        b.beta.values[k] = (-I / L) * be;
    }
    return b;
}

ComplexNahm family_vi(const FamilyParams& p, cplx xiC0, cplx xiCL, double L, GridPtr grid) {
    if (std::abs(xiC0 - xiCL) > 1e-12) throw XiMismatch("family (vi) needs xiC0 = xiCL");
    ComplexNahm b = ComplexNahm::make(grid, xiC0, xiCL);
    Mat2 be = Mat2::Zero();
    be(0, 0) = -I * xiC0;
    be(1, 1) = I * xiC0;
    switch (p.subcase) {
        case 1: break;
        case 2: be(0, 1) = 1.0 / L; break;
        case 3: be(0, 1) = p.c; be(1, 0) = 1.0 / L; break;
        default: throw InvalidParams("family (vi) subcase must be 1, 2 or 3");
    }
    for (int k = 0; k < grid->N; ++k) {
        b.alpha.values[k] = Mat2::Zero();
        b.beta.values[k] = be;
    }
    return b;
}

}  // namespace

ComplexNahm complex_nahm_family(FamilyKind kind, const FamilyParams& p, cplx xiC0, cplx xiCL,
                                double L, GridPtr grid) {
    switch (kind) {
        case FamilyKind::I: return family_i(p, xiC0, xiCL, L, grid);
        case FamilyKind::II: return family_ii(p, xiC0, xiCL, L, grid);
        case FamilyKind::III: return family_iii(p, xiC0, xiCL, L, grid);
        case FamilyKind::IV:
            return gauge_act(GaugeTransform::extended_g1(grid), family_ii(p, xiC0, -xiCL, L, grid));
        case FamilyKind::V:
            return gauge_act(GaugeTransform::extended_g1(grid), family_iii(p, xiC0, -xiCL, L, grid));
        case FamilyKind::VI: return family_vi(p, xiC0, xiCL, L, grid);
        case FamilyKind::VII: {
            if (std::abs(xiC0 + xiCL) > 1e-12) throw XiMismatch("family (vii) needs xiC0 = -xiCL");
            return gauge_act(GaugeTransform::extended_g1(grid), family_vi(p, xiC0, -xiCL, L, grid));
        }
    }
    throw InvalidParams("unknown family kind");
}

namespace {

// One RK4 step of dv = -alpha(t) v with barycentric evaluation of alpha.
Vec2 rk4_step(const MatFn& alpha, double t, double h, const Vec2& v) {
    auto rhs = [&](double s, const Vec2& u) -> Vec2 { return -(alpha.interpolate(s) * u); };
    const Vec2 k1 = rhs(t, v);
    const Vec2 k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
    const Vec2 k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
    const Vec2 k4 = rhs(t + h, v + h * k3);
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::optional<Subline> shoot_subline(const ComplexNahm& b, int seed_sign, double accept_tol) {
    const Grid& g = *b.grid;
    const int N = g.N;
    Subline sub;
    sub.sign0 = seed_sign;
    sub.v.resize(N);
    Vec2 v = (seed_sign > 0) ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
    sub.v[0] = v;
    const int total_steps = std::max(4096, 16 * N);
    for (int k = 0; k + 1 < N; ++k) {
        const double t0 = g.nodes(k), t1 = g.nodes(k + 1);
        const int m = std::max(2, (int)std::lround(total_steps * (t1 - t0) / g.L));
        const double h = (t1 - t0) / m;
        for (int s = 0; s < m; ++s) {
            v = rk4_step(b.alpha, t0 + s * h, h, v);
            v.normalize();  // projective renormalization avoids blow-up through l = inf
        }
        sub.v[k + 1] = v;
    }
    const Vec2& vL = sub.v[N - 1];
    const double to_e1 = std::abs(vL(1));
    const double to_e2 = std::abs(vL(0));
    sub.signL = (to_e1 <= to_e2) ? +1 : -1;
    sub.transport_defect = std::min(to_e1, to_e2);
    if (sub.transport_defect > accept_tol) return std::nullopt;
    double bscale = 1.0 + b.beta.max_norm();
    double defect = 0.0;
    for (int k = 0; k < N; ++k) {
        const Vec2 w = b.beta.values[k] * sub.v[k];
        defect = std::max(defect, std::abs(sub.v[k](0) * w(1) - sub.v[k](1) * w(0)));
    }
    sub.eigenline_defect = defect;
    if (defect > 1e-8 * bscale) return std::nullopt;
    return sub;
}

}  // namespace

std::vector<Subline> find_sublines(const ComplexNahm& b, double accept_tol) {
    std::vector<Subline> out;
    for (int seed : {+1, -1})
        if (auto s = shoot_subline(b, seed, accept_tol)) out.push_back(*s);
    return out;
}

double degree(const Subline& sub, double xiR0, double xiRL) {
    return sub.signL * xiRL - sub.sign0 * xiR0;
}

Stability classify_stability(const ComplexNahm& b, double xiR0, double xiRL) {
    const auto subs = find_sublines(b);
    const double ztol = 1e-12 * (1.0 + std::abs(xiR0) + std::abs(xiRL));
    bool any_zero = false;
    for (const auto& s : subs) {
        const double d = degree(s, xiR0, xiRL);
        if (d > ztol) return Stability::Unstable;
        if (std::abs(d) <= ztol) any_zero = true;
    }
    if (!any_zero) return Stability::Stable;
    return (subs.size() == 2) ? Stability::StrictlyPolystable : Stability::StrictlySemistableNonPoly;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::StrictlyPolystable: return "StrictlyPolystable";
        case Stability::StrictlySemistableNonPoly: return "StrictlySemistableNonPoly";
        case Stability::Unstable: return "Unstable";
    }
    return "?";
}

const char* to_string(AxialKind k) {
    switch (k) {
        case AxialKind::I: return "i";
        case AxialKind::II: return "ii";
        case AxialKind::III: return "iii";
        case AxialKind::IV: return "iv";
        case AxialKind::V: return "v";
    }
    return "?";
}

}  // namespace d2alf
