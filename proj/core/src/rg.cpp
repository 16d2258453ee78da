#include "d2alf/rg.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "d2alf/errors.hpp"
#include "d2alf/parallel.hpp"

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);

Mat2 offdiag_proj(const Mat2& m) {
    Mat2 out = Mat2::Zero();
    out(0, 1) = m(0, 1);
    out(1, 0) = m(1, 0);
    return out;
}
}  // namespace

KronheimerData rg_c(const ComplexNahm& b, double xiR0, double xiRL, double const_tol) {
    const Mat2 a0 = b.alpha.values[0];
    double dev = 0.0;
    for (const auto& v : b.alpha.values) dev = std::max(dev, (v - a0).norm());
    if (dev > const_tol * (1.0 + a0.norm()))
        throw NonConstantAlpha("rg_c needs a constant connection component");
    KronheimerData k;
    k.alphaK = offdiag_proj(a0);
    Mat2 acc = Mat2::Zero();
    for (int i = 0; i < b.grid->N; ++i) acc += b.grid->weights(i) * b.beta.values[i];
    k.betaK = offdiag_proj(acc);
    k.xiKC = b.xiCL - b.xiC0;
    k.xiKR = xiRL - xiR0;
    return k;
}

double kronheimer_residual(const KronheimerData& k) {
    const Mat2 r = k.alphaK * k.betaK - k.betaK * k.alphaK - I * k.xiKC * pauli_z();
    return r.norm();
}

bool weakly_same_sign(double x, double y) {
    if (y > 0.0) return x > 0.0;
    if (y < 0.0) return x < 0.0;
    return true;
}

bool weakly_same_sign_pair(double from0, double fromL, double to0, double toL) {
    return weakly_same_sign(from0 + fromL, to0 + toL) && weakly_same_sign(from0 - fromL, to0 - toL);
}

CollapseResult s_equiv_collapse(const ComplexNahm& b, double xiR0, double xiRL) {
    const Stability st = classify_stability(b, xiR0, xiRL);
    if (st == Stability::Unstable) throw UnstableInput("cannot collapse unstable data");
    CollapseResult out{b, false, false};
    if (st != Stability::StrictlySemistableNonPoly) return out;

    ComplexNahm work = b;
    auto subs = find_sublines(work);
    if (subs.empty()) throw Error("semistable data lost its subline");
    if (subs[0].sign0 != subs[0].signL) {
        work = gauge_act(GaugeTransform::extended_g1(work.grid), work);
        out.twisted = true;
        subs = find_sublines(work);
        if (subs.empty() || subs[0].sign0 != subs[0].signL)
            throw Error("twisting did not align subline endpoint signs");
    }
    const Subline& sub = subs[0];
    const GridPtr grid = work.grid;
    MatFn g(grid);
    for (int k = 0; k < grid->N; ++k) {
        const Vec2& v = sub.v[k];
        Mat2 m;
        if (sub.sign0 > 0) {
            m.col(0) = v;
            m.col(1) = Vec2(-std::conj(v(1)), std::conj(v(0)));
        } else {
            m.col(0) = Vec2(std::conj(v(1)), -std::conj(v(0)));
            m.col(1) = v;
        }
        g.values[k] = m;
    }
    // Transform and cancel the diagonal part of g^-1 dg at the endpoints
    // with a diagonal complex correction, keeping the class tags.
    MatFn dg = g.deriv();
    ComplexNahm tri = work;
    for (int k = 0; k < grid->N; ++k) {
        const Mat2 gi = g.values[k].inverse();
        tri.alpha.values[k] = gi * work.alpha.values[k] * g.values[k] + gi * dg.values[k];
        tri.beta.values[k] = gi * work.beta.values[k] * g.values[k];
    }
    auto sz_coeff = [](const Mat2& m) { return 0.5 * (m(0, 0) - m(1, 1)); };
    const cplx w0 = sz_coeff(tri.alpha.values[0]);
    const cplx wL = sz_coeff(tri.alpha.values[grid->N - 1]);
    const double L = grid->L;
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        const double wt = (L / (2.0 * M_PI)) * std::sin(2.0 * M_PI * t / L);
        const double wp = std::cos(2.0 * M_PI * t / L);
        const cplx lin = -w0 + (w0 - wL) * t / L;
        const cplx linp = (w0 - wL) / L;
        const cplx psi = wt * lin;
        const cplx psip = wp * lin + wt * linp;
        Mat2 d, di;
        d << std::exp(psi), 0, 0, std::exp(-psi);
        di << std::exp(-psi), 0, 0, std::exp(psi);
        tri.alpha.values[k] = di * tri.alpha.values[k] * d + psip * pauli_z();
        tri.beta.values[k] = di * tri.beta.values[k] * d;
    }
    // Associated graded: drop the off-block entries.
    for (int k = 0; k < grid->N; ++k) {
        tri.alpha.values[k](0, 1) = tri.alpha.values[k](1, 0) = 0.0;
        tri.beta.values[k](0, 1) = tri.beta.values[k](1, 0) = 0.0;
    }
    tri.retag();
    out.data = tri;
    out.collapsed = true;
    return out;
}

ComplexNahm resolution_map(const ComplexNahm& b, double xiR0_from, double xiRL_from,
                           double xiR0_to, double xiRL_to) {
    if (!weakly_same_sign_pair(xiR0_from, xiRL_from, xiR0_to, xiRL_to))
        throw SignConditionViolated("source parameters must weakly share the target signs");
    const Stability from = classify_stability(b, xiR0_from, xiRL_from);
    if (from == Stability::Unstable || from == Stability::StrictlySemistableNonPoly)
        throw UnstableInput("resolution_map needs polystable input");
    const Stability to = classify_stability(b, xiR0_to, xiRL_to);
    if (to == Stability::Stable || to == Stability::StrictlyPolystable) return b;
    return s_equiv_collapse(b, xiR0_to, xiRL_to).data;
}

SphereMesh icosphere(int refinements) {
    SphereMesh m;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double a = 1.0, bb = 1.0 / phi;
    std::vector<Eigen::Vector3d> v = {
        {0, bb, -a}, {bb, a, 0},  {-bb, a, 0}, {0, bb, a},  {0, -bb, a},  {-a, 0, bb},
        {0, -bb, -a}, {a, 0, -bb}, {a, 0, bb},  {-a, 0, -bb}, {bb, -a, 0}, {-bb, -a, 0}};
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> f = {{2, 1, 0},  {1, 2, 3},  {5, 4, 3},  {4, 8, 3},
                                         {7, 6, 0},  {6, 9, 0},  {11, 10, 4}, {10, 11, 6},
                                         {9, 5, 2},  {5, 9, 11}, {8, 7, 1},  {7, 8, 10},
                                         {2, 5, 3},  {8, 1, 3},  {9, 2, 0},  {1, 7, 0},
                                         {11, 9, 6}, {7, 10, 6}, {5, 11, 4}, {10, 8, 4}};
    m.vertices = v;
    m.triangles = f;
    for (int r = 0; r < refinements; ++r) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int i, int j) {
            const auto key = std::minmax(i, j);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d p = (m.vertices[i] + m.vertices[j]).normalized();
            m.vertices.push_back(p);
            const int idx = static_cast<int>(m.vertices.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> nf;
        for (const auto& t : m.triangles) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            nf.push_back({t[0], ab, ca});
            nf.push_back({t[1], bc, ab});
            nf.push_back({t[2], ca, bc});
            nf.push_back({ab, bc, ca});
        }
        m.triangles = nf;
    }
    return m;
}

namespace {

// Chart section on the unit sphere: spinor with the phase singularity
// pushed to the opposite hemisphere.
Eigen::Vector2cd spinor_section(const Eigen::Vector3d& n, bool north) {
    const double theta = std::acos(std::clamp(n(2), -1.0, 1.0));
    const double phi = std::atan2(n(1), n(0));
    const cplx e(std::cos(phi), std::sin(phi));
    if (north) return {cplx(std::cos(theta / 2.0), 0.0), std::sin(theta / 2.0) * e};
    return {std::cos(theta / 2.0) * std::conj(e), cplx(std::sin(theta / 2.0), 0.0)};
}

// Explicit stable lift of the chart point (a, c) on |a|^2 + |c|^2 = d:
// alpha = [[0, a], [0, 0]], beta = [[-i xic, c/L + i a xic (L - 2t)], [0, i xic]].
ComplexNahm lift_chart_point(cplx a, cplx c, cplx xic, GridPtr grid) {
    ComplexNahm b = ComplexNahm::make(grid, xic, xic);
    const double L = grid->L;
    for (int k = 0; k < grid->N; ++k) {
        const double t = grid->nodes(k);
        Mat2 al = Mat2::Zero(), be = Mat2::Zero();
        al(0, 1) = a;
        be(0, 0) = -I * xic;
        be(1, 1) = I * xic;
        be(0, 1) = c / L + I * a * xic * (L - 2.0 * t);
        b.alpha.values[k] = al;
        b.beta.values[k] = be;
    }
    return b;
}

// Rotation of real data: (A^1,A^2,A^3) -> R (A^1,A^2,A^3), xi likewise.
RealNahm rotate_real(const Eigen::Matrix3d& R, const RealNahm& A) {
    RealNahm out = A;
    out.xi.xi0 = R * A.xi.xi0;
    out.xi.xiL = R * A.xi.xiL;
    for (int k = 0; k < A.grid->N; ++k)
        for (int i = 0; i < 3; ++i) {
            Mat2 acc = Mat2::Zero();
            for (int j = 0; j < 3; ++j) acc += R(i, j) * A.A[j + 1].values[k];
            out.A[i + 1].values[k] = acc;
        }
    out.retag();
    return out;
}

Eigen::Matrix3d rotation_to_e1(const Eigen::Vector3d& v) {
    const Eigen::Vector3d u = v.normalized();
    const Eigen::Vector3d e1(1, 0, 0);
    const Eigen::Vector3d axis = u.cross(e1);
    const double s = axis.norm(), cth = u.dot(e1);
    if (s < 1e-14) {
        if (cth > 0) return Eigen::Matrix3d::Identity();
        Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
        R(1, 1) = -1;
        R(0, 0) = -1;  // rotation by pi about e3
        return R;
    }
    const Eigen::Vector3d k = axis / s;
    Eigen::Matrix3d K;
    K << 0, -k(2), k(1), k(2), 0, -k(0), -k(1), k(0), 0;
    return Eigen::Matrix3d::Identity() + s * K + (1.0 - cth) * K * K;
}

}  // namespace

PeriodReport sphere_period(const Xi3& xi, GridPtr grid, SphereSelect sphere,
                           const PeriodOptions& opts) {
    PeriodReport rep;
    rep.xi = xi;
    rep.sphere = sphere;
    Xi3 work = xi;
    const bool twist = (sphere == SphereSelect::Sum);
    if (twist) work.xiL = -work.xiL;

    const Eigen::Vector3d delta = work.xi0 - work.xiL;
    if (delta.norm() < 1e-10) throw InvalidParams("sphere collapsed: xi_0 = xi_L");
    const Eigen::Matrix3d R = rotation_to_e1(delta);
    const Eigen::Matrix3d Rt = R.transpose();
    const Eigen::Vector3d x0r = R * work.xi0, xLr = R * work.xiL;
    const double d = x0r(0) - xLr(0);  // = |delta| > 0
    const cplx xic(x0r(1), x0r(2));
    if (std::abs(cplx(xLr(1), xLr(2)) - xic) > 1e-10)
        throw Error("rotated parameters lost alignment");

    const SphereMesh mesh = icosphere(opts.refinements);
    rep.triangles = static_cast<int>(mesh.triangles.size());
    const double sd = std::sqrt(d);
    const GaugeTransform g1 = GaugeTransform::extended_g1(grid);

    struct Solved {
        RealNahm A;
        MatFn h;
        bool ok = false;
        std::string err;
    };
    auto solve_at = [&](const Eigen::Vector3d& n, bool north, const MatFn* warm) {
        Solved s{RealNahm{}, MatFn(grid), false, ""};
        try {
            const Eigen::Vector2cd sp = spinor_section(n, north);
            const ComplexNahm b = lift_chart_point(sd * sp(0), sd * sp(1), xic, grid);
            DuyOptions dopts = opts.duy;
            dopts.h_init = warm;
            const DuyResult r = solve_duy(b, x0r(0), xLr(0), dopts);
            RealNahm A = rotate_real(Rt, r.A);
            if (twist) A = gauge_act(g1, A);
            s.A = A;
            s.h = r.h;
            s.ok = true;
        } catch (const std::exception& e) {
            s.err = e.what();
        }
        return s;
    };

    // Pass 1: vertex solves per needed (vertex, hemisphere-section) pair.
    std::map<std::pair<int, int>, int> vkey;
    std::vector<std::pair<int, bool>> vjobs;
    std::vector<bool> tri_north(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Eigen::Vector3d centroid =
            (mesh.vertices[tr[0]] + mesh.vertices[tr[1]] + mesh.vertices[tr[2]]) / 3.0;
        const bool north = centroid(2) >= 0.0;
        tri_north[t] = north;
        for (int corner : tr) {
            const auto key = std::make_pair(corner, north ? 1 : 0);
            if (!vkey.count(key)) {
                vkey[key] = static_cast<int>(vjobs.size());
                vjobs.emplace_back(corner, north);
            }
        }
    }
    std::vector<Solved> vsol(vjobs.size());
    parallel_for(static_cast<int>(vjobs.size()), [&](int i) {
        vsol[i] = solve_at(mesh.vertices[vjobs[i].first], vjobs[i].second, nullptr);
    }, opts.workers);

    // Pass 2: per-triangle finite-difference tangents and form evaluation.
    std::vector<Eigen::Vector3d> contrib(mesh.triangles.size(), Eigen::Vector3d::Zero());
    std::vector<cplx> contribC(mesh.triangles.size(), cplx(0.0));
    std::vector<int> failed(mesh.triangles.size(), 0);
    parallel_for(static_cast<int>(mesh.triangles.size()), [&](int t) {
        const auto& tr = mesh.triangles[t];
        const bool north = tri_north[t];
        const Solved& base = vsol[vkey.at({tr[0], north ? 1 : 0})];
        if (!base.ok) {
            failed[t] = 1;
            return;
        }
        try {
            const Eigen::Vector3d p0 = mesh.vertices[tr[0]];
            const Delta0Solve solver = make_delta0_solve(base.A);
            std::array<Quad, 2> tang;
            for (int k = 0; k < 2; ++k) {
                const Eigen::Vector3d pk = mesh.vertices[tr[k + 1]];
                const Eigen::Vector3d q = (p0 + opts.fd_step * (pk - p0)).normalized();
                const Solved fd = solve_at(q, north, &base.h);
                if (!fd.ok) throw Error(fd.err);
                Quad diff;
                for (int mu = 0; mu < 4; ++mu)
                    diff[mu] = (fd.A.A[mu] - base.A.A[mu]) * cplx(1.0 / opts.fd_step);
                tang[k] = coulomb_project(base.A, solver, diff);
            }
            for (int i = 0; i < 3; ++i) contrib[t](i) = 0.5 * omega_form(i + 1, tang[0], tang[1]);
            contribC[t] = 0.5 * omega_complex(tang[0], tang[1]);
        } catch (const std::exception&) {
            failed[t] = 1;
        }
    }, opts.workers);

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        rep.omega += contrib[t];
        rep.omegaC += contribC[t];
        rep.failed_points += failed[t];
    }
    if (rep.failed_points > rep.triangles / 10)
        throw NonConvergedPoints("too many sphere points failed to solve");
    return rep;
}

}  // namespace d2alf
