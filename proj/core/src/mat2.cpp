#include "d2alf/mat2.hpp"

#include <cmath>

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);
}

const Mat2& pauli_x() {
    static const Mat2 s = (Mat2() << 0, 1, 1, 0).finished();
    return s;
}
const Mat2& pauli_y() {
    static const Mat2 s = (Mat2() << 0, -I, I, 0).finished();
    return s;
}
const Mat2& pauli_z() {
    static const Mat2 s = (Mat2() << 1, 0, 0, -1).finished();
    return s;
}
const Mat2& mat2_id() {
    static const Mat2 s = Mat2::Identity();
    return s;
}

double mat2_norm(const Mat2& m) { return m.norm(); }

bool is_traceless(const Mat2& m, double tol) { return std::abs(m.trace()) <= tol; }

bool is_hermitian(const Mat2& m, double tol) { return (m - m.adjoint()).norm() <= tol; }

bool is_skew_hermitian(const Mat2& m, double tol) { return (m + m.adjoint()).norm() <= tol; }

bool is_su2(const Mat2& m, double tol) { return is_traceless(m, tol) && is_skew_hermitian(m, tol); }

bool is_sl2c(const Mat2& m, double tol) { return is_traceless(m, tol); }

bool is_diagonal(const Mat2& m, double tol) {
    return std::abs(m(0, 1)) <= tol && std::abs(m(1, 0)) <= tol;
}

bool is_offdiagonal(const Mat2& m, double tol) {
    return std::abs(m(0, 0)) <= tol && std::abs(m(1, 1)) <= tol;
}

Eigen::Vector3d pauli_expand(const Mat2& m, double tol) {
    if (!is_skew_hermitian(m, tol) || !is_traceless(m, tol))
        throw NotSkewHermitian("pauli_expand expects a traceless skew-Hermitian matrix");
    // m = -i(x sx + y sy + z sz)
    Eigen::Vector3d v;
    v(0) = ((I * (m(0, 1) + m(1, 0))) * 0.5).real();
    v(1) = ((m(1, 0) - m(0, 1)) * 0.5).real();
    v(2) = (I * m(0, 0)).real();
    return v;
}

Mat2 pauli_assemble(const Eigen::Vector3d& v) {
    return -I * (v(0) * pauli_x() + v(1) * pauli_y() + v(2) * pauli_z());
}

Eigen::Vector3cd sigma_components(const Mat2& m) {
    Eigen::Vector3cd c;
    c(0) = (m(0, 1) + m(1, 0)) * 0.5;
    c(1) = (m(1, 0) - m(0, 1)) * cplx(0.0, -0.5);
    c(2) = m(0, 0);
    return c;
}

Mat2 sigma_assemble(const Eigen::Vector3cd& c) {
    return c(0) * pauli_x() + c(1) * pauli_y() + c(2) * pauli_z();
}

Eigen::Vector3d hermitian_components(const Mat2& m, double tol) {
    if (!is_hermitian(m, tol) || !is_traceless(m, tol))
        throw Error("hermitian_components expects a traceless Hermitian matrix");
    return sigma_components(m).real();
}

HermEig herm_eig(const Mat2& h) {
    // Trace/determinant closed form; no iteration.  The small eigenvector
    // component is written as |b|^2 / (r + |p|) so nearly diagonal input
    // keeps full relative accuracy.
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const cplx b = h(0, 1);
    const double m = 0.5 * (a + d);
    const double p = 0.5 * (a - d);
    const double r = std::sqrt(p * p + std::norm(b));
    HermEig out;
    out.values << m - r, m + r;
    if (std::abs(b) <= 1e-300) {
        if (a <= d) {
            out.vectors = Mat2::Identity();
        } else {
            out.vectors << 0, 1, 1, 0;
        }
        return out;
    }
    const double q = r + std::abs(p);
    const double small = std::norm(b) / q;
    Vec2 vplus, vminus;
    if (p >= 0.0) {
        vplus << b, cplx(small, 0.0);
        vminus << b, cplx(-q, 0.0);
    } else {
        vplus << b, cplx(q, 0.0);
        vminus << b, cplx(-small, 0.0);
    }
    vplus.normalize();
    vminus.normalize();
    out.vectors.col(0) = vminus;
    out.vectors.col(1) = vplus;
    return out;
}

Mat2 herm_exp(const Mat2& h) {
    const HermEig e = herm_eig(h);
    Eigen::Vector2cd ev(std::exp(e.values(0)), std::exp(e.values(1)));
    return e.vectors * ev.asDiagonal() * e.vectors.adjoint();
}

Mat2 herm_log(const Mat2& g) {
    const HermEig e = herm_eig(g);
    if (e.values(0) <= 0.0)
        throw NotPositiveDefinite("herm_log eigenvalue <= 0");
    Eigen::Vector2cd ev(std::log(e.values(0)), std::log(e.values(1)));
    return e.vectors * ev.asDiagonal() * e.vectors.adjoint();
}

Mat2 herm_sqrt(const Mat2& g) {
    const HermEig e = herm_eig(g);
    if (e.values(0) < -1e-12 * std::max(1.0, std::abs(e.values(1))))
        throw NotPositiveDefinite("herm_sqrt eigenvalue < 0");
    Eigen::Vector2cd ev(std::sqrt(std::max(0.0, e.values(0))), std::sqrt(std::max(0.0, e.values(1))));
    return e.vectors * ev.asDiagonal() * e.vectors.adjoint();
}

Mat2 quasigroup_product(const Mat2& g1, const Mat2& g2) {
    if (!is_hermitian(g1, 1e-9) || !is_hermitian(g2, 1e-9))
        throw NotPositiveDefinite("quasigroup_product expects Hermitian factors");
    if (herm_eig(g1).values(0) <= 0.0 || herm_eig(g2).values(0) <= 0.0)
        throw NotPositiveDefinite("quasigroup_product expects positive-definite factors");
    const Mat2 m = g1 * g2 * g2 * g1;
    return herm_sqrt(0.5 * (m + m.adjoint()));
}

Mat2 exp_traceless(const Mat2& x) {
    // x traceless: x^2 = s^2 Id with s^2 = -det x, so
    // exp(x) = cosh(s) Id + sinh(s)/s x (even in s; series near 0).
    const cplx s2 = -x.determinant();
    const cplx s = std::sqrt(s2);
    cplx ch, shs;  // cosh(s), sinh(s)/s
    if (std::abs(s) < 1e-6) {
        ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
        shs = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
    } else {
        ch = std::cosh(s);
        shs = std::sinh(s) / s;
    }
    return ch * Mat2::Identity() + shs * x;
}

}  // namespace d2alf
