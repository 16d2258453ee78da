#pragma once

// Pre-Nahm data on [0, L]: real quadruples and complex pairs with their
// boundary tags, moment maps, gauge actions, parallel transport, axial
// normal forms, the explicit solution families of the complex equation,
// rank-one sublines, degree, and the stability classifier.

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "d2alf/grid.hpp"

namespace d2alf {

struct Xi3 {
    Eigen::Vector3d xi0 = Eigen::Vector3d::Zero();
    Eigen::Vector3d xiL = Eigen::Vector3d::Zero();
    bool generic() const { return (xi0 - xiL).norm() > 1e-12 && (xi0 + xiL).norm() > 1e-12; }
};

// A^0..A^3, su(2)-valued; endpoint diagonal parts of A^i pinned to -i xi^i sz
// (A^0 purely off-diagonal at the endpoints).
struct RealNahm {
    Quad A;
    Xi3 xi;
    GridPtr grid;

    double L() const { return grid->L; }
    static RealNahm make(GridPtr grid, const Xi3& xi);
    void retag();                // reapply the class tags to the MatFns
    double structure_violation() const;  // su(2)-ness + tag residuals
};

// In the standard frame: alpha off-diagonal at the endpoints, beta with
// diagonal parts pinned to -i xiC sz.
struct ComplexNahm {
    MatFn alpha, beta;
    cplx xiC0 = 0.0, xiCL = 0.0;
    GridPtr grid;

    double L() const { return grid->L; }
    static ComplexNahm make(GridPtr grid, cplx xiC0, cplx xiCL);
    void retag();
};

// Conversions (the standard complex packaging alpha = A0 + iA1, beta = A2 + iA3).
ComplexNahm complexify(const RealNahm& a);
RealNahm realify(const ComplexNahm& b, const Xi3& xi);

enum class GaugeKind { Unitary, Complex, Extended };

struct GaugeTransform {
    MatFn g;
    GaugeKind kind = GaugeKind::Unitary;
    // Extended twisting word (w0, wL): wL flips xi_L, w0 flips xi_0.
    bool flips_xiL = false;
    bool flips_xi0 = false;

    static GaugeTransform identity(GridPtr grid);
    // exp(pi i t sx / 2L): flips xi_L.
    static GaugeTransform extended_g1(GridPtr grid);
    // exp(pi i (L - t) sx / 2L): flips xi_0.
    static GaugeTransform extended_g2(GridPtr grid);
    // Constant diagonal complex transform diag(u, 1/u).
    static GaugeTransform constant_diagonal(GridPtr grid, cplx u);

    double boundary_violation() const;
};

// Moment maps mu^i = d_{A0} A^i + (1/2) eps^{ijk} [A^j, A^k].
std::array<MatFn, 3> moment_maps(const RealNahm& a);

// Complex moment map d_alpha beta = d beta + [alpha, beta].
MatFn mu_complex(const ComplexNahm& b);

RealNahm gauge_act(const GaugeTransform& g, const RealNahm& a);
ComplexNahm gauge_act(const GaugeTransform& g, const ComplexNahm& b);

// Solution at t = L of dg + alpha g = 0, g(0) = Id.
Mat2 parallel_transport(const MatFn& alpha);

enum class AxialKind { I, II, III, IV, V };

struct AxialClass {
    AxialKind kind = AxialKind::I;
    cplx alpha0 = 0.0;  // class (i) parameter a + ic, c in [0, pi/2L]
    cplx invariant_H = 0.0;
    Mat2 transport = Mat2::Identity();
};

// Classification of a connection by the double-coset invariant
// H(PT) = PT_11 PT_22 of its parallel transport.
AxialClass axial_normal_form(const MatFn& alpha, double window = 1e-8);

enum class FamilyKind { I = 1, II, III, IV, V, VI, VII };

struct FamilyParams {
    cplx alpha0 = 0.0;  // kind (i)
    cplx beta_x = 0.0;  // kind (i)
    cplx c = 0.0;       // kinds (ii)-(v) and the third subcase of (vi)/(vii)
    int subcase = 1;    // kinds (vi)/(vii): 1, 2 or 3
};

// Explicit solution families of the complex equation, sampled on `grid`.
ComplexNahm complex_nahm_family(FamilyKind kind, const FamilyParams& p, cplx xiC0, cplx xiCL,
                                double L, GridPtr grid);

struct Subline {
    // Homogeneous representative (v1, v2) per node, unit norm.
    std::vector<Vec2> v;
    int sign0 = +1;  // +1: C e1 at the endpoint, -1: C e2
    int signL = +1;
    double transport_defect = 0.0;   // chordal distance of l(L) from {0, inf}
    double eigenline_defect = 0.0;   // max-norm beta-eigenline residual
};

// All rank-one sublines (at most two), found by shooting the projectivized
// transport equation from l(0) in {0, inf} and checking the beta-eigenline
// condition at every node.
std::vector<Subline> find_sublines(const ComplexNahm& b, double accept_tol = 1e-7);

double degree(const Subline& sub, double xiR0, double xiRL);

enum class Stability { Stable, StrictlyPolystable, StrictlySemistableNonPoly, Unstable };

Stability classify_stability(const ComplexNahm& b, double xiR0, double xiRL);

const char* to_string(Stability s);
const char* to_string(AxialKind k);

}  // namespace d2alf
