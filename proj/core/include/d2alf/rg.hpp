#pragma once

// The finite-dimensional reduction of constant-connection data: the RG map
// to constant off-diagonal pairs, the A1 model residual, S-equivalence
// collapse, the chamber-change map, and numerical periods of the Kahler
// forms over the exceptional spheres.

#include <string>
#include <vector>

#include "d2alf/duy.hpp"
#include "d2alf/moduli.hpp"

namespace d2alf {

struct KronheimerData {
    Mat2 alphaK = Mat2::Zero();  // off-diagonal
    Mat2 betaK = Mat2::Zero();   // off-diagonal
    double xiKR = 0.0;
    cplx xiKC = 0.0;
};

// Pre: alpha constant to tolerance; beta^K = proj(int beta dt) and
// xiK = xi_L - xi_0 on both levels.
KronheimerData rg_c(const ComplexNahm& b, double xiR0 = 0.0, double xiRL = 0.0,
                    double const_tol = 1e-9);

// | [alphaK, betaK] - i xiKC sz |
double kronheimer_residual(const KronheimerData& k);

// Stable input unchanged; strictly semistable input replaced by the
// block-diagonal associated graded in the subline-adapted gauge.  The
// extended twist applied for mixed endpoint signs is recorded.
struct CollapseResult {
    ComplexNahm data;
    bool collapsed = false;
    bool twisted = false;
};
CollapseResult s_equiv_collapse(const ComplexNahm& b, double xiR0, double xiRL);

// Pre: xiR_from weakly has the same sign as xiR_to and b polystable for
// xiR_from; the image representative is polystable for xiR_to.
ComplexNahm resolution_map(const ComplexNahm& b, double xiR0_from, double xiRL_from,
                           double xiR0_to, double xiRL_to);

bool weakly_same_sign(double x, double y);
bool weakly_same_sign_pair(double from0, double fromL, double to0, double toL);

enum class SphereSelect { Difference, Sum };

struct PeriodOptions {
    int refinements = 1;   // icosahedron subdivisions: 1 -> 80 triangles
    double fd_step = 1e-4;
    DuyOptions duy;
    int workers = 0;
};

struct PeriodReport {
    Xi3 xi;
    SphereSelect sphere = SphereSelect::Difference;
    // Periods of omega^1, omega^2, omega^3 and omega^C over the sphere.
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    cplx omegaC = 0.0;
    int triangles = 0;
    int failed_points = 0;
};

// Integrate the Kahler forms over the selected exceptional sphere by
// lifting a triangulated model sphere through the family charts, solving
// for the real representative at each point, and pairing Coulomb-projected
// finite-difference tangents with the forms.
PeriodReport sphere_period(const Xi3& xi, GridPtr grid, SphereSelect sphere,
                           const PeriodOptions& opts = PeriodOptions());

// Triangulated unit sphere (icosahedron refinement).
struct SphereMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> triangles;
};
SphereMesh icosphere(int refinements);

}  // namespace d2alf
