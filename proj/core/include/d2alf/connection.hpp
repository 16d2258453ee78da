#pragma once

// The canonical connection over generic parameter values: boundary
// harmonics, horizontal lifts of parameter variations, predictor-corrector
// transport along parameter paths, and the curvature commutator.

#include "d2alf/moduli.hpp"
#include "d2alf/operators.hpp"

namespace d2alf {

struct BoundaryHarmonics {
    MatFn h0, hL;       // Hermitian traceless solutions of Delta0 h = 0
    double residual0 = 0.0, residualL = 0.0;
};

// Throws Reducible when the constrained Laplacian is singular.
BoundaryHarmonics boundary_harmonics(const RealNahm& A);

// Hyperkahler-rotated infinitesimal gauge operator applied to a Hermitian
// field: dbar0^{(k)} h, k in {1,2,3}.
Quad dbar0_dir(int k, const RealNahm& A, const MatFn& h);

// d0 of a Hermitian field (components stay Hermitian).
Quad d0_hermitian(const RealNahm& A, const MatFn& h);

// Horizontal lift of the variation (dxi0, dxiL).
Quad horizontal_lift(const RealNahm& A, const Eigen::Vector3d& dxi0, const Eigen::Vector3d& dxiL);
Quad horizontal_lift(const RealNahm& A, const BoundaryHarmonics& bh, const Eigen::Vector3d& dxi0,
                     const Eigen::Vector3d& dxiL);

struct TransportOptions {
    int steps_per_unit = 64;
    int corrector_iters = 2;
    double wall_tube_rel = 1e-3;
    int min_steps = 4;
};

// Sampled parameter path; linear interpolation between samples.
struct XiPath {
    std::vector<double> s;   // increasing, s.front() = 0, s.back() = 1
    std::vector<Xi3> xi;
    Xi3 at(double u) const;
    double arclength() const;
};

// Predictor (horizontal lift step) + corrector (Newton re-solve of the
// moment maps in the Coulomb slice).  The endpoint class matches the path
// end exactly.
RealNahm parallel_transport_path(const RealNahm& A, const XiPath& path,
                                 const TransportOptions& opts = TransportOptions());

// Variation slot of the curvature commutator: component index i in {1,2,3}
// and endpoint selector (0 -> t=0, 1 -> t=L).
struct VariationSlot {
    int component = 2;
    int endpoint = 1;
};

// The commutator of the two infinitesimal variations, in Coulomb gauge at A.
Quad curvature_commutator(const RealNahm& A, const VariationSlot& a, const VariationSlot& b);

}  // namespace d2alf
