#pragma once

// Harmonic tangent spaces at real solutions: kernel dimensions of the
// deformation complexes by SVD rank counting, L2-orthonormal frames with the
// metric and Kahler-form matrices, and chart tables over the family-(i)
// parameter plane.

#include <optional>
#include <string>
#include <vector>

#include "d2alf/duy.hpp"
#include "d2alf/operators.hpp"

namespace d2alf {

struct KernelDims {
    int h0 = 0, h1sp = 0, h1gen = 0, h2sp = 0;
    double worst_gap = 0.0;  // smallest ratio across the four SVD cuts
};

// SVD cut: singular values below rel_cut * sigma_max count as kernel.
// Throws IllConditioned when the gap at a cut is below 10x the threshold.
KernelDims kernel_dims(const RealNahm& A, double rel_cut = 1e-8);

struct HarmonicFrame {
    RealNahm base;
    std::array<Quad, 4> basis;            // L2-orthonormal, in ker(d0* + d1)
    Eigen::Matrix4d G;                    // metric Gram matrix (identity)
    std::array<Eigen::Matrix4d, 3> Omega; // Kahler forms on the frame
    std::array<Eigen::Matrix4d, 3> J;     // G^{-1} Omega^i
    double kernel_residual = 0.0;         // max |d0* a| + |d1 a| over the frame
};

HarmonicFrame harmonic_frame(const RealNahm& A, double rel_cut = 1e-8);

struct ChartPoint {
    cplx alpha0, beta_x;
    bool converged = false;
    std::string error;
    double residual = 0.0;
    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    std::array<Eigen::Matrix4d, 3> Omega{};
};

struct ChartOptions {
    double xiR0 = 1.0, xiRL = 2.0;
    cplx xiC0 = 0.0, xiCL = 0.0;
    DuyOptions duy;
    int workers = 0;  // 0: hardware default
};

// Sample the moduli space over a family-(i) (alpha0, beta_x) grid; partial
// tables with per-point status are allowed.
std::vector<ChartPoint> metric_pullback_chart(const std::vector<cplx>& alpha0s,
                                              const std::vector<cplx>& betaxs, GridPtr grid,
                                              const ChartOptions& opts);

}  // namespace d2alf
