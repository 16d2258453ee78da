#pragma once

// The real moment map in the complex packaging, dimensional-reduction
// Weitzenbock identities, the Donaldson functional with its kernel Psi, and
// the Newton/line-search solve that produces a positive-definite complex
// gauge transformation g with mu_R(g(B)) = 0.

#include <vector>

#include "d2alf/nahm_data.hpp"
#include "d2alf/operators.hpp"

namespace d2alf {

// C^2-valued sections sampled on a grid.
struct SectionFn {
    GridPtr grid;
    std::vector<Vec2> values;

    explicit SectionFn(GridPtr g) : grid(std::move(g)) { values.assign(grid->N, Vec2::Zero()); }
    SectionFn deriv() const;
};

// mu_R = d(alpha + alpha^dag) + [alpha, alpha^dag] + [beta, beta^dag].
MatFn mu_real(const ComplexNahm& b);

double mu_real_norm(const ComplexNahm& b);  // L2 norm of mu_R

// Max residual of Delta0 = Dbar0 + mu_R/2 and Delta0 = Dtilde0 - mu_R/2 on
// the section s over interior nodes, relative to the field scale.
double weitzenbock_residual(const ComplexNahm& b, const SectionFn& s);

// Hermitian traceless field with gauge-algebra endpoint tags.
MatFn make_hermitian_field(GridPtr grid);

// Donaldson's functional M(h; B); M(0) = 0.
double donaldson_M(const MatFn& h, const ComplexNahm& b);

// Psi kernel applied in the eigenbasis of h: Psi(h)(x).
Mat2 psi_apply(const Mat2& h, const Mat2& x);

struct DuyOptions {
    double tol = 1e-9;
    int max_iter = 200;
    double armijo_c1 = 0.25;
    double backtrack = 0.5;
    bool record_history = true;
    const MatFn* h_init = nullptr;  // optional warm start for the Newton branch
};

struct DuyResult {
    MatFn g;            // positive-definite transform (working frame)
    MatFn h;            // log of g for the Newton branch
    RealNahm A;         // recovered real solution in the requested class
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> M_history;
    std::vector<double> residual_history;
    bool tikhonov_used = false;
    bool twisted = false;  // extended transform applied (polystable route)
    bool abelian = false;  // closed-form strictly polystable branch
};

// Pre: B polystable for (xiR0, xiRL).  Throws UnstableInput otherwise and
// NoConvergence (with history attached to the message) past max_iter.
DuyResult solve_duy(const ComplexNahm& b, double xiR0, double xiRL,
                    const DuyOptions& opts = DuyOptions());

// The fixed adapted frame change between the standard and unitary frames:
// phi(t) = w(t) s(t) with w = (L/2pi) sin(2 pi t / L) and s the linear
// interpolant of (xiR0, xiRL); the diagonal transform is exp(-phi sz).
struct FrameChange {
    Eigen::VectorXd phi;        // per node
    Eigen::VectorXd phi_deriv;  // analytic derivative per node
};
FrameChange adapted_frame_change(const Grid& grid, double xiR0, double xiRL);

// Apply the diagonal formal transform g = exp(phi sz):
// alpha -> g^-1 alpha g + phi' sz, beta -> g^-1 beta g.
ComplexNahm apply_formal_diag(const ComplexNahm& b, const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& phi_deriv);

// Standard frame -> unitary frame for the given xiR pair.
ComplexNahm to_unitary_frame(const ComplexNahm& b, double xiR0, double xiRL);

// Action of a positive Hermitian field e^h on complex data.
ComplexNahm exp_action(const MatFn& h, const ComplexNahm& b);

}  // namespace d2alf
