#pragma once

// Finite subgroups of SU(2) with numerically computed character tables,
// parameter-space dimensions, Weyl block structure, the discrete perfect
// pairing on fixed-point groups, and the rank-one flat-orbifold spectral
// verifier.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "d2alf/mat2.hpp"

namespace d2alf {

enum class GroupType { Cyclic, BinaryDihedral, T2, O2, I2 };

struct FiniteSubgroup {
    GroupType type;
    int n = 0;  // cyclic/binary-dihedral parameter
    std::vector<Mat2> elements;          // element 0 is the identity
    std::vector<int> cls;                // conjugacy class index per element
    std::vector<int> class_rep;          // representative element per class
    std::vector<int> class_size;
    Eigen::MatrixXcd characters;         // irreps x classes
    std::vector<int> irrep_dims;

    int order() const { return static_cast<int>(elements.size()); }
    int num_classes() const { return static_cast<int>(class_rep.size()); }
    int num_irreps() const { return static_cast<int>(irrep_dims.size()); }
    std::string name() const;

    // Max violation of the character column-orthogonality relations.
    double orthogonality_defect() const;

    // Index of the element equal to m (within rounding), -1 when absent.
    int find(const Mat2& m) const;
};

FiniteSubgroup make_group(GroupType type, int n = 0);
FiniteSubgroup make_group_from(const std::string& name);  // "Z4", "BD3", "2T", "2O", "2I"

// Number of irreducible representations minus one.
int fi_dimension(const FiniteSubgroup& g);

// Cartan rank of the McKay partner (A_{n-1}, D_{n+2}, E6, E7, E8).
int mckay_rank(const FiniteSubgroup& g);

// Restriction of the regular representation of `big` to the subgroup
// spanned by `sub_elements` (which must close inside `big`): for each
// multiplicity d, the number of subgroup irreps occurring d times.
struct WeylBlocks {
    std::map<int, int> blocks;  // multiplicity -> count of irreps
    std::string to_string() const;  // e.g. "S3xS3"
};
WeylBlocks weyl_group(const FiniteSubgroup& big, const FiniteSubgroup& sub);

// True iff every subgroup irrep has positive multiplicity in Res R_big.
bool frobenius_check(const FiniteSubgroup& big, const FiniteSubgroup& sub,
                     std::vector<int>* multiplicities = nullptr);

// Discrete pairing mu((1-gamma) p) on the gamma-fixed subgroups of the dual
// pair of tori for an integer lattice automorphism gamma.  Throws
// NonIsolatedAction when det(gamma - 1) = 0.
struct PairingReport {
    bool perfect = false;
    int group_order = 0;
};
PairingReport dft_pairing_rank(const Eigen::MatrixXi& gamma);

// Spectral verifier for the rank-one orbifold (circle modulo reflection).
struct EquivariantSpectralProblem {
    int K = 64;                 // Fourier cutoff (auto-raised for heat traces)
    double a = 0.3;             // constant diagonal connection coefficient
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();  // sigma_z coefficients
    double circumference = 2.0 * M_PI;
};

struct SpectralReport {
    std::vector<Eigen::Vector4d> eigenvalues;  // joint eigenvalues in R^4
    bool commuting = false;
    double commutator_norm = 0.0;
    bool orbit_match = false;       // in-window multiset is a full orbit
    double orbit_defect = 0.0;
    double heat_trace_max = 0.0;    // max |Tr e^{-tau Delta} j(gamma)| over samples
    double fixed_character_max = 0.0;  // per-eigenspace character of the stabilizer
    int K_used = 0;
};

SpectralReport flat_orbifold_spectrum(const EquivariantSpectralProblem& p);

}  // namespace d2alf
