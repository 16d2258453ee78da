#include "d2alf/equivariant.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {
const cplx I(0.0, 1.0);

// Rounding hash of a 2x2 complex matrix at 1e-9 resolution.
std::string round_key(const Mat2& m) {
    std::ostringstream os;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            os << llround(m(r, c).real() * 1e9) << "," << llround(m(r, c).imag() * 1e9) << ";";
    return os.str();
}

Mat2 quat(double w, double x, double y, double z) {
    Mat2 m;
    m << cplx(w, x), cplx(y, z), cplx(-y, z), cplx(w, -x);
    return m;
}

std::vector<Mat2> generators(GroupType type, int n) {
    switch (type) {
        case GroupType::Cyclic: {
            if (n < 1) throw InvalidParams("cyclic group needs n >= 1");
            Mat2 g;
            g << std::exp(2.0 * M_PI * I / double(n)), 0, 0, std::exp(-2.0 * M_PI * I / double(n));
            return {g};
        }
        case GroupType::BinaryDihedral: {
            if (n < 2) throw InvalidParams("binary dihedral group needs n >= 2");
            Mat2 a;
            a << std::exp(M_PI * I / double(n)), 0, 0, std::exp(-M_PI * I / double(n));
            return {a, quat(0, 0, 1, 0)};
        }
        case GroupType::T2:
            return {quat(0, 1, 0, 0), quat(-0.5, 0.5, 0.5, 0.5)};
        case GroupType::O2:
            return {quat(-0.5, 0.5, 0.5, 0.5), quat(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0, 0)};
        case GroupType::I2: {
            const double p = (1.0 + std::sqrt(5.0)) / 2.0;
            return {quat(-0.5, 0.5, 0.5, 0.5), quat(0, 0.5, p / 2.0, 1.0 / (2.0 * p))};
        }
    }
    throw InvalidParams("unknown group type");
}

std::vector<Mat2> enumerate_closure(const std::vector<Mat2>& gens, int max_order = 512) {
    std::vector<Mat2> elems = {Mat2::Identity()};
    std::unordered_map<std::string, int> seen;
    seen[round_key(elems[0])] = 0;
    size_t frontier = 0;
    while (frontier < elems.size()) {
        const Mat2 cur = elems[frontier++];
        for (const auto& g : gens) {
            const Mat2 prod = cur * g;
            const std::string key = round_key(prod);
            if (!seen.count(key)) {
                seen[key] = static_cast<int>(elems.size());
                elems.push_back(prod);
                if (static_cast<int>(elems.size()) > max_order)
                    throw InvalidParams("group closure exceeded the order bound");
            }
        }
    }
    return elems;
}

// Burnside-Dixon: simultaneous eigenvectors of the class-sum multiplication
// matrices give the character columns.
void character_table(FiniteSubgroup& g) {
    const int order = g.order();
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < order; ++i) index[round_key(g.elements[i])] = i;
    auto find = [&](const Mat2& m) {
        auto it = index.find(round_key(m));
        if (it == index.end()) throw Error("group multiplication left the element table");
        return it->second;
    };

    // Conjugacy classes.
    g.cls.assign(order, -1);
    for (int i = 0; i < order; ++i) {
        if (g.cls[i] >= 0) continue;
        const int c = static_cast<int>(g.class_rep.size());
        g.class_rep.push_back(i);
        for (int k = 0; k < order; ++k) {
            const Mat2 conj = g.elements[k] * g.elements[i] * g.elements[k].inverse();
            g.cls[find(conj)] = c;
        }
    }
    const int nc = g.num_classes();
    g.class_size.assign(nc, 0);
    for (int i = 0; i < order; ++i) g.class_size[g.cls[i]]++;

    // Class multiplication coefficients c_{ijk}: K_i K_j = sum_k c_{ijk} K_k.
    std::vector<Eigen::MatrixXd> M(nc, Eigen::MatrixXd::Zero(nc, nc));
    std::vector<std::vector<int>> members(nc);
    for (int i = 0; i < order; ++i) members[g.cls[i]].push_back(i);
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j) {
            std::vector<int> counts(nc, 0);
            for (int x : members[i])
                for (int y : members[j]) counts[g.cls[find(g.elements[x] * g.elements[y])]]++;
            for (int k = 0; k < nc; ++k)
                M[i](k, j) = static_cast<double>(counts[k]) / g.class_size[k];
        }

    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> un(0.2, 1.0);
    for (int attempt = 0; attempt < 32; ++attempt) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nc, nc);
        for (int i = 0; i < nc; ++i) R += un(rng) * M[i];
        Eigen::EigenSolver<Eigen::MatrixXd> es(R);
        Eigen::MatrixXcd V = es.eigenvectors();
        // Normalize columns to v(identity class) = 1 and recover characters.
        Eigen::MatrixXcd chars(nc, nc);
        bool ok = true;
        const int id_class = g.cls[0];
        for (int c = 0; c < nc && ok; ++c) {
            Eigen::VectorXcd v = V.col(c);
            if (std::abs(v(id_class)) < 1e-10) { ok = false; break; }
            v /= v(id_class);
            double s = 0.0;
            for (int k = 0; k < nc; ++k) s += std::norm(v(k)) / g.class_size[k];
            const double dim = std::sqrt(order / s);
            for (int k = 0; k < nc; ++k) chars(c, k) = dim * v(k) / double(g.class_size[k]);
        }
        if (!ok) continue;
        // Sort rows by dimension then validate orthogonality.
        std::vector<int> perm(nc);
        for (int i = 0; i < nc; ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
            return chars(a, id_class).real() < chars(b, id_class).real();
        });
        Eigen::MatrixXcd sorted(nc, nc);
        for (int i = 0; i < nc; ++i) sorted.row(i) = chars.row(perm[i]);
        g.characters = sorted;
        g.irrep_dims.clear();
        long dimsq = 0;
        for (int i = 0; i < nc; ++i) {
            const double d = sorted(i, id_class).real();
            const int di = static_cast<int>(std::lround(d));
            if (std::abs(d - di) > 1e-6 || di < 1) { ok = false; break; }
            g.irrep_dims.push_back(di);
            dimsq += static_cast<long>(di) * di;
        }
        if (!ok || dimsq != order) continue;
        if (g.orthogonality_defect() < 1e-8) return;
    }
    throw Error("character table computation failed to converge");
}

}  // namespace

std::string FiniteSubgroup::name() const {
    switch (type) {
        case GroupType::Cyclic: return "Z" + std::to_string(n);
        case GroupType::BinaryDihedral: return "BD" + std::to_string(n);
        case GroupType::T2: return "2T";
        case GroupType::O2: return "2O";
        case GroupType::I2: return "2I";
    }
    return "?";
}

double FiniteSubgroup::orthogonality_defect() const {
    const int nc = num_classes();
    double worst = 0.0;
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) {
            cplx acc = 0.0;
            for (int r = 0; r < nc; ++r)
                acc += characters(r, a) * std::conj(characters(r, b));
            const double target = (a == b) ? static_cast<double>(order()) / class_size[a] : 0.0;
            worst = std::max(worst, std::abs(acc - target));
        }
    return worst;
}

int FiniteSubgroup::find(const Mat2& m) const {
    const std::string key = round_key(m);
    for (int i = 0; i < order(); ++i)
        if (round_key(elements[i]) == key) return i;
    return -1;
}

FiniteSubgroup make_group(GroupType type, int n) {
    FiniteSubgroup g;
    g.type = type;
    g.n = n;
    g.elements = enumerate_closure(generators(type, n));
    const int expected = [&] {
        switch (type) {
            case GroupType::Cyclic: return n;
            case GroupType::BinaryDihedral: return 4 * n;
            case GroupType::T2: return 24;
            case GroupType::O2: return 48;
            case GroupType::I2: return 120;
        }
        return 0;
    }();
    if (g.order() != expected) throw Error("unexpected group order for " + g.name());
    character_table(g);
    return g;
}

FiniteSubgroup make_group_from(const std::string& name) {
    if (name == "2T") return make_group(GroupType::T2);
    if (name == "2O") return make_group(GroupType::O2);
    if (name == "2I") return make_group(GroupType::I2);
    if (name.size() > 1 && name[0] == 'Z') return make_group(GroupType::Cyclic, std::stoi(name.substr(1)));
    if (name.size() > 2 && name.substr(0, 2) == "BD")
        return make_group(GroupType::BinaryDihedral, std::stoi(name.substr(2)));
    throw ConfigError("unknown group name " + name);
}

int fi_dimension(const FiniteSubgroup& g) { return g.num_irreps() - 1; }

int mckay_rank(const FiniteSubgroup& g) {
    switch (g.type) {
        case GroupType::Cyclic: return g.n - 1;
        case GroupType::BinaryDihedral: return g.n + 2;
        case GroupType::T2: return 6;
        case GroupType::O2: return 7;
        case GroupType::I2: return 8;
    }
    return 0;
}

namespace {

// Multiplicities of the subgroup irreps in the restriction of the regular
// representation of `big`, from the honest permutation character.
std::vector<int> restriction_multiplicities(const FiniteSubgroup& big, const FiniteSubgroup& sub) {
    std::vector<cplx> perm_char(sub.order());
    for (int i = 0; i < sub.order(); ++i) {
        const int gi = big.find(sub.elements[i]);
        if (gi < 0) throw InvalidParams("subgroup element missing from the ambient group");
        // fixed points of left multiplication on the ambient group
        int fixed = 0;
        for (int k = 0; k < big.order(); ++k)
            if (round_key(sub.elements[i] * big.elements[k]) == round_key(big.elements[k])) ++fixed;
        perm_char[i] = static_cast<double>(fixed);
    }
    std::vector<int> mult(sub.num_irreps());
    for (int r = 0; r < sub.num_irreps(); ++r) {
        cplx acc = 0.0;
        for (int i = 0; i < sub.order(); ++i)
            acc += perm_char[i] * std::conj(sub.characters(r, sub.cls[i]));
        const double m = acc.real() / sub.order();
        mult[r] = static_cast<int>(std::lround(m));
        if (std::abs(m - mult[r]) > 1e-6) throw Error("non-integral restriction multiplicity");
    }
    return mult;
}

}  // namespace

std::string WeylBlocks::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [d, count] : blocks) {
        (void)d;
        if (count <= 1) continue;  // trivial symmetric-group factors omitted
        if (!first) os << "x";
        os << "S" << count;
        first = false;
    }
    return first ? "S1" : os.str();
}

WeylBlocks weyl_group(const FiniteSubgroup& big, const FiniteSubgroup& sub) {
    const std::vector<int> mult = restriction_multiplicities(big, sub);
    WeylBlocks out;
    for (int m : mult)
        if (m > 0) out.blocks[m]++;
    return out;
}

bool frobenius_check(const FiniteSubgroup& big, const FiniteSubgroup& sub,
                     std::vector<int>* multiplicities) {
    const std::vector<int> mult = restriction_multiplicities(big, sub);
    if (multiplicities) *multiplicities = mult;
    return std::all_of(mult.begin(), mult.end(), [](int m) { return m > 0; });
}

PairingReport dft_pairing_rank(const Eigen::MatrixXi& gamma) {
    const int n = static_cast<int>(gamma.rows());
    Eigen::MatrixXi M = Eigen::MatrixXi::Identity(n, n) - gamma;
    const double det = M.cast<double>().determinant();
    const int m = static_cast<int>(std::lround(std::abs(det)));
    if (m == 0) throw NonIsolatedAction("det(gamma - 1) = 0: fixed locus is not isolated");
    if (m > 4096) throw InvalidParams("fixed-point group too large to enumerate");

    const Eigen::MatrixXd Minv = M.cast<double>().inverse();
    auto fixed_points = [&](const Eigen::MatrixXd& Mat) {
        std::vector<Eigen::VectorXd> pts;
        std::vector<int> idx(n, 0);
        const int total = static_cast<int>(std::pow(m, n));
        for (int count = 0; count < total; ++count) {
            int c = count;
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) {
                x(i) = static_cast<double>(c % m) / m;
                c /= m;
            }
            Eigen::VectorXd y = Mat * x;
            bool integral = true;
            for (int i = 0; i < n; ++i)
                if (std::abs(y(i) - std::round(y(i))) > 1e-9) integral = false;
            if (integral) pts.push_back(x);
        }
        return pts;
    };
    const auto tor = fixed_points(M.cast<double>());
    const auto dual = fixed_points(M.cast<double>().transpose());
    PairingReport rep;
    rep.group_order = static_cast<int>(tor.size());
    if (tor.size() != dual.size() || static_cast<int>(tor.size()) != m) return rep;

    Eigen::MatrixXcd P(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const double phase = 2.0 * M_PI * dual[a].dot(M.cast<double>() * tor[b]);
            P(a, b) = std::exp(I * phase);
        }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(P);
    lu.setThreshold(1e-8);
    rep.perfect = (lu.rank() == m);
    return rep;
}

SpectralReport flat_orbifold_spectrum(const EquivariantSpectralProblem& p) {
    SpectralReport rep;
    if (p.K < 8) throw InvalidParams("cutoff K must be at least 8");
    const double w0 = 2.0 * M_PI / p.circumference;
    const double tau_min = 0.1;
    int K = p.K;
    while (std::exp(-tau_min * (K * w0) * (K * w0)) >= 1e-14) ++K;
    rep.K_used = K;
    const int nm = 2 * K + 1;
    const int dim = 2 * nm;
    auto idx = [&](int k, int comp) { return 2 * (k + K) + comp; };

    // Diagonal operators in the mode basis.
    std::array<Eigen::MatrixXcd, 4> op;
    for (auto& o : op) o = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = -K; k <= K; ++k) {
        op[0](idx(k, 0), idx(k, 0)) = k * w0 + p.a;
        op[0](idx(k, 1), idx(k, 1)) = k * w0 - p.a;
        for (int i = 0; i < 3; ++i) {
            op[i + 1](idx(k, 0), idx(k, 0)) = p.phi(i);
            op[i + 1](idx(k, 1), idx(k, 1)) = -p.phi(i);
        }
    }
    double comm = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            comm = std::max(comm, (op[i] * op[j] - op[j] * op[i]).norm());
    rep.commutator_norm = comm;
    rep.commuting = comm < 1e-12 * (1.0 + K * w0 + std::abs(p.a));
    if (!rep.commuting) throw NonCommuting("spectral problem operators do not commute");

    // Joint eigenvalues via a random Hermitian combination.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> un(0.3, 1.0);
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < 4; ++i) R += un(rng) * op[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    rep.eigenvalues.resize(dim);
    for (int c = 0; c < dim; ++c) {
        const Eigen::VectorXcd v = es.eigenvectors().col(c);
        Eigen::Vector4d mu;
        for (int i = 0; i < 4; ++i) mu(i) = (v.adjoint() * op[i] * v)(0).real();
        rep.eigenvalues[c] = mu;
    }

    // In-window orbit check: both orbit branches up to |k| <= K - 2.
    std::vector<Eigen::Vector4d> predicted;
    for (int k = -(K - 2); k <= K - 2; ++k) {
        predicted.push_back(Eigen::Vector4d(k * w0 + p.a, p.phi(0), p.phi(1), p.phi(2)));
        predicted.push_back(Eigen::Vector4d(k * w0 - p.a, -p.phi(0), -p.phi(1), -p.phi(2)));
    }
    double defect = 0.0;
    std::vector<bool> used(rep.eigenvalues.size(), false);
    for (const auto& q : predicted) {
        double best = 1e300;
        int besti = -1;
        for (size_t i = 0; i < rep.eigenvalues.size(); ++i) {
            if (used[i]) continue;
            const double dist = (rep.eigenvalues[i] - q).norm();
            if (dist < best) {
                best = dist;
                besti = static_cast<int>(i);
            }
        }
        if (besti >= 0) used[besti] = true;
        defect = std::max(defect, best);
    }
    // Every computed eigenvalue safely inside the window must be claimed.
    const double window = (K - 1.5) * w0 - std::abs(p.a);
    for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
        if (!used[i] && std::abs(rep.eigenvalues[i](0)) < window) defect = std::max(defect, 1.0);
    rep.orbit_defect = defect;
    rep.orbit_match = defect < 1e-9 * (1.0 + K * w0);

    // Heat traces against the nontrivial symmetries: translations j(m) shift
    // modes, reflections j(m, gamma) map (k, c) to (m - k, 1 - c).
    Eigen::VectorXd diag(dim);
    for (int k = -K; k <= K; ++k) {
        diag(idx(k, 0)) = std::pow(k * w0 + p.a, 2) + p.phi.squaredNorm();
        diag(idx(k, 1)) = std::pow(k * w0 - p.a, 2) + p.phi.squaredNorm();
    }
    auto translation_matrix = [&](int m) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        for (int k = -K; k <= K; ++k) {
            if (k + m < -K || k + m > K) continue;
            J(idx(k + m, 0), idx(k, 0)) = 1.0;
            J(idx(k + m, 1), idx(k, 1)) = 1.0;
        }
        return J;
    };
    auto reflection_matrix = [&](int m) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        for (int k = -K; k <= K; ++k) {
            const int kk = m - k;
            if (kk < -K || kk > K) continue;
            J(idx(kk, 1), idx(k, 0)) = 1.0;
            J(idx(kk, 0), idx(k, 1)) = 1.0;
        }
        return J;
    };
    std::vector<Eigen::MatrixXd> symmetries;
    for (int m : {-2, -1, 1, 2}) symmetries.push_back(translation_matrix(m));
    for (int m : {-1, 0, 1, 2}) symmetries.push_back(reflection_matrix(m));
    double hmax = 0.0;
    for (double tau : {0.1, 0.3, 1.0}) {
        const Eigen::VectorXd heat = (-tau * diag.array()).exp();
        for (const auto& J : symmetries) {
            double tr = 0.0;
            for (int i = 0; i < dim; ++i) tr += heat(i) * J(i, i);
            hmax = std::max(hmax, std::abs(tr));
        }
    }
    rep.heat_trace_max = hmax;

    // Character of the stabilizing reflection on degenerate in-window
    // eigenspaces when the parameters sit at a reflection-fixed point.
    double fcmax = 0.0;
    const bool fixed_pt = p.phi.norm() < 1e-12 &&
                          std::abs(p.a / (0.5 * w0) - std::round(p.a / (0.5 * w0))) < 1e-12;
    if (fixed_pt) {
        const int m_stab = static_cast<int>(std::lround(2.0 * p.a / w0));
        const Eigen::MatrixXd J = reflection_matrix(m_stab);
        const double window = (K - 1.5) * w0 - std::abs(p.a);
        std::vector<bool> grouped(dim, false);
        for (int i = 0; i < dim; ++i) {
            if (grouped[i] || std::abs(rep.eigenvalues[i](0)) > window) continue;
            cplx tr = 0.0;
            for (int j = 0; j < dim; ++j) {
                if ((rep.eigenvalues[j] - rep.eigenvalues[i]).norm() > 1e-8 * (1.0 + K * w0))
                    continue;
                grouped[j] = true;
                const Eigen::VectorXcd v = es.eigenvectors().col(j);
                tr += (v.adjoint() * (J * v))(0);
            }
            fcmax = std::max(fcmax, std::abs(tr));
        }
    }
    rep.fixed_character_max = fcmax;
    return rep;
}

}  // namespace d2alf
