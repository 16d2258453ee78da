#include "d2alf/grid.hpp"

#include <cmath>

#include "d2alf/errors.hpp"

namespace d2alf {

namespace {

// Clenshaw-Curtis weights on [-1,1] for n+1 Lobatto points, descending order.
Eigen::VectorXd clencurt_weights(int n) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    if (n == 0) {
        w(0) = 2.0;
        return w;
    }
    const double endw = (n % 2 == 0) ? 1.0 / (n * n - 1.0) : 1.0 / (n * n);
    w(0) = endw;
    w(n) = endw;
    for (int i = 1; i < n; ++i) {
        const double theta = M_PI * i / n;
        double v = 1.0;
        if (n % 2 == 0) {
            for (int k = 1; k <= n / 2 - 1; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
            v -= std::cos(n * theta) / (n * n - 1.0);
        } else {
            for (int k = 1; k <= (n - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        }
        w(i) = 2.0 * v / n;
    }
    return w;
}

}  // namespace

double Grid::interpolate(const Eigen::VectorXd& samples, double t) const {
    // Barycentric formula; exact hit on a node returns the sample.
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
        const double d = t - nodes(j);
        if (std::abs(d) < 1e-14 * std::max(1.0, L)) return samples(j);
        const double c = bary(j) / d;
        num += c * samples(j);
        den += c;
    }
    return num / den;
}

cplx Grid::interpolate(const Eigen::VectorXcd& samples, double t) const {
    cplx num = 0.0;
    double den = 0.0;
    for (int j = 0; j < N; ++j) {
        const double d = t - nodes(j);
        if (std::abs(d) < 1e-14 * std::max(1.0, L)) return samples(j);
        const double c = bary(j) / d;
        num += c * samples(j);
        den += c;
    }
    return num / den;
}

GridPtr make_grid(double L, int N) {
    if (L <= 0.0 || N < 8) throw InvalidSize("make_grid needs L > 0 and N >= 8");
    auto g = std::make_shared<Grid>();
    g->L = L;
    g->N = N;
    const int n = N - 1;
    g->nodes.resize(N);
    g->bary.resize(N);
    for (int j = 0; j < N; ++j) {
        // Ascending map of cos(j pi / n): nodes(0) = 0, nodes(n) = L.
        g->nodes(j) = 0.5 * L * (1.0 - std::cos(M_PI * j / n));
        double b = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n) b *= 0.5;
        g->bary(j) = b;
    }
    g->diff.resize(N, N);
    for (int i = 0; i < N; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double dij = (g->bary(j) / g->bary(i)) / (g->nodes(i) - g->nodes(j));
            g->diff(i, j) = dij;
            rowsum += dij;
        }
        g->diff(i, i) = -rowsum;  // negative-sum trick: exact on constants
    }
    Eigen::VectorXd w = clencurt_weights(n);
    g->weights.resize(N);
    for (int j = 0; j < N; ++j) g->weights(j) = 0.5 * L * w(n - j);  // reversed to ascending nodes

    // Antiderivative through the Chebyshev coefficient recurrence: values ->
    // coefficients (angle (n-j) pi / n at ascending node j), integrate
    // term-by-term, pin the value at t = 0, transform back.
    Eigen::MatrixXd V(N, N), C(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) V(j, k) = std::cos(M_PI * k * (n - j) / double(n));
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j) {
            const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            const double wk = (k == 0 || k == n) ? 1.0 : 2.0;
            C(k, j) = wk * wj * std::cos(M_PI * k * (n - j) / double(n)) / n;
        }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);  // coefficient antiderivative on [-1,1]
    for (int m = 1; m < N; ++m) {
        const double prev = (m == 1) ? 2.0 : 1.0;  // c_0 enters doubled
        J(m, m - 1) += prev / (2.0 * m);
        if (m + 1 < N) J(m, m + 1) -= 1.0 / (2.0 * m);
    }
    // fix the constant so the antiderivative vanishes at x = -1 (t = 0)
    for (int col = 0; col < N; ++col) {
        double at_minus1 = 0.0;
        for (int m = 1; m < N; ++m) at_minus1 += J(m, col) * ((m % 2 == 0) ? 1.0 : -1.0);
        J(0, col) = -at_minus1;
    }
    g->integ = (0.5 * L) * V * J * C;
    return g;
}

MatFn::MatFn(GridPtr g, const Mat2& constant) : grid(std::move(g)) {
    values.assign(grid->N, constant);
}

MatFn MatFn::deriv() const {
    MatFn out(grid);
    const auto& D = grid->diff;
    for (int i = 0; i < grid->N; ++i) {
        Mat2 acc = Mat2::Zero();
        for (int j = 0; j < grid->N; ++j) acc += D(i, j) * values[j];
        out.values[i] = acc;
    }
    return out;
}

MatFn MatFn::operator+(const MatFn& other) const {
    check_same_grid(*this, other);
    MatFn out(grid);
    for (int i = 0; i < size(); ++i) out.values[i] = values[i] + other.values[i];
    out.bc0 = bc0;
    out.bcL = bcL;
    return out;
}

MatFn MatFn::operator-(const MatFn& other) const {
    check_same_grid(*this, other);
    MatFn out(grid);
    for (int i = 0; i < size(); ++i) out.values[i] = values[i] - other.values[i];
    out.bc0 = bc0;
    out.bcL = bcL;
    return out;
}

MatFn MatFn::operator*(const MatFn& other) const {
    check_same_grid(*this, other);
    MatFn out(grid);
    for (int i = 0; i < size(); ++i) out.values[i] = values[i] * other.values[i];
    return out;
}

MatFn MatFn::operator*(cplx scalar) const {
    MatFn out(grid);
    for (int i = 0; i < size(); ++i) out.values[i] = scalar * values[i];
    out.bc0 = bc0;
    out.bcL = bcL;
    return out;
}

MatFn MatFn::adjoint() const {
    MatFn out(grid);
    for (int i = 0; i < size(); ++i) out.values[i] = values[i].adjoint();
    return out;
}

double MatFn::max_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.norm());
    return m;
}

Mat2 MatFn::interpolate(double t) const {
    Mat2 out;
    Eigen::VectorXcd s(size());
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            for (int i = 0; i < size(); ++i) s(i) = values[i](r, c);
            out(r, c) = grid->interpolate(s, t);
        }
    return out;
}

MatFn commutator(const MatFn& a, const MatFn& b) {
    check_same_grid(a, b);
    MatFn out(a.grid);
    for (int i = 0; i < a.size(); ++i)
        out.values[i] = a.values[i] * b.values[i] - b.values[i] * a.values[i];
    return out;
}

void check_same_grid(const MatFn& a, const MatFn& b) {
    if (a.grid != b.grid && (a.grid->N != b.grid->N || a.grid->L != b.grid->L))
        throw GridMismatch("MatFn operands live on different grids");
}

double l2_inner(const Quad& a, const Quad& b) {
    const auto& g = *a[0].grid;
    double acc = 0.0;
    for (int i = 0; i < g.N; ++i) {
        cplx tr = 0.0;
        for (int mu = 0; mu < 4; ++mu) tr += (a[mu].values[i] * b[mu].values[i]).trace();
        acc += g.weights(i) * tr.real();
    }
    return -acc / (2.0 * g.L);
}

cplx l2_inner_field(const MatFn& a, const MatFn& b) {
    check_same_grid(a, b);
    const auto& g = *a.grid;
    cplx acc = 0.0;
    for (int i = 0; i < g.N; ++i)
        acc += g.weights(i) * (a.values[i] * b.values[i].adjoint()).trace();
    return acc;
}

namespace {

struct ChannelConstraint {
    bool value0 = false, valueL = false, deriv0 = false, derivL = false;
    cplx v0 = 0.0, vL = 0.0, d0 = 0.0, dL = 0.0;
};

// Adjust samples at nodes 0 and N-1 of one scalar channel so the active
// constraints hold, in the least-squares sense.
void apply_channel(Eigen::VectorXcd& ch, const Grid& g, const ChannelConstraint& c) {
    int rows = (c.value0 ? 1 : 0) + (c.valueL ? 1 : 0) + (c.deriv0 ? 1 : 0) + (c.derivL ? 1 : 0);
    if (rows == 0) return;
    const int n = g.N - 1;
    Eigen::MatrixXcd A(rows, 2);
    Eigen::VectorXcd r(rows);
    int k = 0;
    auto deriv_at = [&](int row) {
        cplx acc = 0.0;
        for (int j = 0; j < g.N; ++j) acc += g.diff(row, j) * ch(j);
        return acc;
    };
    if (c.value0) { A.row(k) << 1, 0; r(k) = c.v0 - ch(0); ++k; }
    if (c.valueL) { A.row(k) << 0, 1; r(k) = c.vL - ch(n); ++k; }
    if (c.deriv0) { A.row(k) << g.diff(0, 0), g.diff(0, n); r(k) = c.d0 - deriv_at(0); ++k; }
    if (c.derivL) { A.row(k) << g.diff(n, 0), g.diff(n, n); r(k) = c.dL - deriv_at(n); ++k; }
    Eigen::Vector2cd delta = A.colPivHouseholderQr().solve(r);
    ch(0) += delta(0);
    ch(n) += delta(1);
}

}  // namespace

MatFn project_bc(const MatFn& f) {
    MatFn out = f;
    const Grid& g = *f.grid;
    const int n = g.N - 1;
    // Channels: off-diagonal entries (0,1), (1,0) and the sigma_z diagonal coefficient.
    Eigen::VectorXcd c01(g.N), c10(g.N), cz(g.N);
    for (int i = 0; i < g.N; ++i) {
        c01(i) = out.values[i](0, 1);
        c10(i) = out.values[i](1, 0);
        cz(i) = 0.5 * (out.values[i](0, 0) - out.values[i](1, 1));
    }
    ChannelConstraint k01, k10, kz;
    auto add = [&](const BcTag& tag, bool at0) {
        auto set_value = [&](ChannelConstraint& c, cplx target) {
            if (at0) { c.value0 = true; c.v0 = target; }
            else     { c.valueL = true; c.vL = target; }
        };
        auto set_deriv = [&](ChannelConstraint& c, cplx target) {
            if (at0) { c.deriv0 = true; c.d0 = target; }
            else     { c.derivL = true; c.dL = target; }
        };
        switch (tag.value) {
            case BcKind::Free: break;
            case BcKind::Diagonal: set_value(k01, 0.0); set_value(k10, 0.0); break;
            case BcKind::OffDiagonal: set_value(kz, 0.0); break;
            case BcKind::OffDiagonalPlusFixedDiagonal: set_value(kz, tag.value_sz); break;
        }
        switch (tag.deriv) {
            case BcKind::Free: break;
            case BcKind::Diagonal: set_deriv(k01, 0.0); set_deriv(k10, 0.0); break;
            case BcKind::OffDiagonal: set_deriv(kz, 0.0); break;
            case BcKind::OffDiagonalPlusFixedDiagonal: set_deriv(kz, tag.deriv_sz); break;
        }
    };
    add(f.bc0, true);
    add(f.bcL, false);
    apply_channel(c01, g, k01);
    apply_channel(c10, g, k10);
    apply_channel(cz, g, kz);
    for (int i : {0, n}) {
        const cplx tr_half = 0.5 * (out.values[i](0, 0) + out.values[i](1, 1));
        out.values[i](0, 1) = c01(i);
        out.values[i](1, 0) = c10(i);
        out.values[i](0, 0) = tr_half + cz(i);
        out.values[i](1, 1) = tr_half - cz(i);
    }
    return out;
}

MatFn spectral_filter(const MatFn& f, double rel_cut) {
    const Grid& g = *f.grid;
    const int n = g.N - 1;
    MatFn out = f;
    // Chebyshev coefficients by the cosine transform on the Lobatto nodes;
    // node j corresponds to angle (n - j) pi / n in the ascending layout.
    Eigen::VectorXcd vals(g.N), coef(g.N);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            for (int j = 0; j < g.N; ++j) vals(j) = f.values[j](r, c);
            double cmax = 0.0;
            for (int k = 0; k <= n; ++k) {
                cplx acc = 0.0;
                for (int j = 0; j <= n; ++j) {
                    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
                    acc += w * vals(j) * std::cos(M_PI * k * (n - j) / double(n));
                }
                coef(k) = acc * (2.0 / n);
                cmax = std::max(cmax, std::abs(coef(k)));
            }
            for (int k = 0; k <= n; ++k)
                if (std::abs(coef(k)) < rel_cut * cmax) coef(k) = 0.0;
            for (int j = 0; j <= n; ++j) {
                cplx acc = 0.5 * coef(0);
                for (int k = 1; k < n; ++k) acc += coef(k) * std::cos(M_PI * k * (n - j) / double(n));
                acc += 0.5 * coef(n) * std::cos(M_PI * n * (n - j) / double(n));
                out.values[j](r, c) = acc;
            }
        }
    return out;
}

double MatFn::bc_violation() const {
    const Grid& g = *grid;
    const int n = g.N - 1;
    MatFn d;
    const bool need_deriv = bc0.deriv != BcKind::Free || bcL.deriv != BcKind::Free;
    if (need_deriv) d = deriv();
    double viol = 0.0;
    auto check = [&](const BcTag& tag, int node) {
        auto measure = [&](BcKind kind, cplx sz, const Mat2& m) {
            switch (kind) {
                case BcKind::Free: return 0.0;
                case BcKind::Diagonal: return std::max(std::abs(m(0, 1)), std::abs(m(1, 0)));
                case BcKind::OffDiagonal: return std::abs(0.5 * (m(0, 0) - m(1, 1)));
                case BcKind::OffDiagonalPlusFixedDiagonal:
                    return std::abs(0.5 * (m(0, 0) - m(1, 1)) - sz);
            }
            return 0.0;
        };
        viol = std::max(viol, measure(tag.value, tag.value_sz, values[node]));
        if (need_deriv) viol = std::max(viol, measure(tag.deriv, tag.deriv_sz, d.values[node]));
    };
    check(bc0, 0);
    check(bcL, n);
    return viol;
}

}  // namespace d2alf
