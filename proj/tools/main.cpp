// Command-line front end: solve, classify, metric, transport, curvature,
// periods, rg, orbifold-check, fi, verify.  Structured results go to JSON,
// tables to CSV.  Exit codes: 0 success, 2 config/precondition error,
// 3 numerical non-convergence.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "d2alf/connection.hpp"
#include "d2alf/duy.hpp"
#include "d2alf/equivariant.hpp"
#include "d2alf/io.hpp"
#include "d2alf/moduli.hpp"
#include "d2alf/rg.hpp"
#include "d2alf/verify.hpp"

#include <json.hpp>

using namespace d2alf;
using nlohmann::json;

namespace {

void emit(const RunConfig& cfg, const std::string& payload) {
    if (cfg.output.empty()) {
        std::cout << payload << "\n";
    } else {
        std::ofstream f(cfg.output);
        f << payload << "\n";
        std::cout << "wrote " << cfg.output << "\n";
    }
}

json meta(const RunConfig& cfg) {
    return json{{"version", kVersion}, {"config", cfg.echo()}};
}

FamilyKind parse_family(int f) {
    if (f < 1 || f > 7) throw ConfigError("family must be 1..7");
    return static_cast<FamilyKind>(f);
}

struct XiFlags {
    std::vector<double> xi0{1.0, 0.0, 0.0};
    std::vector<double> xiL{2.0, 0.0, 0.0};
    Xi3 value() const {
        if (xi0.size() != 3 || xiL.size() != 3) throw ConfigError("--xi0/--xiL need 3 components");
        Xi3 xi;
        xi.xi0 << xi0[0], xi0[1], xi0[2];
        xi.xiL << xiL[0], xiL[1], xiL[2];
        return xi;
    }
};

ComplexNahm build_family(const RunConfig& cfg, int family, double a0re, double a0im, double bxre,
                         double bxim, double cre, double cim, int subcase, const Xi3& xi,
                         GridPtr grid) {
    FamilyParams p;
    p.alpha0 = cplx(a0re, a0im);
    p.beta_x = cplx(bxre, bxim);
    p.c = cplx(cre, cim);
    p.subcase = subcase;
    const cplx x0(xi.xi0(1), xi.xi0(2)), xL(xi.xiL(1), xi.xiL(2));
    (void)cfg;
    return complex_nahm_family(parse_family(family), p, x0, xL, grid->L, grid);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nahm-data construction of the two-center ALF family"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value configuration file");

    // Shared flags.
    XiFlags xiflags;
    int family = 1, subcase = 1;
    double a0re = 0.5, a0im = 0.5, bxre = 0.0, bxim = 0.0, cre = 0.0, cim = 0.0;
    auto add_family_flags = [&](CLI::App* sub) {
        sub->add_option("--family", family, "solution family 1..7");
        sub->add_option("--alpha0-re", a0re);
        sub->add_option("--alpha0-im", a0im);
        sub->add_option("--betax-re", bxre);
        sub->add_option("--betax-im", bxim);
        sub->add_option("--c-re", cre);
        sub->add_option("--c-im", cim);
        sub->add_option("--subcase", subcase);
        sub->add_option("--xi0", xiflags.xi0, "xi at t=0 (3 reals)")->expected(3);
        sub->add_option("--xiL", xiflags.xiL, "xi at t=L (3 reals)")->expected(3);
    };

    auto* solve = app.add_subcommand("solve", "solve for the real representative");
    add_family_flags(solve);

    auto* classify = app.add_subcommand("classify", "stability verdict");
    add_family_flags(classify);

    auto* metric = app.add_subcommand("metric", "frame or chart table (CSV)");
    add_family_flags(metric);
    std::vector<double> chart_re, chart_im;
    metric->add_option("--alpha0-grid-re", chart_re, "chart alpha0 real values");
    metric->add_option("--betax-grid-re", chart_im, "chart beta_x real values");

    auto* transport = app.add_subcommand("transport", "parallel transport along a parameter path");
    add_family_flags(transport);
    std::string path_csv;
    transport->add_option("--path", path_csv, "CSV path file")->required();

    auto* curvature = app.add_subcommand("curvature", "curvature commutator report");
    double curv_c = 0.7, curv_L = 1.0;
    curvature->add_option("--c", curv_c, "axial constant");
    curvature->add_option("--L", curv_L, "interval length");

    auto* periods = app.add_subcommand("periods", "sphere period report");
    add_family_flags(periods);
    std::string sphere_name = "difference";
    periods->add_option("--sphere", sphere_name, "difference|sum");

    auto* rg = app.add_subcommand("rg", "finite-dimensional image of constant-connection data");
    add_family_flags(rg);

    auto* orbifold = app.add_subcommand("orbifold-check", "flat-orbifold spectral verifier");
    double orb_a = 0.3;
    std::vector<double> orb_phi{0.2, -0.4, 0.1};
    orbifold->add_option("--a", orb_a);
    orbifold->add_option("--phi", orb_phi)->expected(3);

    auto* fi = app.add_subcommand("fi", "finite-group report");
    std::string group_name = "2T";
    fi->add_option("--group", group_name, "Zn | BDn | 2T | 2O | 2I");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    bool quick = false;
    verify->add_flag("--quick", quick, "coarser grid, fewer samples");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::from_file(config_path);
        GridPtr grid = make_grid(cfg.length, cfg.grid_n);
        const Xi3 xi = xiflags.value();

        if (*solve) {
            const ComplexNahm b =
                build_family(cfg, family, a0re, a0im, bxre, bxim, cre, cim, subcase, xi, grid);
            DuyOptions opts{cfg.tol_duy, cfg.duy_max_iter};
            const DuyResult r = solve_duy(b, xi.xi0(0), xi.xiL(0), opts);
            emit(cfg, duy_result_to_json(r, cfg));
        } else if (*classify) {
            const ComplexNahm b =
                build_family(cfg, family, a0re, a0im, bxre, bxim, cre, cim, subcase, xi, grid);
            json j;
            j["meta"] = meta(cfg);
            j["verdict"] = to_string(classify_stability(b, xi.xi0(0), xi.xiL(0)));
            json subs = json::array();
            for (const auto& s : find_sublines(b, cfg.subline_tol))
                subs.push_back({{"sign0", s.sign0},
                                {"signL", s.signL},
                                {"degree", degree(s, xi.xi0(0), xi.xiL(0))}});
            j["sublines"] = subs;
            emit(cfg, j.dump(2));
        } else if (*metric) {
            std::vector<cplx> a0s, bxs;
            if (chart_re.empty()) a0s = {cplx(a0re, a0im)};
            else for (double v : chart_re) a0s.emplace_back(v, a0im);
            if (chart_im.empty()) bxs = {cplx(bxre, bxim)};
            else for (double v : chart_im) bxs.emplace_back(v, bxim);
            ChartOptions copts;
            copts.xiR0 = xi.xi0(0);
            copts.xiRL = xi.xiL(0);
            copts.xiC0 = cplx(xi.xi0(1), xi.xi0(2));
            copts.xiCL = cplx(xi.xiL(1), xi.xiL(2));
            copts.duy = DuyOptions{cfg.tol_duy, cfg.duy_max_iter};
            copts.workers = cfg.workers;
            emit(cfg, chart_to_csv(metric_pullback_chart(a0s, bxs, grid, copts)));
        } else if (*transport) {
            std::ifstream f(path_csv);
            if (!f) throw ConfigError("cannot open path file " + path_csv);
            std::ostringstream ss;
            ss << f.rdbuf();
            const XiPath path = path_from_csv(ss.str());
            const ComplexNahm b = build_family(cfg, family, a0re, a0im, bxre, bxim, cre, cim,
                                               subcase, path.xi.front(), grid);
            const DuyResult r =
                solve_duy(b, path.xi.front().xi0(0), path.xi.front().xiL(0),
                          DuyOptions{cfg.tol_duy, cfg.duy_max_iter});
            TransportOptions topts;
            topts.steps_per_unit = cfg.path_steps_per_unit;
            topts.corrector_iters = cfg.corrector_iters;
            topts.wall_tube_rel = cfg.wall_tube_radius_rel;
            const RealNahm end = parallel_transport_path(r.A, path, topts);
            json j;
            j["meta"] = meta(cfg);
            double mu_norm = 0.0;
            for (const auto& m : moment_maps(end)) mu_norm = std::max(mu_norm, m.max_norm());
            j["endpoint_xi"] = {{"xi0", {end.xi.xi0(0), end.xi.xi0(1), end.xi.xi0(2)}},
                                {"xiL", {end.xi.xiL(0), end.xi.xiL(1), end.xi.xiL(2)}}};
            j["moment_map_residual"] = mu_norm;
            json A = json::array();
            for (const auto& fA : end.A) A.push_back(json::parse(matfn_to_json(fA)));
            j["A"] = A;
            emit(cfg, j.dump(2));
        } else if (*curvature) {
            GridPtr gc = make_grid(curv_L, cfg.grid_n);
            RealNahm A = RealNahm::make(gc, Xi3{});
            for (int k = 0; k < gc->N; ++k)
                A.A[1].values[k] = cplx(0, 1) * curv_c * pauli_x();
            const Quad F = curvature_commutator(A, {2, 1}, {3, 1});
            const double expect = (4 * curv_c * curv_L + std::sinh(4 * curv_c * curv_L)) /
                                  (4 * curv_c * curv_c * curv_L * std::pow(std::sinh(2 * curv_c * curv_L), 2));
            double err = 0.0;
            for (int k = 0; k < gc->N; ++k) {
                err = std::max(err, (F[0].values[k] - cplx(0, 1) * expect * pauli_x()).norm());
                for (int mu = 1; mu < 4; ++mu) err = std::max(err, F[mu].values[k].norm());
            }
            json j;
            j["meta"] = meta(cfg);
            j["c"] = curv_c;
            j["L"] = curv_L;
            j["closed_form"] = expect;
            j["relative_difference"] = err / expect;
            emit(cfg, j.dump(2));
        } else if (*periods) {
            PeriodOptions popts;
            popts.refinements = cfg.sphere_refinements;
            popts.duy = DuyOptions{cfg.tol_duy, cfg.duy_max_iter, 0.25, 0.5, false};
            popts.fd_step = cfg.fd_step;
            popts.workers = cfg.workers;
            const SphereSelect sel =
                (sphere_name == "sum") ? SphereSelect::Sum : SphereSelect::Difference;
            const PeriodReport r = sphere_period(xi, grid, sel, popts);
            emit(cfg, period_report_to_json(r, cfg));
        } else if (*rg) {
            const ComplexNahm b =
                build_family(cfg, family, a0re, a0im, bxre, bxim, cre, cim, subcase, xi, grid);
            const KronheimerData k = rg_c(b, xi.xi0(0), xi.xiL(0));
            json j;
            j["meta"] = meta(cfg);
            j["alphaK"] = {{k.alphaK(0, 0).real(), k.alphaK(0, 0).imag()},
                           {k.alphaK(0, 1).real(), k.alphaK(0, 1).imag()},
                           {k.alphaK(1, 0).real(), k.alphaK(1, 0).imag()},
                           {k.alphaK(1, 1).real(), k.alphaK(1, 1).imag()}};
            j["betaK"] = {{k.betaK(0, 0).real(), k.betaK(0, 0).imag()},
                          {k.betaK(0, 1).real(), k.betaK(0, 1).imag()},
                          {k.betaK(1, 0).real(), k.betaK(1, 0).imag()},
                          {k.betaK(1, 1).real(), k.betaK(1, 1).imag()}};
            j["xiKR"] = k.xiKR;
            j["xiKC"] = {k.xiKC.real(), k.xiKC.imag()};
            j["residual"] = kronheimer_residual(k);
            emit(cfg, j.dump(2));
        } else if (*orbifold) {
            EquivariantSpectralProblem p;
            p.K = cfg.spectral_cutoff;
            p.a = orb_a;
            p.phi << orb_phi[0], orb_phi[1], orb_phi[2];
            const SpectralReport r = flat_orbifold_spectrum(p);
            json j;
            j["meta"] = meta(cfg);
            j["K_used"] = r.K_used;
            j["commuting"] = r.commuting;
            j["orbit_match"] = r.orbit_match;
            j["orbit_defect"] = r.orbit_defect;
            j["heat_trace_max"] = r.heat_trace_max;
            emit(cfg, j.dump(2));
        } else if (*fi) {
            const FiniteSubgroup g = make_group_from(group_name);
            emit(cfg, group_report_to_json(g, cfg));
        } else if (*verify) {
            bool all = true;
            const auto results = run_acceptance(cfg, quick, [&](const CheckResult& r) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail
                          << "]  (" << r.seconds << " s)\n"
                          << std::flush;
            });
            for (const auto& r : results) all = all && r.pass;
            std::cout << (all ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
            if (!all) return 3;
        }
        return 0;
    } catch (const NoConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
