#include "d2alf/io.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "d2alf/errors.hpp"

namespace d2alf {

using nlohmann::json;

namespace {

json matfn_json(const MatFn& f) {
    json values = json::array();
    for (const auto& m : f.values) {
        json node = json::array();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) node.push_back({m(r, c).real(), m(r, c).imag()});
        values.push_back(node);
    }
    return json{{"L", f.grid->L}, {"N", f.grid->N}, {"values", values}};
}

MatFn matfn_parse(const json& j, GridPtr grid_hint) {
    const double L = j.at("L").get<double>();
    const int N = j.at("N").get<int>();
    GridPtr grid = grid_hint;
    if (!grid || grid->N != N || grid->L != L) grid = make_grid(L, N);
    MatFn f(grid);
    const auto& values = j.at("values");
    if (static_cast<int>(values.size()) != N) throw ConfigError("MatFn node count mismatch");
    for (int k = 0; k < N; ++k) {
        const auto& node = values.at(k);
        for (int e = 0; e < 4; ++e)
            f.values[k](e / 2, e % 2) = cplx(node.at(e).at(0).get<double>(),
                                             node.at(e).at(1).get<double>());
    }
    return f;
}

json meta_json(const RunConfig& cfg) {
    json meta;
    meta["version"] = kVersion;
    meta["config"] = cfg.echo();
    return meta;
}

}  // namespace

std::string matfn_to_json(const MatFn& f) { return matfn_json(f).dump(); }

MatFn matfn_from_json(const std::string& text, GridPtr grid_hint) {
    return matfn_parse(json::parse(text), grid_hint);
}

std::string duy_result_to_json(const DuyResult& r, const RunConfig& cfg) {
    json j;
    j["meta"] = meta_json(cfg);
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["M_history"] = r.M_history;
    json A = json::array();
    for (const auto& f : r.A.A) A.push_back(matfn_json(f));
    j["A"] = A;
    j["g"] = matfn_json(r.g);
    j["twisted"] = r.twisted;
    j["abelian"] = r.abelian;
    j["tikhonov_used"] = r.tikhonov_used;
    return j.dump(2);
}

std::string period_report_to_json(const PeriodReport& r, const RunConfig& cfg) {
    json j;
    j["meta"] = meta_json(cfg);
    j["xi"] = {{"xi0", {r.xi.xi0(0), r.xi.xi0(1), r.xi.xi0(2)}},
               {"xiL", {r.xi.xiL(0), r.xi.xiL(1), r.xi.xiL(2)}}};
    j["sphere"] = (r.sphere == SphereSelect::Difference) ? "difference" : "sum";
    j["form"] = {{"omega1", r.omega(0)},
                 {"omega2", r.omega(1)},
                 {"omega3", r.omega(2)},
                 {"omegaC", {r.omegaC.real(), r.omegaC.imag()}}};
    j["mesh"] = r.triangles;
    j["failed_points"] = r.failed_points;
    return j.dump(2);
}

std::string group_report_to_json(const FiniteSubgroup& g, const RunConfig& cfg) {
    json j;
    j["meta"] = meta_json(cfg);
    j["group"] = g.name();
    j["order"] = g.order();
    j["class_sizes"] = g.class_size;
    j["irrep_dims"] = g.irrep_dims;
    j["fi_dimension"] = fi_dimension(g);
    j["weyl"] = weyl_group(g, g).to_string();
    return j.dump(2);
}

std::string chart_to_csv(const std::vector<ChartPoint>& pts) {
    std::ostringstream os;
    os << std::setprecision(16);
    os << "re_alpha0,im_alpha0,re_betax,im_betax";
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) os << ",G" << a << b;
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) os << ",Om" << i << "_" << a << b;
    os << ",residual,status\n";
    for (const auto& p : pts) {
        os << p.alpha0.real() << "," << p.alpha0.imag() << "," << p.beta_x.real() << ","
           << p.beta_x.imag();
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) os << "," << p.G(a, b);
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) os << "," << p.Omega[i](a, b);
        os << "," << p.residual << "," << (p.converged ? "ok" : p.error) << "\n";
    }
    return os.str();
}

XiPath path_from_csv(const std::string& text) {
    XiPath path;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
            continue;
        std::istringstream row(line);
        std::vector<double> vals;
        std::string cell;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 7) throw ConfigError("path rows need 7 columns");
        path.s.push_back(vals[0]);
        Xi3 xi;
        xi.xi0 << vals[1], vals[2], vals[3];
        xi.xiL << vals[4], vals[5], vals[6];
        path.xi.push_back(xi);
    }
    if (path.s.size() < 2) throw ConfigError("path needs at least two samples");
    return path;
}

}  // namespace d2alf
