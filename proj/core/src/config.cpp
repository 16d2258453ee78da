#include "d2alf/config.hpp"

#include <fstream>
#include <sstream>

#include "d2alf/errors.hpp"

namespace d2alf {

const char* kVersion = "0.1.0";

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "grid_n") grid_n = std::stoi(value);
        else if (key == "length") length = std::stod(value);
        else if (key == "tol_predicate") tol_predicate = std::stod(value);
        else if (key == "tol_duy") tol_duy = std::stod(value);
        else if (key == "duy_max_iter") duy_max_iter = std::stoi(value);
        else if (key == "subline_tol") subline_tol = std::stod(value);
        else if (key == "axial_window") axial_window = std::stod(value);
        else if (key == "svd_kernel_cut") svd_kernel_cut = std::stod(value);
        else if (key == "path_steps_per_unit") path_steps_per_unit = std::stoi(value);
        else if (key == "wall_tube_radius_rel") wall_tube_radius_rel = std::stod(value);
        else if (key == "corrector_iters") corrector_iters = std::stoi(value);
        else if (key == "sphere_refinements") sphere_refinements = std::stoi(value);
        else if (key == "fd_step") fd_step = std::stod(value);
        else if (key == "spectral_cutoff") spectral_cutoff = std::stoi(value);
        else if (key == "seed") seed = static_cast<unsigned>(std::stoul(value));
        else if (key == "workers") workers = std::stoi(value);
        else if (key == "output") output = value;
        else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for key " + key + ": " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("out-of-range value for key " + key + ": " + value);
    }
}

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + " is not key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::map<std::string, std::string> RunConfig::echo() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    return {
        {"grid_n", std::to_string(grid_n)},
        {"length", fmt(length)},
        {"tol_predicate", fmt(tol_predicate)},
        {"tol_duy", fmt(tol_duy)},
        {"duy_max_iter", std::to_string(duy_max_iter)},
        {"subline_tol", fmt(subline_tol)},
        {"axial_window", fmt(axial_window)},
        {"svd_kernel_cut", fmt(svd_kernel_cut)},
        {"path_steps_per_unit", std::to_string(path_steps_per_unit)},
        {"wall_tube_radius_rel", fmt(wall_tube_radius_rel)},
        {"corrector_iters", std::to_string(corrector_iters)},
        {"sphere_refinements", std::to_string(sphere_refinements)},
        {"fd_step", fmt(fd_step)},
        {"spectral_cutoff", std::to_string(spectral_cutoff)},
        {"seed", std::to_string(seed)},
        {"workers", std::to_string(workers)},
        {"output", output},
    };
}

}  // namespace d2alf
