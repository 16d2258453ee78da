#pragma once

// Line-oriented key = value configuration with # comments.  Unknown keys are
// a hard error; every accepted key is echoed into output metadata.

#include <map>
#include <string>

namespace d2alf {

struct RunConfig {
    int grid_n = 96;
    double length = 1.0;
    double tol_predicate = 1e-10;
    double tol_duy = 1e-9;
    int duy_max_iter = 200;
    double subline_tol = 1e-7;
    double axial_window = 1e-8;
    double svd_kernel_cut = 1e-8;
    int path_steps_per_unit = 64;
    double wall_tube_radius_rel = 1e-3;
    int corrector_iters = 2;
    int sphere_refinements = 1;
    double fd_step = 1e-4;
    int spectral_cutoff = 64;
    unsigned seed = 42;
    int workers = 0;
    std::string output = "";

    // Every accepted key and its final value, for the output echo.
    std::map<std::string, std::string> echo() const;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);
    void set(const std::string& key, const std::string& value);
};

extern const char* kVersion;

}  // namespace d2alf
