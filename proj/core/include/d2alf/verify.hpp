#pragma once

// The batch verification suite: one named check per acceptance criterion,
// each with its pinned tolerance, plus a quick mode on a coarser grid.

#include <functional>
#include <string>
#include <vector>

#include "d2alf/config.hpp"

namespace d2alf {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CheckResult> run_acceptance(const RunConfig& cfg, bool quick = false,
                                        const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace d2alf
