#pragma once

// JSON and CSV serialization of the library types.  MatFn objects are
// encoded as {"L":..., "N":..., "values": [[re,im] x 4] x N row-major per
// node}.  All payloads embed the config echo and the code version.

#include <string>
#include <vector>

#include "d2alf/config.hpp"
#include "d2alf/connection.hpp"
#include "d2alf/duy.hpp"
#include "d2alf/equivariant.hpp"
#include "d2alf/moduli.hpp"
#include "d2alf/rg.hpp"

namespace d2alf {

std::string matfn_to_json(const MatFn& f);
MatFn matfn_from_json(const std::string& text, GridPtr grid_hint = nullptr);

std::string duy_result_to_json(const DuyResult& r, const RunConfig& cfg);
std::string period_report_to_json(const PeriodReport& r, const RunConfig& cfg);
std::string group_report_to_json(const FiniteSubgroup& g, const RunConfig& cfg);

// Chart tables as CSV: re(a0), im(a0), re(bx), im(bx), 10 metric entries,
// 3 x 6 form entries, residual.
std::string chart_to_csv(const std::vector<ChartPoint>& pts);

// Path input rows: s, xi1_0, xi2_0, xi3_0, xi1_L, xi2_L, xi3_L.
XiPath path_from_csv(const std::string& text);

}  // namespace d2alf
