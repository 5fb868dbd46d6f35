#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "lapexp/pipeline.hpp"

namespace lapexp {

/// Common report skeleton: tool version, digest, maximizer, spectrum, flags.
nlohmann::json base_report(const ProblemFile& p, const Analysis& a);

void attach_c2(nlohmann::json& report, const ExpansionReport& rep);
void attach_series(nlohmann::json& report, const PowerSeries& series);
void attach_sweep(nlohmann::json& report, const OracleSweep& sweep, double c2_total,
                  double fit_tol, bool gate_pass);

std::string sweep_csv(const OracleSweep& sweep);

}  // namespace lapexp
