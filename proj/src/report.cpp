#include "lapexp/report.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

namespace lapexp {

using nlohmann::json;

json base_report(const ProblemFile& p, const Analysis& a) {
  json j;
  j["tool"] = {{"name", "lapexp"}, {"version", kVersion}};
  j["input_digest"] = input_digest(p);

  json xs = json::array();
  for (int i = 0; i < a.x_star_ambient.size(); ++i) xs.push_back(a.x_star_ambient(i));
  json ps = json::array();
  for (int i = 0; i < a.phi_star_ambient.size(); ++i) ps.push_back(a.phi_star_ambient(i));
  j["x_star"] = xs;
  j["phi_star"] = ps;
  j["lambda"] = a.ctx.lambda;

  json eigs = json::array();
  for (int k = 0; k < a.spectrum.a.size(); ++k) eigs.push_back(a.spectrum.a(k));
  j["eigenvalues"] = eigs;
  if (a.spectrum.subcritical) j["C0"] = a.spectrum.c0;

  json roots = json::array();
  for (const Root& r : a.maximizer.roots) {
    json rx = json::array();
    for (int i = 0; i < r.x.size(); ++i) rx.push_back(r.x(i));
    roots.push_back({{"x", rx}, {"value", r.value}});
  }
  j["roots"] = roots;

  j["flags"] = {
      {"unique_max_heuristic", a.ctx.unique_max_heuristic},
      {"subcritical", a.spectrum.subcritical},
      {"weights_normalized", p.weights_normalized_warning},
      {"reduced_dimension", a.frame.r()},
  };
  if (!a.spectrum.subcritical) j["flags"]["critical_index"] = a.spectrum.critical_index;
  j["epsilon"] = a.epsilon;
  return j;
}

void attach_c2(json& report, const ExpansionReport& rep) {
  json breakdown;
  const auto& names = ExpansionReport::term_names();
  for (std::size_t i = 0; i < names.size(); ++i) breakdown[names[i]] = rep.terms[i];
  report["C2"] = {{"total", rep.total}, {"breakdown", breakdown}};
}

void attach_series(json& report, const PowerSeries& series) {
  report["series"] = {{"order", series.order}, {"coefficients", series.coeff}};
}

void attach_sweep(json& report, const OracleSweep& sweep, double c2_total,
                  double fit_tol, bool gate_pass) {
  json rows = json::array();
  for (const SweepRow& r : sweep.rows)
    rows.push_back({{"n", r.n}, {"log_Zn", r.log_zn}, {"Un", r.un}, {"Rn", r.rn}});
  report["sweep"] = rows;
  report["fit"] = {
      {"C2_fit", sweep.c2_fit},
      {"b1", sweep.b1},
      {"residual", sweep.rn_fit.residual},
      {"powers", sweep.rn_fit.powers},
      {"C0_fit", sweep.un_fit.limit},
  };
  report["C2_check"] = {{"C2", c2_total}, {"tol", fit_tol}, {"pass", gate_pass}};
}

std::string sweep_csv(const OracleSweep& sweep) {
  std::string out = "n,log_Zn,Un,Rn\n";
  char buf[160];
  for (const SweepRow& r : sweep.rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", r.n, r.log_zn, r.un, r.rn);
    out += buf;
  }
  return out;
}

}  // namespace lapexp
