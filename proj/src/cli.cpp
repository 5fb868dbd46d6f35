#include "lapexp/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "lapexp/report.hpp"

namespace lapexp {
namespace {

using nlohmann::json;

void write_or_print(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write " + out_path);
  out << text;
}

std::vector<long> parse_grid(const std::string& csv) {
  std::vector<long> grid;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    try {
      grid.push_back(std::stol(csv.substr(pos, next - pos)));
    } catch (...) {
      throw InputError("bad --n grid entry: " + csv.substr(pos, next - pos));
    }
    pos = next + 1;
  }
  if (grid.empty()) throw InputError("--n grid is empty");
  return grid;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Asymptotic expansion of Laplace functionals of i.i.d. sums "
               "over finite-support measures"};
  app.require_subcommand(1);

  std::string problem_path, out_path;
  long long seed_override = -1;
  int order = -1;
  std::string grid_csv;
  long mc_samples = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("problem", problem_path, "problem JSON file")->required();
    cmd->add_option("--out", out_path, "output path");
    cmd->add_option("--seed", seed_override, "override the problem-file seed");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "maximizer, spectrum, C0 and the C2 breakdown");
  add_common(analyze);

  CLI::App* expand = app.add_subcommand(
      "expand", "coefficients of the restricted quadratic expansion");
  add_common(expand);
  expand->add_option("--order", order,
                     "expansion order N (series up to n^{-N}; default: "
                     "options.max_order)");

  CLI::App* verify = app.add_subcommand(
      "verify", "finite-n oracle sweep and extrapolation against C2");
  add_common(verify);
  verify->add_option("--n", grid_csv, "comma-separated n grid");
  verify->add_option("--mc", mc_samples, "Monte Carlo sample count fallback");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  ProblemFile problem = load_problem(problem_path);
  if (seed_override >= 0) problem.options.seed = static_cast<std::uint64_t>(seed_override);

  if (analyze->parsed()) {
    const Analysis a = analyze_problem(problem);
    json report = base_report(problem, a);
    if (!a.spectrum.subcritical) {
      write_or_print(report, out_path);
      leading_constant(a.spectrum);  // throws CriticalityError -> exit 3
    }
    attach_c2(report, c2_report(a));
    write_or_print(report, out_path);
    return 0;
  }

  if (expand->parsed()) {
    if (expand->count("--order") == 0) order = problem.options.max_order;
    if (order < 0 || order > 3) throw InputError("expand: order must be in 0..3");
    const Analysis a = analyze_problem(problem);
    json report = base_report(problem, a);
    if (!a.spectrum.subcritical) {
      write_or_print(report, out_path);
      leading_constant(a.spectrum);
    }
    attach_series(report, series_report(a, order));
    write_or_print(report, out_path);
    return 0;
  }

  // verify
  const Analysis a = analyze_problem(problem);
  json report = base_report(problem, a);
  if (!a.spectrum.subcritical) {
    write_or_print(report, "");
    leading_constant(a.spectrum);
  }
  const ExpansionReport c2 = c2_report(a);
  attach_c2(report, c2);
  const std::vector<long> grid =
      grid_csv.empty() ? problem.options.n_grid : parse_grid(grid_csv);

  if (mc_samples > 0) {
    // guard fallback: Monte Carlo rows, no fit gate
    json rows = json::array();
    for (long n : grid) {
      const McEstimate est =
          mc_log_zn(a.reduced, a.phi_reduced, n, mc_samples, problem.options.seed);
      const double un = std::exp(est.estimate - static_cast<double>(n) * a.ctx.lambda);
      rows.push_back({{"n", n},
                      {"log_Zn", est.estimate},
                      {"log_Zn_se", est.std_error},
                      {"Un", un}});
    }
    report["sweep_mc"] = rows;
    write_or_print(report, "");
    return 0;
  }

  const double c0 = leading_constant(a.spectrum);
  const OracleSweep sweep = run_sweep(a.reduced, a.phi_reduced, a.ctx.lambda, c0, grid,
                                      problem.options.fit_powers,
                                      problem.options.workers);
  const double gap = std::abs(sweep.c2_fit - c2.total);
  const bool pass = gap <= problem.options.fit_tol * std::max(1.0, std::abs(c2.total));
  attach_sweep(report, sweep, c2.total, problem.options.fit_tol, pass);
  write_or_print(report, "");
  if (!out_path.empty()) {
    std::ofstream csv(out_path);
    if (!csv) throw InputError("cannot write " + out_path);
    csv << sweep_csv(sweep);
  }
  return pass ? 0 : 5;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  try {
    return dispatch(argc, argv);
  } catch (const CriticalityError& e) {
    std::cerr << "criticality: " << e.what() << "\n";
    return 3;
  } catch (const VariationalError& e) {
    std::cerr << "variational: " << e.what() << "\n";
    return 2;
  } catch (const GuardExceededError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 4;
  } catch (const InputError& e) {
    std::cerr << "input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lapexp
