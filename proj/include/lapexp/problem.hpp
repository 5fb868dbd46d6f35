#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lapexp/common.hpp"
#include "lapexp/functional.hpp"
#include "lapexp/measure.hpp"

namespace lapexp {

struct Options {
  double crit_tol = 1e-6;
  double newton_tol = 1e-12;
  int max_order = 1;
  std::optional<double> epsilon;  // absent: 0.25 x hull diameter of nu0
  std::vector<long> n_grid = {50, 100, 200, 400};
  int multistart = 8;
  std::uint64_t seed = 0;
  std::vector<double> fit_powers = {0, 1, 2, 4};  // basis n^{-p/2}
  double fit_tol = 1e-3;  // verify gate: |C2_fit - C2| <= fit_tol * max(1, |C2|)
  int workers = 0;        // 0 = auto
};

struct ProblemFile {
  int dimension = 0;
  Mat points;   // d x s, as given
  Vec weights;  // normalized on load
  std::vector<SymTensor> tensors;  // index = order
  Options options;
  bool weights_normalized_warning = false;

  PolynomialFunctional phi() const { return PolynomialFunctional(dimension, tensors); }
};

ProblemFile parse_problem(const nlohmann::json& j);
ProblemFile load_problem(const std::string& path);

/// Canonical form: sorted tensor entries, normalized weights, every option
/// materialized. load(serialize(p)) == p.
nlohmann::json serialize_problem(const ProblemFile& p);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string input_digest(const ProblemFile& p);

}  // namespace lapexp
