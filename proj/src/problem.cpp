#include "lapexp/problem.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace lapexp {
namespace {

using nlohmann::json;

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw InputError("problem: unknown key \"" + it.key() + "\" in " + where);
  }
}

double as_finite(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError("problem: " + where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError("problem: " + where + " must be finite");
  return v;
}

}  // namespace

ProblemFile parse_problem(const json& j) {
  if (!j.is_object()) throw InputError("problem: top level must be an object");
  require_keys(j, {"dimension", "measure", "phi", "options"}, "top level");
  if (!j.contains("dimension") || !j.contains("measure") || !j.contains("phi"))
    throw InputError("problem: required keys are dimension, measure, phi");

  ProblemFile p;
  if (!j["dimension"].is_number_integer() || j["dimension"].get<long>() < 1)
    throw InputError("problem: dimension must be a positive integer");
  p.dimension = j["dimension"].get<int>();

  const json& meas = j["measure"];
  require_keys(meas, {"points", "weights"}, "measure");
  if (!meas.contains("points") || !meas.contains("weights"))
    throw InputError("problem: measure needs points and weights");
  const json& pts = meas["points"];
  const json& wts = meas["weights"];
  if (!pts.is_array() || pts.empty())
    throw InputError("problem: measure.points must be a nonempty array");
  if (!wts.is_array() || wts.size() != pts.size())
    throw InputError("problem: measure.weights must match points in length");
  const int s = static_cast<int>(pts.size());
  p.points.resize(p.dimension, s);
  p.weights.resize(s);
  for (int i = 0; i < s; ++i) {
    const json& row = pts[i];
    if (!row.is_array() || static_cast<int>(row.size()) != p.dimension)
      throw InputError("problem: point " + std::to_string(i) + " must have length " +
                       std::to_string(p.dimension));
    for (int k = 0; k < p.dimension; ++k)
      p.points(k, i) = as_finite(row[k], "points[" + std::to_string(i) + "]");
    p.weights(i) = as_finite(wts[i], "weights[" + std::to_string(i) + "]");
    if (p.weights(i) < 0.0)
      throw InputError("problem: negative weight at index " + std::to_string(i));
  }
  const double wsum = p.weights.sum();
  if (!(wsum > 0.0)) throw InputError("problem: weights sum to zero");
  if (std::abs(wsum - 1.0) > 0.15)
    throw InputError("problem: weights sum to " + std::to_string(wsum) +
                     "; more than 0.15 from 1");
  p.weights_normalized_warning = std::abs(wsum - 1.0) > 1e-12;
  p.weights /= wsum;

  const json& phi = j["phi"];
  require_keys(phi, {"tensors"}, "phi");
  if (!phi.contains("tensors") || !phi["tensors"].is_array())
    throw InputError("problem: phi.tensors must be an array");
  for (const json& tj : phi["tensors"]) {
    require_keys(tj, {"order", "entries"}, "tensor");
    if (!tj.contains("order") || !tj["order"].is_number_integer())
      throw InputError("problem: tensor order must be an integer");
    const int order = tj["order"].get<int>();
    if (order < 0 || order > PolynomialFunctional::kMaxDegree)
      throw InputError("problem: tensor order " + std::to_string(order) +
                       " outside 0.." + std::to_string(PolynomialFunctional::kMaxDegree));
    if (static_cast<int>(p.tensors.size()) <= order)
      p.tensors.resize(order + 1, SymTensor(p.dimension, 0));
    if (!p.tensors[order].empty())
      throw InputError("problem: duplicate tensor block for order " +
                       std::to_string(order));
    SymTensor t(p.dimension, order);
    if (!tj.contains("entries") || !tj["entries"].is_array())
      throw InputError("problem: tensor entries must be an array");
    for (const json& ej : tj["entries"]) {
      require_keys(ej, {"index", "value"}, "tensor entry");
      if (!ej.contains("index") || !ej["index"].is_array() ||
          static_cast<int>(ej["index"].size()) != order)
        throw InputError("problem: entry index must be an array of length " +
                         std::to_string(order));
      std::vector<int> idx;
      for (const json& v : ej["index"]) {
        if (!v.is_number_integer()) throw InputError("problem: entry index not integer");
        idx.push_back(v.get<int>());
      }
      const double value = as_finite(ej.contains("value") ? ej["value"] : json(),
                                     "tensor entry value");
      std::string name = "(";
      for (std::size_t q = 0; q < idx.size(); ++q)
        name += (q ? "," : "") + std::to_string(idx[q]);
      name += ")";
      try {
        t.set(idx, value);
      } catch (const InputError& e) {
        throw InputError(std::string(e.what()) + " at index " + name);
      }
    }
    p.tensors[order] = std::move(t);
  }
  for (std::size_t m = 0; m < p.tensors.size(); ++m)
    if (p.tensors[m].order() != static_cast<int>(m))
      p.tensors[m] = SymTensor(p.dimension, static_cast<int>(m));

  if (j.contains("options")) {
    const json& o = j["options"];
    require_keys(o,
                 {"crit_tol", "newton_tol", "max_order", "epsilon", "n_grid",
                  "multistart", "seed", "fit_powers", "fit_tol", "workers"},
                 "options");
    Options& opt = p.options;
    if (o.contains("crit_tol")) opt.crit_tol = as_finite(o["crit_tol"], "crit_tol");
    if (o.contains("newton_tol")) opt.newton_tol = as_finite(o["newton_tol"], "newton_tol");
    if (o.contains("max_order")) opt.max_order = o["max_order"].get<int>();
    if (o.contains("epsilon")) opt.epsilon = as_finite(o["epsilon"], "epsilon");
    if (o.contains("n_grid")) {
      opt.n_grid.clear();
      for (const json& v : o["n_grid"]) opt.n_grid.push_back(v.get<long>());
    }
    if (o.contains("multistart")) opt.multistart = o["multistart"].get<int>();
    if (o.contains("seed")) opt.seed = o["seed"].get<std::uint64_t>();
    if (o.contains("fit_powers")) {
      opt.fit_powers.clear();
      for (const json& v : o["fit_powers"])
        opt.fit_powers.push_back(as_finite(v, "fit_powers"));
    }
    if (o.contains("fit_tol")) opt.fit_tol = as_finite(o["fit_tol"], "fit_tol");
    if (o.contains("workers")) opt.workers = o["workers"].get<int>();
    if (opt.crit_tol <= 0 || opt.newton_tol <= 0 || opt.fit_tol <= 0)
      throw InputError("problem: tolerances must be positive");
    if (opt.max_order < 0 || opt.max_order > 3)
      throw InputError("problem: max_order must be in 0..3");
    if (opt.multistart < 0) throw InputError("problem: multistart must be >= 0");
    if (opt.epsilon && !(*opt.epsilon > 0.0))
      throw InputError("problem: epsilon must be positive");
    for (long n : opt.n_grid)
      if (n < 1) throw InputError("problem: n_grid entries must be >= 1");
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("problem: JSON parse error in " + path + ": " + e.what());
  }
  return parse_problem(j);
}

json serialize_problem(const ProblemFile& p) {
  json j;
  j["dimension"] = p.dimension;
  json pts = json::array();
  json wts = json::array();
  for (int i = 0; i < p.points.cols(); ++i) {
    json row = json::array();
    for (int k = 0; k < p.dimension; ++k) row.push_back(p.points(k, i));
    pts.push_back(row);
    wts.push_back(p.weights(i));
  }
  j["measure"] = {{"points", pts}, {"weights", wts}};

  json tensors = json::array();
  for (const SymTensor& t : p.tensors) {
    if (t.empty()) continue;
    json entries = json::array();
    for (const auto& [idx, val] : t.entries())  // map order: sorted
      entries.push_back({{"index", idx}, {"value", val}});
    tensors.push_back({{"order", t.order()}, {"entries", entries}});
  }
  j["phi"] = {{"tensors", tensors}};

  const Options& o = p.options;
  json opt;
  opt["crit_tol"] = o.crit_tol;
  opt["newton_tol"] = o.newton_tol;
  opt["max_order"] = o.max_order;
  if (o.epsilon) opt["epsilon"] = *o.epsilon;
  opt["n_grid"] = o.n_grid;
  opt["multistart"] = o.multistart;
  opt["seed"] = o.seed;
  opt["fit_powers"] = o.fit_powers;
  opt["fit_tol"] = o.fit_tol;
  opt["workers"] = o.workers;
  j["options"] = opt;
  return j;
}

std::string input_digest(const ProblemFile& p) {
  const std::string canon = serialize_problem(p).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace lapexp
