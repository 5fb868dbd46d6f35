#pragma once

#include <cstdint>
#include <vector>

#include "lapexp/common.hpp"
#include "lapexp/functional.hpp"
#include "lapexp/measure.hpp"

namespace lapexp {

struct EntropyResult {
  double h;
  Vec phi;  // argmax dual, grad log M(phi) = x
};

/// Legendre transform h(x) = sup_phi { phi.x - log M(phi) } by damped Newton
/// on the strictly concave dual objective. Throws VariationalError when x is
/// outside (or on the boundary of) the support hull.
EntropyResult entropy(const DiscreteMeasure& m, const Vec& x, double tol = 1e-10);

struct Root {
  Vec x;
  double value;  // (Phi - h)(x) via the fixed-point identity
};

struct MaximizerResult {
  Vec x_star;
  Vec phi_star;
  double lambda;
  std::vector<Root> roots;  // distinct converged roots, best first
  bool unique_max_heuristic;
};

/// Solves the fixed point x = grad log M(D Phi(x)) by damped Newton from
/// multiple starts (support points, mean, seeded random hull points) and
/// returns the root maximizing Phi - h. Near-ties at distinct locations are
/// treated as a degenerate maximum and throw.
MaximizerResult find_maximizer(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                               int multistart, std::uint64_t seed,
                               double newton_tol = 1e-12);

struct AnalysisContext {
  Vec x_star;    // reduced coordinates
  Vec phi_star;  // reduced coordinates
  double lambda;
  DiscreteMeasure nu0;  // tilted, centered
  Mat gamma;            // covariance of nu0
  bool unique_max_heuristic;
  int roots_found;
  double h_two_way_gap;  // |h via entropy solve - h via the dual identity|
};

AnalysisContext assemble_context(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                                 const MaximizerResult& mr);

}  // namespace lapexp
