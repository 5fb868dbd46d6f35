#pragma once

#include "lapexp/expansion.hpp"
#include "lapexp/oracle.hpp"
#include "lapexp/problem.hpp"
#include "lapexp/spectral.hpp"
#include "lapexp/variational.hpp"

namespace lapexp {

/// Everything analyze computes up to the spectrum. Criticality is left as
/// a flag on the spectrum so callers can report before failing.
struct Analysis {
  DiscreteMeasure ambient;       // normalized input measure
  ReducedFrame frame;
  DiscreteMeasure reduced;       // measure in frame coordinates
  PolynomialFunctional phi_reduced;
  MaximizerResult maximizer;
  AnalysisContext ctx;
  Spectrum spectrum;
  Vec x_star_ambient;
  Vec phi_star_ambient;
  double epsilon;  // configured or defaulted restriction radius
};

Analysis analyze_problem(const ProblemFile& p);

/// C2 with breakdown; throws CriticalityError on a supercritical spectrum.
ExpansionReport c2_report(const Analysis& a);

/// Restricted-quadratic series c_0..c_{2N}; throws CriticalityError on a
/// supercritical spectrum.
PowerSeries series_report(const Analysis& a, int order);

}  // namespace lapexp
