#pragma once

#include <array>
#include <string>
#include <vector>

#include "lapexp/common.hpp"
#include "lapexp/functional.hpp"
#include "lapexp/spectral.hpp"
#include "lapexp/variational.hpp"
#include "lapexp/wick.hpp"

namespace lapexp {

/// Moment polynomials of the analysis: A_m(y) realizes
/// E^{nu0}[(sum_k sqrt(a_k) e_k(X) y_k)^m]; W3/W4 are Psi3/Psi4 expressed in
/// the primal eigenbasis f_k.
struct MomentPolynomialCache {
  int modes;                   // r
  int max_m;
  std::vector<YPolynomial> A;  // index m = 0..max_m (m < 2 unused)
  SymTensor w3;                // order 3 over modes, W3[k...] = Psi3(f_k1, f_k2, f_k3)
  SymTensor w4;
  YPolynomial w3_poly;         // Psi3(Y,Y,Y) in y-coordinates
  YPolynomial w4_poly;
};

MomentPolynomialCache build_moment_cache(const AnalysisContext& ctx, const Spectrum& spec,
                                         const PolynomialFunctional& phi, int max_m);

/// C2 with its named term breakdown: T1 = the purely quadratic block,
/// T2 = the Psi4 block, L1..L7 = the seven Psi3 terms (one per way the
/// third derivative pairs with one, two, or three independent samples).
struct ExpansionReport {
  double c0 = 0.0;
  double total = 0.0;
  std::array<double, 9> terms{};  // order matches term_names()

  static const std::array<std::string, 9>& term_names();
  double term(const std::string& name) const;
};

ExpansionReport c2_coefficient(const MomentPolynomialCache& cache, const Spectrum& spec,
                               const AnalysisContext& ctx,
                               const PolynomialFunctional& phi);

/// Coefficients of the all-orders expansion of the restricted quadratic
/// functional in powers of t = n^{-1/2}, up to t^{2N}.
struct PowerSeries {
  int order;                  // N
  std::vector<double> coeff;  // c_0 .. c_{2N}
};

PowerSeries quadratic_series(const MomentPolynomialCache& cache, const Spectrum& spec,
                             int order);

}  // namespace lapexp
