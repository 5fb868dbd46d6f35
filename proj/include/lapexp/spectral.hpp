#pragma once

#include "lapexp/common.hpp"

namespace lapexp {

/// Eigensystem of Psi2 in the H geometry induced by Gamma: eigenvalues a_k of
/// Gamma^{1/2} Psi2 Gamma^{1/2}, dual basis e_k = Gamma^{-1/2} v_k (orthonormal
/// under Gamma), primal basis f_k = Gamma^{1/2} v_k.
struct Spectrum {
  Vec a;   // descending
  Mat e;   // column k = e_k
  Mat f;   // column k = f_k
  double c0;  // NaN when supercritical
  bool subcritical;  // every a_k < 1 - crit_tol
  int critical_index;  // first k with a_k >= 1 - crit_tol, else -1
  double crit_tol;
};

/// Solves the symmetric eigenproblem; checks criticality without
/// throwing (the caller decides how to surface a criticality failure).
Spectrum eigensystem(const Mat& gamma, const Mat& psi2, double crit_tol = 1e-6);

/// C0 = prod_k (1 - a_k)^{-1/2}, as exp(-1/2 sum log(1 - a_k)). Throws
/// CriticalityError naming the offending index on a supercritical spectrum.
double leading_constant(const Spectrum& s);

}  // namespace lapexp
