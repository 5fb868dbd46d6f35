#pragma once

#include <cstdint>
#include <vector>

#include "lapexp/common.hpp"
#include "lapexp/functional.hpp"
#include "lapexp/measure.hpp"

namespace lapexp {

/// Restriction radius for the quadratic oracle, in the reduced Euclidean norm.
struct EpsilonConfig {
  double epsilon;
  /// 0.25 x diameter of the centered support hull.
  static EpsilonConfig defaults(const DiscreteMeasure& nu0);
};

inline constexpr double kCompositionGuard = 1e8;

/// Number of weak compositions of n into `support` parts (may overflow to inf).
double composition_count(long n, int support);

/// log E[exp(n Phi(S_n/n))] by exact enumeration over compositions with
/// log-multinomial weights and a compensated, order-fixed log-sum-exp.
/// Deterministic for any worker count. Throws GuardExceededError when the
/// composition count exceeds the guard.
double exact_log_zn(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                    int workers = 0);

/// exp(exact_log_zn - n*lambda)
double exact_un(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                double lambda, int workers = 0);

/// E^{nu0}[ exp((n/2) Psi2(S_n/n, S_n/n)) ; |S_n/n| < eps ], exact.
double quadratic_restricted(const DiscreteMeasure& nu0, const Mat& psi2, long n,
                            const EpsilonConfig& eps, int workers = 0);

struct McEstimate {
  double estimate;   // of log Z_n
  double std_error;  // delta-method standard error of the log
};

/// Plain Monte Carlo fallback when the enumeration guard trips.
McEstimate mc_log_zn(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                     long samples, std::uint64_t seed);

struct FitResult {
  double limit;                 // coefficient of the constant basis function
  std::vector<double> powers;   // basis n^{-p/2}
  Vec coefficients;             // same order as powers
  double residual;              // l2 norm of the fit residual
  double coefficient_of(double power) const;
};

/// Least-squares fit of v_n against sum_j c_j n^{-p_j/2}. Requires at least
/// as many grid points as basis functions and a power-0 (constant) column.
FitResult extrapolate(const std::vector<long>& grid, const std::vector<double>& values,
                      const std::vector<double>& powers);

struct SweepRow {
  long n;
  double log_zn;
  double un;
  double rn;  // n (U_n - C0)
};

struct OracleSweep {
  std::vector<SweepRow> rows;
  FitResult rn_fit;  // limit estimates C2
  FitResult un_fit;  // its n^{-1/2} coefficient estimates C1 (expected 0)
  double c2_fit;
  double b1;
};

OracleSweep run_sweep(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                      double lambda, double c0, const std::vector<long>& grid,
                      const std::vector<double>& powers, int workers = 0);

}  // namespace lapexp
