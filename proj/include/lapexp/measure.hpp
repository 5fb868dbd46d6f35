#pragma once

#include <utility>
#include <vector>

#include "lapexp/common.hpp"

namespace lapexp {

/// Finite-support probability measure on R^d. Support points are the columns
/// of `points`; weights are strictly positive and sum to one.
struct DiscreteMeasure {
  Mat points;   // d x s
  Vec weights;  // s

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
  Vec mean() const { return points * weights; }
  Mat covariance() const;
  /// Largest pairwise distance between support points.
  double hull_diameter() const;
};

/// Orthonormal affine frame spanning the measure's hull: x = offset + basis*y.
struct ReducedFrame {
  Vec offset;  // d
  Mat basis;   // d x r, orthonormal columns

  int r() const { return static_cast<int>(basis.cols()); }
  Vec embed(const Vec& y) const { return offset + basis * y; }
  Vec to_frame(const Vec& x) const { return basis.transpose() * (x - offset); }
};

struct LogMgf {
  double value;  // log M(phi)
  Vec gradient;  // tilted mean
  Mat hessian;   // tilted covariance
};

/// Rescales weights to sum one, drops zero-weight points, merges duplicate
/// points (distance <= 1e-12) by weight addition.
DiscreteMeasure normalize(const Mat& raw_points, const Vec& raw_weights);

/// Reduces to coordinates on the smallest affine subspace containing the
/// support, so the reduced covariance is strictly positive definite.
std::pair<DiscreteMeasure, ReducedFrame> affine_reduce(const DiscreteMeasure& m);

/// Log-MGF with gradient and Hessian, evaluated in log-space.
LogMgf log_mgf(const DiscreteMeasure& m, const Vec& phi);

/// The centered tilted measure nu0: weights q_i ~ p_i exp(phi_star . x_i),
/// points recentered to mean zero. `x_star` must equal the tilted mean to
/// 1e-8 (fixed-point contract); the recentering uses the exact tilted mean.
DiscreteMeasure tilt_and_center(const DiscreteMeasure& m, const Vec& phi_star,
                                const Vec& x_star);

/// sum_i q_i prod_j (d_j . x_i)
double dual_moment(const DiscreteMeasure& m, const std::vector<Vec>& duals);

}  // namespace lapexp
