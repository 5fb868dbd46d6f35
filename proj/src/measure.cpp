#include "lapexp/measure.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace lapexp {

Mat DiscreteMeasure::covariance() const {
  const Vec mu = mean();
  Mat cov = Mat::Zero(dim(), dim());
  for (int i = 0; i < size(); ++i) {
    const Vec c = points.col(i) - mu;
    cov += weights(i) * (c * c.transpose());
  }
  return cov;
}

double DiscreteMeasure::hull_diameter() const {
  double diam = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      diam = std::max(diam, (points.col(i) - points.col(j)).norm());
  return diam;
}

DiscreteMeasure normalize(const Mat& raw_points, const Vec& raw_weights) {
  if (raw_points.cols() == 0) throw InputError("normalize: empty support");
  if (raw_points.cols() != raw_weights.size())
    throw InputError("normalize: points/weights size mismatch");
  double total = 0.0;
  for (int i = 0; i < raw_weights.size(); ++i) {
    if (!(raw_weights(i) >= 0.0))
      throw InputError("normalize: negative weight at index " + std::to_string(i));
    total += raw_weights(i);
  }
  if (total <= 0.0) throw InputError("normalize: weights sum to zero");

  std::vector<int> rep;           // index of first point of each merged group
  std::vector<double> merged_w;
  for (int i = 0; i < raw_points.cols(); ++i) {
    const double w = raw_weights(i) / total;
    if (w == 0.0) continue;
    bool merged = false;
    for (std::size_t g = 0; g < rep.size(); ++g) {
      if ((raw_points.col(i) - raw_points.col(rep[g])).norm() <= 1e-12) {
        merged_w[g] += w;
        merged = true;
        break;
      }
    }
    if (!merged) {
      rep.push_back(i);
      merged_w.push_back(w);
    }
  }
  if (rep.empty()) throw InputError("normalize: empty support after dropping zero weights");

  DiscreteMeasure out;
  out.points.resize(raw_points.rows(), static_cast<int>(rep.size()));
  out.weights.resize(static_cast<int>(rep.size()));
  for (std::size_t g = 0; g < rep.size(); ++g) {
    out.points.col(static_cast<int>(g)) = raw_points.col(rep[g]);
    out.weights(static_cast<int>(g)) = merged_w[g];
  }
  out.weights /= out.weights.sum();
  return out;
}

std::pair<DiscreteMeasure, ReducedFrame> affine_reduce(const DiscreteMeasure& m) {
  const Vec mu = m.mean();
  Mat centered(m.dim(), m.size());
  for (int i = 0; i < m.size(); ++i)
    centered.col(i) = std::sqrt(m.weights(i)) * (m.points.col(i) - mu);

  ReducedFrame frame;
  frame.offset = mu;
  if (m.size() == 1 || m.dim() == 0) {
    frame.basis = Mat::Zero(m.dim(), 0);
  } else {
    Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinU);
    const Vec sv = svd.singularValues();
    const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    int r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    frame.basis = svd.matrixU().leftCols(r);
  }

  DiscreteMeasure reduced;
  reduced.points.resize(frame.r(), m.size());
  for (int i = 0; i < m.size(); ++i)
    reduced.points.col(i) = frame.to_frame(m.points.col(i));
  reduced.weights = m.weights;

  if (frame.r() > 0) {
    const Mat cov = reduced.covariance();
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-10 * hi))
      throw InputError("affine_reduce: measure is numerically degenerate "
                       "(covariance eigenvalue ratio below 1e-10)");
  }
  return {reduced, frame};
}

LogMgf log_mgf(const DiscreteMeasure& m, const Vec& phi) {
  const int s = m.size();
  Vec logits(s);
  for (int i = 0; i < s; ++i)
    logits(i) = std::log(m.weights(i)) + phi.dot(m.points.col(i));
  const double top = logits.maxCoeff();
  Kahan acc;
  for (int i = 0; i < s; ++i) acc.add(std::exp(logits(i) - top));
  LogMgf out;
  out.value = top + std::log(acc.value());
  Vec tilted(s);
  for (int i = 0; i < s; ++i) tilted(i) = std::exp(logits(i) - out.value);
  out.gradient = m.points * tilted;
  out.hessian = Mat::Zero(m.dim(), m.dim());
  for (int i = 0; i < s; ++i) {
    const Vec c = m.points.col(i) - out.gradient;
    out.hessian += tilted(i) * (c * c.transpose());
  }
  return out;
}

DiscreteMeasure tilt_and_center(const DiscreteMeasure& m, const Vec& phi_star,
                                const Vec& x_star) {
  const LogMgf lm = log_mgf(m, phi_star);
  const double mismatch =
      m.dim() > 0 ? (lm.gradient - x_star).lpNorm<Eigen::Infinity>() : 0.0;
  if (mismatch > 1e-8)
    throw InputError("tilt_and_center: x_star is not the tilted mean (|mismatch| = " +
                     std::to_string(mismatch) + ")");
  DiscreteMeasure out;
  out.points.resize(m.dim(), m.size());
  out.weights.resize(m.size());
  for (int i = 0; i < m.size(); ++i) {
    // centering at the exact tilted mean keeps the output mean at rounding level
    out.points.col(i) = m.points.col(i) - lm.gradient;
    out.weights(i) =
        std::exp(std::log(m.weights(i)) + phi_star.dot(m.points.col(i)) - lm.value);
  }
  out.weights /= out.weights.sum();
  return out;
}

double dual_moment(const DiscreteMeasure& m, const std::vector<Vec>& duals) {
  Kahan acc;
  for (int i = 0; i < m.size(); ++i) {
    double term = m.weights(i);
    for (const Vec& d : duals) term *= d.dot(m.points.col(i));
    acc.add(term);
  }
  return acc.value();
}

}  // namespace lapexp
