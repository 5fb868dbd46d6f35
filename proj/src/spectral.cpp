#include "lapexp/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <numeric>

namespace lapexp {

Spectrum eigensystem(const Mat& gamma, const Mat& psi2, double crit_tol) {
  const int r = static_cast<int>(gamma.rows());
  if (gamma.rows() != gamma.cols() || psi2.rows() != psi2.cols() ||
      psi2.rows() != gamma.rows())
    throw InputError("eigensystem: shape mismatch");
  if ((gamma - gamma.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + gamma.norm()))
    throw InputError("eigensystem: Gamma not symmetric");

  Spectrum out;
  out.crit_tol = crit_tol;
  if (r == 0) {
    out.a = Vec::Zero(0);
    out.e = Mat::Zero(0, 0);
    out.f = Mat::Zero(0, 0);
    out.c0 = 1.0;
    out.subcritical = true;
    out.critical_index = -1;
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Mat> eg(gamma);
  if (!(eg.eigenvalues().minCoeff() > 0.0))
    throw InputError("eigensystem: Gamma not positive definite");
  const Mat g_half =
      eg.eigenvectors() * eg.eigenvalues().cwiseSqrt().asDiagonal() *
      eg.eigenvectors().transpose();
  const Mat g_half_inv =
      eg.eigenvectors() * eg.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      eg.eigenvectors().transpose();

  Mat whitened = g_half * 0.5 * (psi2 + psi2.transpose()) * g_half;
  whitened = 0.5 * (whitened + whitened.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> ew(whitened);

  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  Mat v = ew.eigenvectors();
  for (int k = 0; k < r; ++k) {
    for (int i = 0; i < r; ++i) {
      if (std::abs(v(i, k)) > 1e-12) {
        if (v(i, k) < 0.0) v.col(k) = -v.col(k);
        break;
      }
    }
  }
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    const double ap = ew.eigenvalues()(p), aq = ew.eigenvalues()(q);
    if (ap != aq) return ap > aq;
    for (int i = 0; i < r; ++i) {
      if (v(i, p) != v(i, q)) return v(i, p) < v(i, q);
    }
    return false;
  });

  out.a.resize(r);
  out.e.resize(r, r);
  out.f.resize(r, r);
  for (int k = 0; k < r; ++k) {
    out.a(k) = ew.eigenvalues()(order[k]);
    out.e.col(k) = g_half_inv * v.col(order[k]);
    out.f.col(k) = g_half * v.col(order[k]);
  }

  out.critical_index = -1;
  for (int k = 0; k < r; ++k) {
    if (out.a(k) >= 1.0 - crit_tol) {
      out.critical_index = k;
      break;
    }
  }
  out.subcritical = out.critical_index < 0;

  // construction invariants: biorthogonality and the eigen-reconstruction
  const Mat gram = out.e.transpose() * gamma * out.e;
  const Mat pairing = out.e.transpose() * out.f;
  Mat recon = Mat::Zero(r, r);
  for (int k = 0; k < r; ++k)
    recon += out.a(k) * (out.e.col(k) * out.e.col(k).transpose());
  const double scale = 1.0 + psi2.norm();
  if ((gram - Mat::Identity(r, r)).lpNorm<Eigen::Infinity>() > 1e-10 ||
      (pairing - Mat::Identity(r, r)).lpNorm<Eigen::Infinity>() > 1e-10 ||
      (recon - 0.5 * (psi2 + psi2.transpose())).lpNorm<Eigen::Infinity>() > 1e-10 * scale)
    throw Error("eigensystem: basis invariants violated");

  if (out.subcritical) {
    Kahan acc;
    for (int k = 0; k < r; ++k) acc.add(std::log1p(-out.a(k)));
    out.c0 = std::exp(-0.5 * acc.value());
  } else {
    out.c0 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double leading_constant(const Spectrum& s) {
  if (!s.subcritical)
    throw CriticalityError(
        "leading_constant: eigenvalue a[" + std::to_string(s.critical_index) +
        "] = " + std::to_string(s.a(s.critical_index)) +
        " is within crit_tol of 1 (supercritical)");
  Kahan acc;
  for (int k = 0; k < s.a.size(); ++k) acc.add(std::log1p(-s.a(k)));
  return std::exp(-0.5 * acc.value());
}

}  // namespace lapexp
