#pragma once

#include <initializer_list>
#include <vector>

#include "lapexp/pipeline.hpp"

namespace lapexp::testing {

inline Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

inline DiscreteMeasure measure1d(std::initializer_list<double> pts,
                                 std::initializer_list<double> wts) {
  Mat p(1, static_cast<int>(pts.size()));
  int i = 0;
  for (double x : pts) p(0, i++) = x;
  return normalize(p, vec(wts));
}

/// 1-d polynomial from coefficients of x^0..x^D (as tensor orbit values).
inline PolynomialFunctional poly1d(std::initializer_list<double> coeffs) {
  std::vector<SymTensor> tensors;
  int m = 0;
  for (double c : coeffs) {
    SymTensor t(1, m);
    if (c != 0.0) t.set(std::vector<int>(m, 0), c);
    tensors.push_back(t);
    ++m;
  }
  return PolynomialFunctional(1, tensors);
}

inline ProblemFile problem1d(std::initializer_list<double> pts,
                             std::initializer_list<double> wts,
                             std::initializer_list<double> coeffs) {
  ProblemFile p;
  p.dimension = 1;
  p.points.resize(1, static_cast<int>(pts.size()));
  int i = 0;
  for (double x : pts) p.points(0, i++) = x;
  p.weights = vec(wts);
  p.weights /= p.weights.sum();
  int m = 0;
  for (double c : coeffs) {
    SymTensor t(1, m);
    if (c != 0.0) t.set(std::vector<int>(m, 0), c);
    p.tensors.push_back(t);
    ++m;
  }
  return p;
}

/// Curie-Weiss: uniform{-1,+1}, Phi = beta x^2 / 2.
inline ProblemFile curie_weiss(double beta) {
  return problem1d({-1.0, 1.0}, {0.5, 0.5}, {0.0, 0.0, beta / 2.0});
}

/// The third-order acceptance instance: {-1,0,2} w (.5,.3,.2), 0.15x^2+0.02x^3.
inline ProblemFile cubic3() {
  return problem1d({-1.0, 0.0, 2.0}, {0.5, 0.3, 0.2}, {0.0, 0.0, 0.15, 0.02});
}

}  // namespace lapexp::testing
