#pragma once

#include <map>
#include <vector>

#include "lapexp/common.hpp"
#include "lapexp/spectral.hpp"

namespace lapexp {

using MultiIndex = std::vector<int>;  // exponent per eigencoordinate

/// Sparse polynomial in the eigencoordinates y_k = e_k(Y), with complex
/// coefficients (the sqrt(a_k) factors of negative modes are imaginary).
class YPolynomial {
 public:
  static constexpr int kMaxDegree = 12;
  static constexpr double kPrune = 1e-300;

  explicit YPolynomial(int vars = 0) : vars_(vars) {}
  static YPolynomial constant(int vars, Cplx c);
  static YPolynomial monomial(int vars, const MultiIndex& expo, Cplx c);

  int vars() const { return vars_; }
  bool empty() const { return terms_.empty(); }
  int total_degree() const;
  const std::map<MultiIndex, Cplx>& terms() const { return terms_; }

  void add_term(const MultiIndex& expo, Cplx c);

  YPolynomial& operator+=(const YPolynomial& other);
  friend YPolynomial operator+(YPolynomial a, const YPolynomial& b) { return a += b; }
  friend YPolynomial operator*(const YPolynomial& a, const YPolynomial& b);
  YPolynomial scaled(Cplx s) const;
  YPolynomial pow(int k) const;

 private:
  int vars_;
  std::map<MultiIndex, Cplx> terms_;
};

/// Per-coordinate tilted variances sigma_k^2 = 1/(1 - a_k) with the
/// normalization C0 (identity (3.3): change of Gaussian covariance).
struct GaussianWeight {
  Vec a;
  Vec sigma2;
  double c0;
};

GaussianWeight gaussian_weight(const Spectrum& s);

/// (m-1)!! sigma^m for even m, 0 for odd m.
double gaussian_moment(int m, double sigma2);

/// E^Y[ e^{Psi2(Y,Y)/2} P(y) ] = C0 * E[P(ytilde)], ytilde_k ~ N(0, sigma_k^2)
/// independent. Asserts the imaginary residue is below 1e-9*(1+|real|).
double gaussian_expect(const YPolynomial& p, const GaussianWeight& w);

}  // namespace lapexp
