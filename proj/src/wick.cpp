#include "lapexp/wick.hpp"

#include <algorithm>

namespace lapexp {

YPolynomial YPolynomial::constant(int vars, Cplx c) {
  YPolynomial p(vars);
  p.add_term(MultiIndex(vars, 0), c);
  return p;
}

YPolynomial YPolynomial::monomial(int vars, const MultiIndex& expo, Cplx c) {
  YPolynomial p(vars);
  p.add_term(expo, c);
  return p;
}

int YPolynomial::total_degree() const {
  int deg = 0;
  for (const auto& [expo, c] : terms_) {
    int d = 0;
    for (int e : expo) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

void YPolynomial::add_term(const MultiIndex& expo, Cplx c) {
  if (static_cast<int>(expo.size()) != vars_)
    throw InputError("YPolynomial: exponent length mismatch");
  int deg = 0;
  for (int e : expo) {
    if (e < 0) throw InputError("YPolynomial: negative exponent");
    deg += e;
  }
  if (deg > kMaxDegree)
    throw DegreeOverflowError("YPolynomial: total degree " + std::to_string(deg) +
                              " exceeds cap " + std::to_string(kMaxDegree));
  auto it = terms_.find(expo);
  if (it == terms_.end()) {
    if (std::abs(c) > kPrune) terms_.emplace(expo, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) <= kPrune) terms_.erase(it);
}

YPolynomial& YPolynomial::operator+=(const YPolynomial& other) {
  if (other.vars_ != vars_ && !other.terms_.empty())
    throw InputError("YPolynomial: variable count mismatch");
  for (const auto& [expo, c] : other.terms_) add_term(expo, c);
  return *this;
}

YPolynomial operator*(const YPolynomial& a, const YPolynomial& b) {
  if (a.vars_ != b.vars_) throw InputError("YPolynomial: variable count mismatch");
  YPolynomial out(a.vars_);
  MultiIndex expo(a.vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int j = 0; j < a.vars_; ++j) expo[j] = ea[j] + eb[j];
      out.add_term(expo, ca * cb);
    }
  }
  return out;
}

YPolynomial YPolynomial::scaled(Cplx s) const {
  YPolynomial out(vars_);
  if (s == Cplx(0.0, 0.0)) return out;
  for (const auto& [expo, c] : terms_) out.add_term(expo, c * s);
  return out;
}

YPolynomial YPolynomial::pow(int k) const {
  YPolynomial out = constant(vars_, 1.0);
  for (int i = 0; i < k; ++i) out = out * (*this);
  return out;
}

GaussianWeight gaussian_weight(const Spectrum& s) {
  GaussianWeight w;
  w.a = s.a;
  w.c0 = leading_constant(s);  // throws on criticality
  w.sigma2.resize(s.a.size());
  for (int k = 0; k < s.a.size(); ++k) w.sigma2(k) = 1.0 / (1.0 - s.a(k));
  return w;
}

double gaussian_moment(int m, double sigma2) {
  if (m < 0) throw InputError("gaussian_moment: negative order");
  if (m % 2 == 1) return 0.0;
  double out = 1.0;
  for (int j = 1; j < m; j += 2) out *= j;  // (m-1)!!
  for (int j = 0; j < m / 2; ++j) out *= sigma2;
  return out;
}

double gaussian_expect(const YPolynomial& p, const GaussianWeight& w) {
  if (p.vars() != w.sigma2.size() && !p.empty())
    throw InputError("gaussian_expect: mode count mismatch");
  Kahan re, im;
  for (const auto& [expo, c] : p.terms()) {
    double mom = 1.0;
    for (int k = 0; k < static_cast<int>(expo.size()); ++k) {
      if (expo[k] == 0) continue;
      if (expo[k] % 2 == 1) {
        mom = 0.0;
        break;
      }
      mom *= gaussian_moment(expo[k], w.sigma2(k));
    }
    if (mom == 0.0) continue;
    re.add(c.real() * mom);
    im.add(c.imag() * mom);
  }
  const double real = re.value();
  const double imag = im.value();
  if (std::abs(imag) > 1e-9 * (1.0 + std::abs(real)))
    throw ImaginaryResidueError(
        "gaussian_expect: imaginary residue " + std::to_string(imag) +
        " (sqrt(a_k) factors failed to cancel in pairs)");
  return w.c0 * real;
}

}  // namespace lapexp
