#include "lapexp/expansion.hpp"

#include <algorithm>
#include <functional>

namespace lapexp {
namespace {

double factorial(int n) {
  double out = 1.0;
  for (int j = 2; j <= n; ++j) out *= j;
  return out;
}

Cplx complex_sqrt(double a) {
  return a >= 0.0 ? Cplx(std::sqrt(a), 0.0) : Cplx(0.0, std::sqrt(-a));
}

// non-decreasing tuples of `length` over the given alphabet
void visit_tuples(const std::vector<int>& alphabet, int length,
                  const std::function<void(const std::vector<int>&)>& fn) {
  if (length == 0) return;
  if (alphabet.empty()) return;
  std::vector<int> pos(length, 0);  // positions into alphabet
  std::vector<int> tup(length);
  const int n = static_cast<int>(alphabet.size());
  while (true) {
    for (int j = 0; j < length; ++j) tup[j] = alphabet[pos[j]];
    fn(tup);
    int p = length - 1;
    while (p >= 0 && pos[p] == n - 1) --p;
    if (p < 0) break;
    const int v = pos[p] + 1;
    for (int j = p; j < length; ++j) pos[j] = v;
  }
}

}  // namespace

MomentPolynomialCache build_moment_cache(const AnalysisContext& ctx, const Spectrum& spec,
                                         const PolynomialFunctional& phi, int max_m) {
  const int r = static_cast<int>(spec.a.size());
  const int s = ctx.nu0.size();
  MomentPolynomialCache cache;
  cache.modes = r;
  cache.max_m = max_m;

  // E(k, i) = e_k(x_i) over the centered tilted support
  Mat E(r, s);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < s; ++i) E(k, i) = spec.e.col(k).dot(ctx.nu0.points.col(i));

  std::vector<int> nz;  // modes with a_k != 0 (others carry sqrt(a_k) = 0)
  for (int k = 0; k < r; ++k)
    if (std::abs(spec.a(k)) > 1e-14) nz.push_back(k);
  std::vector<Cplx> sqa(r);
  for (int k = 0; k < r; ++k) sqa[k] = complex_sqrt(spec.a(k));

  cache.A.assign(max_m + 1, YPolynomial(r));
  MultiIndex expo(r);
  for (int m = 2; m <= max_m; ++m) {
    YPolynomial am(r);
    visit_tuples(nz, m, [&](const std::vector<int>& tup) {
      Kahan mom;
      for (int i = 0; i < s; ++i) {
        double t = ctx.nu0.weights(i);
        for (int k : tup) t *= E(k, i);
        mom.add(t);
      }
      Cplx coef(SymTensor::orbit_multiplicity(tup) * mom.value(), 0.0);
      for (int k : tup) coef *= sqa[k];
      std::fill(expo.begin(), expo.end(), 0);
      for (int k : tup) expo[k]++;
      am.add_term(expo, coef);
    });
    cache.A[m] = am;
  }

  // invariant: A2(y) = sum_k a_k y_k^2 (e_k are nu0-orthonormal)
  if (max_m >= 2) {
    YPolynomial gap = cache.A[2];
    for (int k = 0; k < r; ++k) {
      if (std::abs(spec.a(k)) <= 1e-14) continue;
      std::fill(expo.begin(), expo.end(), 0);
      expo[k] = 2;
      gap.add_term(expo, Cplx(-spec.a(k), 0.0));
    }
    for (const auto& [e_, c] : gap.terms())
      if (std::abs(c) > 1e-10)
        throw Error("build_moment_cache: A2 does not reduce to sum a_k y_k^2");
  }

  // W3, W4: derivative tensors at x* contracted against the primal basis
  const SymTensor t3 = phi.derivative_tensor(ctx.x_star, 3);
  const SymTensor t4 = phi.derivative_tensor(ctx.x_star, 4);
  cache.w3 = SymTensor(r, 3);
  cache.w4 = SymTensor(r, 4);
  std::vector<int> all(r);
  for (int k = 0; k < r; ++k) all[k] = k;
  std::vector<Vec> args;
  visit_tuples(all, 3, [&](const std::vector<int>& tup) {
    args = {spec.f.col(tup[0]), spec.f.col(tup[1]), spec.f.col(tup[2])};
    const double v = t3.contract(args);
    if (v != 0.0) cache.w3.set(tup, v);
  });
  visit_tuples(all, 4, [&](const std::vector<int>& tup) {
    args = {spec.f.col(tup[0]), spec.f.col(tup[1]), spec.f.col(tup[2]),
            spec.f.col(tup[3])};
    const double v = t4.contract(args);
    if (v != 0.0) cache.w4.set(tup, v);
  });

  cache.w3_poly = YPolynomial(r);
  for (const auto& [idx, val] : cache.w3.entries()) {
    std::fill(expo.begin(), expo.end(), 0);
    for (int k : idx) expo[k]++;
    cache.w3_poly.add_term(expo, Cplx(val * SymTensor::orbit_multiplicity(idx), 0.0));
  }
  cache.w4_poly = YPolynomial(r);
  for (const auto& [idx, val] : cache.w4.entries()) {
    std::fill(expo.begin(), expo.end(), 0);
    for (int k : idx) expo[k]++;
    cache.w4_poly.add_term(expo, Cplx(val * SymTensor::orbit_multiplicity(idx), 0.0));
  }
  return cache;
}

const std::array<std::string, 9>& ExpansionReport::term_names() {
  static const std::array<std::string, 9> names = {
      "T1_quadratic_block", "T2_psi4", "L1_psi3_squared", "L2_psi3_diag",
      "L3", "L4", "L5", "L6", "L7"};
  return names;
}

double ExpansionReport::term(const std::string& name) const {
  const auto& names = term_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return terms[i];
  throw InputError("ExpansionReport: unknown term " + name);
}

ExpansionReport c2_coefficient(const MomentPolynomialCache& cache, const Spectrum& spec,
                               const AnalysisContext& ctx,
                               const PolynomialFunctional& phi) {
  const int r = cache.modes;
  const int s = ctx.nu0.size();
  const GaussianWeight w = gaussian_weight(spec);

  // Q = Psi2(Y,Y) = sum a_k y_k^2
  YPolynomial q(r);
  MultiIndex expo(r, 0);
  for (int k = 0; k < r; ++k) {
    if (spec.a(k) == 0.0) continue;
    std::fill(expo.begin(), expo.end(), 0);
    expo[k] = 2;
    q.add_term(expo, Cplx(spec.a(k), 0.0));
  }

  Mat E(r, s);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < s; ++i) E(k, i) = spec.e.col(k).dot(ctx.nu0.points.col(i));
  std::vector<int> nz;
  for (int k = 0; k < r; ++k)
    if (std::abs(spec.a(k)) > 1e-14) nz.push_back(k);
  std::vector<Cplx> sqa(r);
  for (int k = 0; k < r; ++k) sqa[k] = complex_sqrt(spec.a(k));

  const SymTensor t3 = phi.derivative_tensor(ctx.x_star, 3);
  const Vec& qw = ctx.nu0.weights;
  const Mat& pts = ctx.nu0.points;

  // psi3_pair(i, j) = Psi3(x_i, x_j, x_j); cbar(i) = E_j[Psi3(x_i, X, X)]
  Mat psi3_pair(s, s);
  std::vector<Vec> args3(3);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      args3 = {pts.col(i), pts.col(j), pts.col(j)};
      psi3_pair(i, j) = t3.contract(args3);
    }
  Vec cbar = psi3_pair * qw;

  ExpansionReport rep;
  rep.c0 = w.c0;

  // T1: purely quadratic block, E[e^{Q/2}(-Q^2/8 + (A3/3!)^2/2 + A4/4!)]
  {
    YPolynomial p = (q * q).scaled(-0.125);
    p += (cache.A[3] * cache.A[3]).scaled(0.5 / 36.0);
    p += cache.A[4].scaled(1.0 / 24.0);
    rep.terms[0] = gaussian_expect(p, w);
  }
  // T2: (1/4!) E[e^{Q/2} Psi4(Y,Y,Y,Y)]
  rep.terms[1] = gaussian_expect(cache.w4_poly.scaled(1.0 / 24.0), w);
  // L1: (1/(2*3!^2)) E[e^{Q/2} Psi3(Y,Y,Y)^2]
  rep.terms[2] = gaussian_expect((cache.w3_poly * cache.w3_poly).scaled(1.0 / 72.0), w);
  // L2: (1/3!) C0 E[Psi3(X,X,X)]
  {
    Kahan diag;
    for (int i = 0; i < s; ++i) {
      args3 = {pts.col(i), pts.col(i), pts.col(i)};
      diag.add(qw(i) * t3.contract(args3));
    }
    rep.terms[3] = w.c0 * diag.value() / 6.0;
  }
  // L3: (1/(2*3!)) E[e^{Q/2} A3(y) B1(y)], B1 = sum_k sqa_k y_k E[e_k(X) cbar(X)]
  {
    YPolynomial b1(r);
    for (int k : nz) {
      Kahan v;
      for (int i = 0; i < s; ++i) v.add(qw(i) * E(k, i) * cbar(i));
      std::fill(expo.begin(), expo.end(), 0);
      expo[k] = 1;
      b1.add_term(expo, sqa[k] * v.value());
    }
    rep.terms[4] = gaussian_expect((cache.A[3] * b1).scaled(1.0 / 12.0), w);
  }
  // L4: (1/2) E[e^{Q/2} E^{x2}[ (X1,Y)(X2,Y) Psi3(X1,X2,X2) ]]
  {
    YPolynomial p(r);
    for (int k : nz)
      for (int l : nz) {
        Kahan v;
        for (int i = 0; i < s; ++i) {
          Kahan inner;
          for (int j = 0; j < s; ++j) inner.add(qw(j) * E(l, j) * psi3_pair(i, j));
          v.add(qw(i) * E(k, i) * inner.value());
        }
        std::fill(expo.begin(), expo.end(), 0);
        expo[k]++;
        expo[l]++;
        p.add_term(expo, sqa[k] * sqa[l] * v.value());
      }
    rep.terms[5] = gaussian_expect(p.scaled(0.5), w);
  }
  // L5: (1/4) E[e^{Q/2} E^{x2}[ (X1,Y)^2 Psi3(X1,X2,X2) ]]
  {
    YPolynomial p(r);
    for (int k : nz)
      for (int l : nz) {
        Kahan v;
        for (int i = 0; i < s; ++i) v.add(qw(i) * E(k, i) * E(l, i) * cbar(i));
        std::fill(expo.begin(), expo.end(), 0);
        expo[k]++;
        expo[l]++;
        p.add_term(expo, sqa[k] * sqa[l] * v.value());
      }
    rep.terms[6] = gaussian_expect(p.scaled(0.25), w);
  }
  // iota(e_k) = E[e_k(X) X]
  Mat mk(ctx.nu0.dim(), r);
  for (int k = 0; k < r; ++k) {
    Vec acc = Vec::Zero(ctx.nu0.dim());
    for (int i = 0; i < s; ++i) acc += qw(i) * E(k, i) * pts.col(i);
    mk.col(k) = acc;
  }
  // L6: (1/3!^2) E[e^{Q/2} A3(y) D3(y)], D3 from E^{x3}[prod (Xi,Y) Psi3(X1,X2,X3)]
  {
    YPolynomial d3(r);
    for (int k1 : nz)
      for (int k2 : nz)
        for (int k3 : nz) {
          args3 = {mk.col(k1), mk.col(k2), mk.col(k3)};
          const double v = t3.contract(args3);
          std::fill(expo.begin(), expo.end(), 0);
          expo[k1]++;
          expo[k2]++;
          expo[k3]++;
          d3.add_term(expo, sqa[k1] * sqa[k2] * sqa[k3] * v);
        }
    rep.terms[7] = gaussian_expect((cache.A[3] * d3).scaled(1.0 / 36.0), w);
  }
  // L7: (1/4) E[e^{Q/2} E^{x3}[ (X1,Y)(X2,Y)(X3,Y)^2 Psi3(X1,X2,X3) ]]
  // coefficient 1/4: the Taylor term (1/4!)(u1+u2+u3)^4 carries u1 u2 u3^2
  // with weight 1/2, times 3 symmetric placements, times the outer 1/3!
  {
    // pair_contr(k1*r+k2, l) = Psi3(iota_k1, iota_k2, x_l)
    Mat pair_contr(r * r, s);
    for (int k1 : nz)
      for (int k2 : nz)
        for (int l = 0; l < s; ++l) {
          args3 = {mk.col(k1), mk.col(k2), pts.col(l)};
          pair_contr(k1 * r + k2, l) = t3.contract(args3);
        }
    YPolynomial p(r);
    for (int k1 : nz)
      for (int k2 : nz)
        for (int k3 : nz)
          for (int k4 : nz) {
            Kahan v;
            for (int l = 0; l < s; ++l)
              v.add(qw(l) * E(k3, l) * E(k4, l) * pair_contr(k1 * r + k2, l));
            std::fill(expo.begin(), expo.end(), 0);
            expo[k1]++;
            expo[k2]++;
            expo[k3]++;
            expo[k4]++;
            p.add_term(expo, sqa[k1] * sqa[k2] * sqa[k3] * sqa[k4] * v.value());
          }
    rep.terms[8] = gaussian_expect(p.scaled(0.25), w);
  }

  Kahan total;
  for (double t : rep.terms) total.add(t);
  rep.total = total.value();
  return rep;
}

PowerSeries quadratic_series(const MomentPolynomialCache& cache, const Spectrum& spec,
                             int order) {
  if (order < 0) throw InputError("quadratic_series: negative order");
  const int r = cache.modes;
  const GaussianWeight w = gaussian_weight(spec);
  const int top = 2 * order;  // truncation degree in t = n^{-1/2}

  PowerSeries out;
  out.order = order;
  out.coeff.assign(top + 1, 0.0);
  out.coeff[0] = w.c0;
  if (order == 0) return out;
  if (cache.max_m < 2 * order + 2)
    throw InputError("quadratic_series: cache built with max_m < 2N+2");

  using TSeries = std::vector<YPolynomial>;  // index = power of t
  auto make = [&](int len) { return TSeries(static_cast<std::size_t>(len), YPolynomial(r)); };
  auto mul = [&](const TSeries& x, const TSeries& y, int cap) {
    TSeries z = make(cap + 1);
    for (int i = 0; i <= cap; ++i) {
      if (x[i].empty()) continue;
      for (int j = 0; i + j <= cap; ++j) {
        if (y[j].empty()) continue;
        z[i + j] += x[i] * y[j];
      }
    }
    return z;
  };

  // S(t) = sum_{m=3}^{2N+2} t^{m-2} A_m/m!  +  t^{-2} * log-correction
  TSeries s_series = make(top + 1);
  for (int m = 3; m <= 2 * order + 2; ++m) {
    if (m - 2 <= top) s_series[m - 2] += cache.A[m].scaled(1.0 / factorial(m));
  }
  // The log-correction's inner sum runs to 2N+2 (not the printed N+1): the
  // dropped cross terms are genuinely of order n^{-N} for N >= 2.
  TSeries inner = make(top + 3);
  for (int m = 2; m <= 2 * order + 2; ++m) {
    if (m <= top + 2) inner[m] += cache.A[m].scaled(1.0 / factorial(m));
  }
  TSeries inner_pow = inner;
  for (int j = 2; j <= order + 1; ++j) {
    inner_pow = mul(inner_pow, inner, top + 2);
    const double sign = (j % 2 == 0 ? -1.0 : 1.0) / j;
    for (int deg = 2; deg <= top + 2; ++deg) {
      if (!inner_pow[deg].empty()) s_series[deg - 2] += inner_pow[deg].scaled(sign);
    }
  }

  // bracket = 1 + sum_{l=1}^{2N} S^l / l!
  TSeries bracket = make(top + 1);
  bracket[0] = YPolynomial::constant(r, 1.0);
  TSeries s_pow = make(top + 1);
  s_pow[0] = YPolynomial::constant(r, 1.0);
  for (int l = 1; l <= 2 * order; ++l) {
    s_pow = mul(s_pow, s_series, top);
    const double inv = 1.0 / factorial(l);
    for (int deg = 0; deg <= top; ++deg)
      if (!s_pow[deg].empty()) bracket[deg] += s_pow[deg].scaled(inv);
  }

  for (int deg = 0; deg <= top; ++deg)
    out.coeff[deg] = bracket[deg].empty() ? 0.0 : gaussian_expect(bracket[deg], w);
  return out;
}

}  // namespace lapexp
