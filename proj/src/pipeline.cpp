#include "lapexp/pipeline.hpp"

namespace lapexp {

Analysis analyze_problem(const ProblemFile& p) {
  Analysis a;
  a.ambient = normalize(p.points, p.weights);
  auto [reduced, frame] = affine_reduce(a.ambient);
  a.frame = frame;
  a.reduced = reduced;
  const PolynomialFunctional ambient_phi = p.phi();
  a.phi_reduced = ambient_phi.pullback(frame);
  a.maximizer = find_maximizer(a.reduced, a.phi_reduced, p.options.multistart,
                               p.options.seed, p.options.newton_tol);
  a.ctx = assemble_context(a.reduced, a.phi_reduced, a.maximizer);
  const Mat psi2 = a.phi_reduced.hessian(a.ctx.x_star);
  a.spectrum = eigensystem(a.ctx.gamma, psi2, p.options.crit_tol);
  a.x_star_ambient = a.frame.embed(a.ctx.x_star);
  a.phi_star_ambient = ambient_phi.gradient(a.x_star_ambient);
  a.epsilon = p.options.epsilon ? *p.options.epsilon
                                : EpsilonConfig::defaults(a.ctx.nu0).epsilon;
  return a;
}

ExpansionReport c2_report(const Analysis& a) {
  if (!a.spectrum.subcritical) leading_constant(a.spectrum);  // throws with the index
  const MomentPolynomialCache cache =
      build_moment_cache(a.ctx, a.spectrum, a.phi_reduced, 4);
  return c2_coefficient(cache, a.spectrum, a.ctx, a.phi_reduced);
}

PowerSeries series_report(const Analysis& a, int order) {
  if (!a.spectrum.subcritical) leading_constant(a.spectrum);
  const MomentPolynomialCache cache =
      build_moment_cache(a.ctx, a.spectrum, a.phi_reduced,
                         std::max(2, 2 * order + 2));
  return quadratic_series(cache, a.spectrum, order);
}

}  // namespace lapexp
