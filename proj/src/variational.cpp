#include "lapexp/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace lapexp {
namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace

EntropyResult entropy(const DiscreteMeasure& m, const Vec& x, double tol) {
  const int d = m.dim();
  Vec phi = Vec::Zero(d);
  if (d == 0) return {0.0, phi};

  // damped Newton on F(phi) = x - grad Lambda(phi); the line search accepts
  // on residual decrease (an objective-based search plateaus at sqrt(eps))
  double resid = (x - log_mgf(m, phi).gradient).norm();
  for (int iter = 0; iter < 500 && resid > 0.0; ++iter) {
    const LogMgf lm = log_mgf(m, phi);
    const Vec grad = x - lm.gradient;
    Vec step = lm.hessian.ldlt().solve(grad);
    if (!step.allFinite()) step = grad;  // Hessian ill-conditioned near the boundary
    double t = 1.0;
    bool moved = false;
    while (t > 1e-18) {
      const Vec cand = phi + t * step;
      const double cand_resid = (x - log_mgf(m, cand).gradient).norm();
      if (cand_resid < resid) {
        phi = cand;
        resid = cand_resid;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved || phi.norm() > 1e12) break;
  }
  const LogMgf lm = log_mgf(m, phi);
  const double gap = (x - lm.gradient).lpNorm<Eigen::Infinity>();
  if (gap > tol)
    throw VariationalError(
        "entropy: dual solve diverged; x is outside or on the boundary of the "
        "support hull (residual " + std::to_string(gap) + ")");
  // at a hull face the tilted measure collapses onto the face: the dual
  // problem has no finite maximizer even though the residual saturates
  double min_tilted = 1.0;
  for (int i = 0; i < m.size(); ++i)
    min_tilted = std::min(
        min_tilted, std::exp(std::log(m.weights(i)) + phi.dot(m.points.col(i)) - lm.value));
  if (min_tilted < 1e-15)
    throw VariationalError(
        "entropy: x lies on (or rounding-close to) the boundary of the support "
        "hull; the dual maximizer is unbounded");
  return {phi.dot(x) - lm.value, phi};
}

MaximizerResult find_maximizer(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                               int multistart, std::uint64_t seed, double newton_tol) {
  const int d = m.dim();
  if (phi.dim() != d) throw InputError("find_maximizer: dimension mismatch");

  MaximizerResult out;
  if (d == 0) {
    out.x_star = Vec::Zero(0);
    out.phi_star = Vec::Zero(0);
    out.lambda = phi.eval(out.x_star);
    out.roots.push_back({out.x_star, out.lambda});
    out.unique_max_heuristic = true;
    return out;
  }

  std::vector<Vec> starts;
  for (int i = 0; i < m.size(); ++i) starts.push_back(m.points.col(i));
  starts.push_back(m.mean());
  Rng rng(seed ^ 0x5ca1ab1e);
  for (int k = 0; k < multistart; ++k) {
    Vec w(m.size());
    for (int i = 0; i < m.size(); ++i) w(i) = -std::log(rng.uniform());
    w /= w.sum();
    starts.push_back(m.points * w);
  }

  auto residual = [&](const Vec& x) -> Vec {
    return log_mgf(m, phi.gradient(x)).gradient - x;
  };

  std::vector<Vec> roots;
  for (const Vec& x0 : starts) {
    Vec x = x0;
    Vec F = residual(x);
    double nF = F.norm();
    // iterate to stall rather than to tolerance: degenerate (cubic-flat)
    // roots keep contracting well past the tolerance, which sharpens the
    // root location used by the near-tie collision rule
    for (int iter = 0; iter < 200 && nF > 0.0; ++iter) {
      const LogMgf lm = log_mgf(m, phi.gradient(x));
      const Mat J = lm.hessian * phi.hessian(x) - Mat::Identity(d, d);
      Vec step = J.partialPivLu().solve(-F);
      if (!step.allFinite()) break;
      double t = 1.0;
      bool moved = false;
      while (t > 1e-18) {
        const Vec cand = x + t * step;
        const Vec Fc = residual(cand);
        if (Fc.norm() < nF) {
          x = cand;
          F = Fc;
          nF = F.norm();
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    if (nF > newton_tol) continue;
    bool duplicate = false;
    for (const Vec& r : roots)
      if ((r - x).lpNorm<Eigen::Infinity>() <= 1e-7) {
        duplicate = true;
        break;
      }
    if (!duplicate) roots.push_back(x);
  }
  if (roots.empty())
    throw VariationalError("find_maximizer: no fixed-point root converged");

  // value via the dual identity h(x) = DPhi(x).x - Lambda(DPhi(x)), exact at roots
  std::vector<Root> scored;
  for (const Vec& x : roots) {
    const Vec g = phi.gradient(x);
    const double h = g.dot(x) - log_mgf(m, g).value;
    scored.push_back({x, phi.eval(x) - h});
  }
  std::sort(scored.begin(), scored.end(), [](const Root& a, const Root& b) {
    if (a.value != b.value) return a.value > b.value;
    return lex_less(a.x, b.x);
  });
  // determinism: among near-equal values at the same location keep lexicographic order
  const Root& best = scored.front();
  for (std::size_t i = 1; i < scored.size(); ++i) {
    if (std::abs(scored[i].value - best.value) <= 1e-8 &&
        (scored[i].x - best.x).norm() > 1e-4)
      throw VariationalError(
          "find_maximizer: two maximizers with equal value at distinct points "
          "(degenerate maximum; out of scope)");
  }

  // a boundary vertex beating every interior root means the maximum is not
  // an interior fixed point; boundary maximizers are out of scope
  for (int i = 0; i < m.size(); ++i) {
    const double vertex_value = phi.eval(m.points.col(i)) + std::log(m.weights(i));
    if (vertex_value > best.value + 1e-10)
      throw VariationalError(
          "find_maximizer: Phi - h is maximized on the hull boundary "
          "(support point " + std::to_string(i) + "); out of scope");
  }

  out.x_star = best.x;
  out.phi_star = phi.gradient(best.x);
  out.lambda = best.value;
  out.roots = scored;
  out.unique_max_heuristic =
      scored.size() == 1 || scored[1].value < best.value - 1e-8 ||
      (scored[1].x - best.x).norm() <= 1e-4;
  return out;
}

AnalysisContext assemble_context(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                                 const MaximizerResult& mr) {
  AnalysisContext ctx;
  ctx.x_star = mr.x_star;
  ctx.phi_star = mr.phi_star;
  ctx.lambda = mr.lambda;
  ctx.unique_max_heuristic = mr.unique_max_heuristic;
  ctx.roots_found = static_cast<int>(mr.roots.size());

  const LogMgf lm = log_mgf(m, ctx.phi_star);
  if (m.dim() > 0 && (lm.gradient - ctx.x_star).norm() > 1e-9)
    throw Error("assemble_context: fixed-point identity violated");

  const double h_dual = ctx.phi_star.dot(ctx.x_star) - lm.value;
  if (std::abs(phi.eval(ctx.x_star) - h_dual - ctx.lambda) > 1e-9 * (1.0 + std::abs(ctx.lambda)))
    throw Error("assemble_context: lambda does not match Phi(x*) - h(x*)");
  if (m.dim() > 0) {
    const EntropyResult er = entropy(m, ctx.x_star);
    ctx.h_two_way_gap = std::abs(er.h - h_dual);
  } else {
    ctx.h_two_way_gap = 0.0;
  }
  if (ctx.h_two_way_gap > 1e-9)
    throw Error("assemble_context: entropy evaluated two ways disagrees");

  ctx.nu0 = tilt_and_center(m, ctx.phi_star, ctx.x_star);
  ctx.gamma = Mat::Zero(m.dim(), m.dim());
  for (int i = 0; i < ctx.nu0.size(); ++i)
    ctx.gamma += ctx.nu0.weights(i) *
                 (ctx.nu0.points.col(i) * ctx.nu0.points.col(i).transpose());
  ctx.gamma = 0.5 * (ctx.gamma + ctx.gamma.transpose()).eval();

  if (m.dim() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(ctx.gamma);
    if (!(es.eigenvalues().minCoeff() > 1e-10 * es.eigenvalues().maxCoeff()))
      throw Error("assemble_context: covariance of nu0 is not positive definite");
  }
  return ctx;
}

}  // namespace lapexp
