#include "lapexp/oracle.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace lapexp {
namespace {

struct EvalPlan {
  // flattened monomials for the hot enumeration loop
  std::vector<double> coeff;
  std::vector<std::vector<int>> expo;
  int dim;

  explicit EvalPlan(const PolynomialFunctional& phi) : dim(phi.dim()) {
    for (const auto& [e, c] : phi.monomials()) {
      coeff.push_back(c);
      expo.push_back(e);
    }
  }
  double eval(const double* x) const {
    double total = 0.0;
    for (std::size_t t = 0; t < coeff.size(); ++t) {
      double term = coeff[t];
      const std::vector<int>& e = expo[t];
      for (int j = 0; j < dim; ++j)
        for (int rep = 0; rep < e[j]; ++rep) term *= x[j];
      total += term;
    }
    return total;
  }
};

int resolve_workers(int workers, long chunk_count) {
  if (workers <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    workers = hc == 0 ? 1 : static_cast<int>(std::min(hc, 8u));
  }
  return static_cast<int>(std::min<long>(workers, std::max<long>(chunk_count, 1)));
}

void check_guard(long n, int s) {
  if (n < 1) throw InputError("oracle: n must be >= 1");
  const double count = composition_count(n, s);
  if (!(count <= kCompositionGuard))
    throw GuardExceededError(
        "oracle: composition count " + std::to_string(count) + " exceeds guard " +
        std::to_string(kCompositionGuard) + "; use the Monte Carlo path (--mc)");
}

// Enumerates weak compositions of n into s parts, chunked by the first
// coordinate. Each worker owns whole chunks (atomic take); per-chunk term
// order is fixed and chunks merge in ascending order, so any worker count
// produces the same bits. `body(counts, chunk_acc)` evaluates one composition.
void enumerate_compositions(
    int s, long n, int workers,
    const std::function<void(const std::vector<long>&, LogSumExp&)>& body,
    std::vector<LogSumExp>& chunks) {
  chunks.assign(static_cast<std::size_t>(n) + 1, LogSumExp());
  std::atomic<long> next{0};
  auto worker = [&]() {
    std::vector<long> counts(s, 0);
    for (;;) {
      const long k0 = next.fetch_add(1);
      if (k0 > n) break;
      LogSumExp& acc = chunks[static_cast<std::size_t>(k0)];
      counts[0] = k0;
      if (s == 1) {
        if (k0 == n) body(counts, acc);
        continue;
      }
      std::function<void(int, long)> rec = [&](int c, long left) {
        if (c == s - 1) {
          counts[c] = left;
          body(counts, acc);
          return;
        }
        for (long k = 0; k <= left; ++k) {
          counts[c] = k;
          rec(c + 1, left - k);
        }
      };
      rec(1, n - k0);
    }
  };
  const int w = resolve_workers(workers, n + 1);
  if (w <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::vector<double> make_lgamma_table(long n) {
  std::vector<double> table(static_cast<std::size_t>(n) + 2);
  for (long k = 0; k <= n + 1; ++k)
    table[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k));
  return table;
}

}  // namespace

EpsilonConfig EpsilonConfig::defaults(const DiscreteMeasure& nu0) {
  const double diam = nu0.hull_diameter();
  EpsilonConfig cfg{0.25 * diam};
  if (!(cfg.epsilon > 0.0)) cfg.epsilon = 1.0;  // point mass: any radius works
  return cfg;
}

double composition_count(long n, int support) {
  // C(n + s - 1, s - 1)
  return std::exp(std::lgamma(static_cast<double>(n + support)) -
                  std::lgamma(static_cast<double>(n + 1)) -
                  std::lgamma(static_cast<double>(support)));
}

double exact_log_zn(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                    int workers) {
  const int s = m.size();
  const int d = m.dim();
  check_guard(n, s);
  if (phi.dim() != d) throw InputError("exact_log_zn: dimension mismatch");

  const std::vector<double> lg = make_lgamma_table(n);
  Vec logw(s);
  for (int i = 0; i < s; ++i) logw(i) = std::log(m.weights(i));
  const EvalPlan plan(phi);
  const double lg_n1 = lg[static_cast<std::size_t>(n + 1)];

  std::vector<LogSumExp> chunks;
  enumerate_compositions(
      s, n, workers,
      [&](const std::vector<long>& counts, LogSumExp& acc) {
        thread_local std::vector<double> mean;
        if (mean.size() < static_cast<std::size_t>(std::max(d, 1)))
          mean.resize(static_cast<std::size_t>(std::max(d, 1)));
        double lw = lg_n1;
        for (int i = 0; i < s; ++i) {
          lw -= lg[static_cast<std::size_t>(counts[i] + 1)];
          lw += static_cast<double>(counts[i]) * logw(i);
        }
        for (int j = 0; j < d; ++j) {
          double a = 0.0;
          for (int i = 0; i < s; ++i)
            a += static_cast<double>(counts[i]) * m.points(j, i);
          mean[static_cast<std::size_t>(j)] = a / static_cast<double>(n);
        }
        acc.add(lw + static_cast<double>(n) * plan.eval(mean.data()));
      },
      chunks);
  LogSumExp total;
  for (const LogSumExp& c : chunks) total.merge(c);
  return total.value();
}

double exact_un(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                double lambda, int workers) {
  return std::exp(exact_log_zn(m, phi, n, workers) - static_cast<double>(n) * lambda);
}

double quadratic_restricted(const DiscreteMeasure& nu0, const Mat& psi2, long n,
                            const EpsilonConfig& eps, int workers) {
  const int s = nu0.size();
  const int d = nu0.dim();
  check_guard(n, s);
  if (!(eps.epsilon > 0.0)) throw InputError("quadratic_restricted: epsilon must be > 0");
  if (psi2.rows() != d || psi2.cols() != d)
    throw InputError("quadratic_restricted: Psi2 dimension mismatch");

  const std::vector<double> lg = make_lgamma_table(n);
  Vec logw(s);
  for (int i = 0; i < s; ++i) logw(i) = std::log(nu0.weights(i));
  const double lg_n1 = lg[static_cast<std::size_t>(n + 1)];

  std::vector<LogSumExp> chunks;
  enumerate_compositions(
      s, n, workers,
      [&](const std::vector<long>& counts, LogSumExp& acc) {
        thread_local Vec mean;
        mean.resize(d);
        for (int j = 0; j < d; ++j) {
          double a = 0.0;
          for (int i = 0; i < s; ++i)
            a += static_cast<double>(counts[i]) * nu0.points(j, i);
          mean(j) = a / static_cast<double>(n);
        }
        if (!(mean.norm() < eps.epsilon)) return;
        double lw = lg_n1;
        for (int i = 0; i < s; ++i) {
          lw -= lg[static_cast<std::size_t>(counts[i] + 1)];
          lw += static_cast<double>(counts[i]) * logw(i);
        }
        acc.add(lw + 0.5 * static_cast<double>(n) * mean.dot(psi2 * mean));
      },
      chunks);
  LogSumExp total;
  for (const LogSumExp& c : chunks) total.merge(c);
  return total.empty() ? 0.0 : std::exp(total.value());
}

McEstimate mc_log_zn(const DiscreteMeasure& m, const PolynomialFunctional& phi, long n,
                     long samples, std::uint64_t seed) {
  if (samples < 10000) throw InputError("mc_log_zn: need at least 1e4 samples");
  const int s = m.size();
  const int d = m.dim();
  Vec cumw(s);
  double acc = 0.0;
  for (int i = 0; i < s; ++i) {
    acc += m.weights(i);
    cumw(i) = acc;
  }
  const EvalPlan plan(phi);
  Rng rng(seed);
  std::vector<double> terms(static_cast<std::size_t>(samples));
  std::vector<double> mean(static_cast<std::size_t>(std::max(d, 1)));
  for (long t = 0; t < samples; ++t) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (long k = 0; k < n; ++k) {
      const double u = rng.uniform();
      int pick = 0;
      while (pick < s - 1 && u > cumw(pick)) ++pick;
      for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += m.points(j, pick);
    }
    for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);
    terms[static_cast<std::size_t>(t)] = static_cast<double>(n) * plan.eval(mean.data());
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  Kahan sum, sumsq;
  for (double t : terms) {
    const double u = std::exp(t - top);
    sum.add(u);
    sumsq.add(u * u);
  }
  const double ns = static_cast<double>(samples);
  const double mu = sum.value() / ns;
  const double var = std::max(0.0, sumsq.value() / ns - mu * mu);
  McEstimate out;
  out.estimate = top + std::log(mu);
  out.std_error = mu > 0.0 ? std::sqrt(var / ns) / mu : 0.0;
  return out;
}

double FitResult::coefficient_of(double power) const {
  for (std::size_t j = 0; j < powers.size(); ++j)
    if (powers[j] == power) return coefficients(static_cast<int>(j));
  throw InputError("FitResult: power not in model");
}

FitResult extrapolate(const std::vector<long>& grid, const std::vector<double>& values,
                      const std::vector<double>& powers) {
  const int pts = static_cast<int>(grid.size());
  const int k = static_cast<int>(powers.size());
  if (pts != static_cast<int>(values.size()))
    throw InputError("extrapolate: grid/value size mismatch");
  if (pts < 3) throw InputError("extrapolate: need at least 3 grid points");
  if (pts < k) throw InputError("extrapolate: more basis functions than grid points");
  if (std::find(powers.begin(), powers.end(), 0.0) == powers.end())
    throw InputError("extrapolate: model must contain the constant (power 0)");
  for (int i = 1; i < pts; ++i)
    if (grid[i] <= grid[i - 1]) throw InputError("extrapolate: grid must be increasing");

  Mat design(pts, k);
  for (int i = 0; i < pts; ++i)
    for (int j = 0; j < k; ++j)
      design(i, j) = std::pow(static_cast<double>(grid[i]), -0.5 * powers[j]);
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  if (qr.rank() < k)
    throw InputError("extrapolate: singular design matrix (degenerate grid)");

  FitResult out;
  Vec v(pts);
  for (int i = 0; i < pts; ++i) v(i) = values[i];
  out.coefficients = qr.solve(v);
  out.powers = powers;
  out.residual = (design * out.coefficients - v).norm();
  out.limit = out.coefficient_of(0.0);
  return out;
}

OracleSweep run_sweep(const DiscreteMeasure& m, const PolynomialFunctional& phi,
                      double lambda, double c0, const std::vector<long>& grid,
                      const std::vector<double>& powers, int workers) {
  OracleSweep sweep;
  std::vector<double> rns, uns;
  for (long n : grid) {
    SweepRow row;
    row.n = n;
    row.log_zn = exact_log_zn(m, phi, n, workers);
    row.un = std::exp(row.log_zn - static_cast<double>(n) * lambda);
    row.rn = static_cast<double>(n) * (row.un - c0);
    sweep.rows.push_back(row);
    rns.push_back(row.rn);
    uns.push_back(row.un);
  }
  sweep.rn_fit = extrapolate(grid, rns, powers);
  sweep.un_fit = extrapolate(grid, uns, powers);
  sweep.c2_fit = sweep.rn_fit.limit;
  sweep.b1 = sweep.un_fit.coefficient_of(1.0);
  return sweep;
}

}  // namespace lapexp
