#include <doctest.h>

#include "helpers.hpp"

using namespace lapexp;
using namespace lapexp::testing;

TEST_CASE("normalize rescales, merges, rejects") {
  const DiscreteMeasure m = measure1d({-1.0, 1.0}, {2.0, 2.0});
  CHECK(m.weights(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));

  const DiscreteMeasure merged = measure1d({0.0, 0.0}, {0.3, 0.7});
  CHECK(merged.size() == 1);
  CHECK(merged.weights(0) == doctest::Approx(1.0));
  CHECK(merged.points(0, 0) == 0.0);

  CHECK_THROWS_AS(measure1d({-1.0, 1.0}, {0.0, 0.0}), InputError);
  CHECK_THROWS_AS(measure1d({-1.0, 1.0}, {0.5, -0.1}), InputError);
  // zero-weight point dropped
  CHECK(measure1d({-1.0, 1.0, 3.0}, {0.5, 0.5, 0.0}).size() == 2);
}

TEST_CASE("affine_reduce intrinsic dimensions") {
  const auto [two, frame2] = affine_reduce(measure1d({-1.0, 1.0}, {0.5, 0.5}));
  CHECK(frame2.r() == 1);
  CHECK(two.dim() == 1);

  // s unit basis vectors: hull is the simplex hyperplane, r = s - 1
  const int s = 5;
  Mat pts = Mat::Identity(s, s);
  Vec w = Vec::Constant(s, 1.0 / s);
  const auto [simplex, frame] = affine_reduce(normalize(pts, w));
  CHECK(frame.r() == s - 1);

  const auto [pm, frame0] = affine_reduce(measure1d({2.5}, {1.0}));
  CHECK(frame0.r() == 0);
  CHECK(pm.dim() == 0);
}

TEST_CASE("affine_reduce embeds back") {
  Rng rng(7);
  Mat pts(3, 4);
  for (int i = 0; i < 12; ++i) pts(i / 4, i % 4) = rng.normal();
  // rank-deficient: last row a combination of the first two
  pts.row(2) = 0.5 * pts.row(0) - pts.row(1);
  Vec w = Vec::Constant(4, 0.25);
  const DiscreteMeasure m = normalize(pts, w);
  const auto [red, frame] = affine_reduce(m);
  CHECK(frame.r() == 2);
  for (int i = 0; i < m.size(); ++i) {
    const Vec back = frame.embed(red.points.col(i));
    CHECK((back - m.points.col(i)).norm() <= 1e-10);
  }
  // basis orthonormal
  const Mat gram = frame.basis.transpose() * frame.basis;
  CHECK((gram - Mat::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("log_mgf values") {
  const DiscreteMeasure m = measure1d({-1.0, 1.0}, {0.5, 0.5});
  const LogMgf at0 = log_mgf(m, vec({0.0}));
  CHECK(at0.value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(at0.gradient(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(at0.hessian(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // oracle: direct two-term summation log(0.5 e^{-1} + 0.5 e^{1}) = log cosh 1
  const double direct = std::log(0.5 * std::exp(-1.0) + 0.5 * std::exp(1.0));
  const LogMgf at1 = log_mgf(m, vec({1.0}));
  CHECK(at1.value == doctest::Approx(direct).epsilon(1e-14));
  CHECK(at1.value == doctest::Approx(0.4337808).epsilon(1e-7));

  const DiscreteMeasure pm = measure1d({0.7}, {1.0});
  const LogMgf lp = log_mgf(pm, vec({2.0}));
  CHECK(lp.value == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(lp.gradient(0) == doctest::Approx(0.7));
  CHECK(lp.hessian(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("log_mgf derivatives match finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int s = 2 + static_cast<int>(rng.next_u64() % 4);
    Mat pts(d, s);
    Vec w(s);
    for (int i = 0; i < s; ++i) {
      w(i) = rng.uniform() + 0.1;
      for (int j = 0; j < d; ++j) pts(j, i) = rng.normal();
    }
    const DiscreteMeasure m = normalize(pts, w);
    Vec phi(d);
    for (int j = 0; j < d; ++j) phi(j) = rng.normal();
    const LogMgf lm = log_mgf(m, phi);
    const double h = 1e-5;
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e(j) = h;
      const double fd = (log_mgf(m, phi + e).value - log_mgf(m, phi - e).value) / (2 * h);
      CHECK(lm.gradient(j) == doctest::Approx(fd).epsilon(1e-6));
      for (int k = 0; k < d; ++k) {
        const double fd2 =
            (log_mgf(m, phi + e).gradient(k) - log_mgf(m, phi - e).gradient(k)) / (2 * h);
        CHECK(lm.hessian(j, k) == doctest::Approx(fd2).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("tilt_and_center") {
  const DiscreteMeasure m = measure1d({-1.0, 1.0}, {0.5, 0.5});
  const DiscreteMeasure same = tilt_and_center(m, vec({0.0}), vec({0.0}));
  CHECK(same.weights(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(same.points(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));

  // phi* = 1: weights (e^{-1}, e)/(2 cosh 1), mean tanh 1 then centered
  const double t = std::tanh(1.0);
  const DiscreteMeasure tilted = tilt_and_center(m, vec({1.0}), vec({t}));
  const double z = 2.0 * std::cosh(1.0);
  CHECK(tilted.weights(0) == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-13));
  CHECK(tilted.weights(1) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-13));
  double mean = 0.0;
  for (int i = 0; i < tilted.size(); ++i) mean += tilted.weights(i) * tilted.points(0, i);
  CHECK(std::abs(mean) <= 1e-10);

  CHECK_THROWS_AS(tilt_and_center(m, vec({1.0}), vec({0.0})), InputError);

  const DiscreteMeasure pm = measure1d({3.0}, {1.0});
  const DiscreteMeasure pm0 = tilt_and_center(pm, vec({0.37}), vec({3.0}));
  CHECK(pm0.points(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("tilt centering holds for random tilts") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int s = 2 + static_cast<int>(rng.next_u64() % 5);
    Mat pts(d, s);
    Vec w(s);
    for (int i = 0; i < s; ++i) {
      w(i) = rng.uniform() + 0.05;
      for (int j = 0; j < d; ++j) pts(j, i) = 2.0 * rng.normal();
    }
    const DiscreteMeasure m = normalize(pts, w);
    Vec phi(d);
    for (int j = 0; j < d; ++j) phi(j) = rng.normal();
    const DiscreteMeasure nu0 = tilt_and_center(m, phi, log_mgf(m, phi).gradient);
    CHECK(std::abs(nu0.weights.sum() - 1.0) <= 1e-12);
    const Vec mean = nu0.points * nu0.weights;
    CHECK(mean.lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("dual_moment") {
  const DiscreteMeasure m = measure1d({-1.0, 1.0}, {0.5, 0.5});
  CHECK(dual_moment(m, {vec({1.0})}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dual_moment(m, {vec({1.0}), vec({1.0}), vec({1.0}), vec({1.0})}) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // centered {-1,0,2}: second dual moment equals the variance
  DiscreteMeasure c = measure1d({-1.0, 0.0, 2.0}, {0.5, 0.3, 0.2});
  const double mu = c.mean()(0);
  for (int i = 0; i < c.size(); ++i) c.points(0, i) -= mu;
  double var = 0.0;
  for (int i = 0; i < c.size(); ++i) var += c.weights(i) * c.points(0, i) * c.points(0, i);
  CHECK(dual_moment(c, {vec({1.0}), vec({1.0})}) == doctest::Approx(var).epsilon(1e-14));
}

TEST_CASE("dual_moment is multilinear") {
  Rng rng(31);
  Mat pts(2, 3);
  pts << 0.3, -1.2, 0.8, 1.1, 0.4, -0.6;
  const DiscreteMeasure m = normalize(pts, vec({0.2, 0.5, 0.3}));
  for (int trial = 0; trial < 10; ++trial) {
    Vec u = vec({rng.normal(), rng.normal()});
    Vec v = vec({rng.normal(), rng.normal()});
    Vec w = vec({rng.normal(), rng.normal()});
    const double alpha = rng.normal();
    const double lhs = dual_moment(m, {u, Vec(alpha * v + w)});
    const double rhs = alpha * dual_moment(m, {u, v}) + dual_moment(m, {u, w});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}
