#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lapexp {

inline constexpr const char* kVersion = "0.1.0";

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Cplx = std::complex<double>;

// Error taxonomy; the CLI maps these onto its exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : Error { using Error::Error; };
struct VariationalError : Error { using Error::Error; };
struct CriticalityError : Error { using Error::Error; };
struct DegreeOverflowError : Error { using Error::Error; };
struct GuardExceededError : Error { using Error::Error; };
struct ImaginaryResidueError : Error { using Error::Error; };

// Neumaier compensated accumulator.
class Kahan {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming log-sum-exp with compensated mantissa sum. Adding terms in a
// fixed order and merging accumulators in a fixed order keeps results
// independent of how work was partitioned.
class LogSumExp {
 public:
  void add(double t) {
    if (std::isinf(t) && t < 0) return;
    if (empty_) {
      max_ = t;
      sum_.add(1.0);
      empty_ = false;
      return;
    }
    if (t <= max_) {
      sum_.add(std::exp(t - max_));
    } else {
      rescale(t);
      sum_.add(1.0);
    }
  }
  void merge(const LogSumExp& other) {
    if (other.empty_) return;
    if (empty_) {
      *this = other;
      return;
    }
    const double m = std::max(max_, other.max_);
    if (max_ < m) rescale(m);
    sum_.add(other.sum_.value() * std::exp(other.max_ - m));
  }
  bool empty() const { return empty_; }
  double value() const {
    if (empty_) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_.value());
  }

 private:
  void rescale(double new_max) {
    const double s = std::exp(max_ - new_max);
    Kahan scaled;
    scaled.add(sum_.value() * s);
    sum_ = scaled;
    max_ = new_max;
  }
  bool empty_ = true;
  double max_ = 0.0;
  Kahan sum_;
};

// SplitMix64: portable, seed-stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform on (0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace lapexp
