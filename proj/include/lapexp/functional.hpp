#pragma once

#include <map>
#include <vector>

#include "lapexp/common.hpp"
#include "lapexp/measure.hpp"

namespace lapexp {

/// Fully symmetric tensor of a given order over R^d, stored one entry per
/// permutation orbit (keys are non-decreasing index tuples).
class SymTensor {
 public:
  SymTensor() : dim_(0), order_(0) {}
  SymTensor(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool empty() const { return entries_.empty(); }
  const std::map<std::vector<int>, double>& entries() const { return entries_; }

  /// Sets the orbit value for a non-decreasing index tuple. Throws on a
  /// duplicate orbit or an out-of-order/out-of-range index.
  void set(const std::vector<int>& index, double value);
  /// Accumulates into the orbit of an arbitrary index tuple.
  void accumulate(std::vector<int> index, double value);
  /// Entry lookup for an arbitrary index tuple (0 if absent).
  double entry(std::vector<int> index) const;

  /// Full multilinear contraction T[v_1, ..., v_order].
  double contract(const std::vector<Vec>& args) const;
  /// Contraction against one repeated vector, T[x, x, ..., x].
  double contract_power(const Vec& x) const;

  /// Number of distinct permutations of a sorted index tuple.
  static double orbit_multiplicity(const std::vector<int>& sorted_index);

 private:
  int dim_;
  int order_;
  std::map<std::vector<int>, double> entries_;
};

/// Polynomial functional Phi(x) = sum_m T_m[x,...,x] with exact evaluation
/// and exact derivative tensors. Degree at most 6.
class PolynomialFunctional {
 public:
  static constexpr int kMaxDegree = 6;
  static constexpr int kMaxDerivativeOrder = 4;

  PolynomialFunctional() : PolynomialFunctional(0) {}
  explicit PolynomialFunctional(int dim);
  PolynomialFunctional(int dim, std::vector<SymTensor> tensors);

  int dim() const { return dim_; }
  int degree() const;
  const std::vector<SymTensor>& tensors() const { return tensors_; }
  /// Monomial form: exponent vector -> coefficient.
  const std::map<std::vector<int>, double>& monomials() const { return monomials_; }

  double eval(const Vec& x) const;
  /// m-th Frechet derivative at x as a symmetric tensor (m <= 4). Includes
  /// the factorials from differentiating monomials, so the Taylor series of
  /// eval uses 1/m! weights.
  SymTensor derivative_tensor(const Vec& x, int m) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// Composition with the affine embedding of a frame: y -> Phi(offset + B y).
  PolynomialFunctional pullback(const ReducedFrame& frame) const;

 private:
  void rebuild_monomials();

  int dim_;
  std::vector<SymTensor> tensors_;  // index = order
  std::map<std::vector<int>, double> monomials_;
};

/// Phi re-expressed in ReducedFrame coordinates.
using FrameFunctional = PolynomialFunctional;

}  // namespace lapexp
