#include "lapexp/functional.hpp"

#include <algorithm>
#include <functional>

namespace lapexp {
namespace {

// Visits all non-decreasing index tuples of the given length over {0..dim-1}.
void visit_sorted_tuples(int dim, int length,
                         const std::function<void(const std::vector<int>&)>& fn) {
  if (length == 0) {
    std::vector<int> empty;
    fn(empty);
    return;
  }
  if (dim == 0) return;
  std::vector<int> idx(length, 0);
  while (true) {
    fn(idx);
    int pos = length - 1;
    while (pos >= 0 && idx[pos] == dim - 1) --pos;
    if (pos < 0) break;
    const int v = idx[pos] + 1;
    for (int j = pos; j < length; ++j) idx[j] = v;
  }
}

double falling_factorial(int n, int k) {
  double out = 1.0;
  for (int j = 0; j < k; ++j) out *= n - j;
  return out;
}

double int_pow(double x, int e) {
  double out = 1.0;
  while (e-- > 0) out *= x;
  return out;
}

}  // namespace

SymTensor::SymTensor(int dim, int order) : dim_(dim), order_(order) {
  if (order < 0) throw InputError("SymTensor: negative order");
}

void SymTensor::set(const std::vector<int>& index, double value) {
  if (static_cast<int>(index.size()) != order_)
    throw InputError("SymTensor: index length does not match order");
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] < 0 || index[j] >= dim_)
      throw InputError("SymTensor: index out of range");
    if (j > 0 && index[j] < index[j - 1])
      throw InputError("SymTensor: index tuple must be non-decreasing");
  }
  if (entries_.count(index))
    throw InputError("SymTensor: duplicate symmetric orbit");
  if (value != 0.0) entries_[index] = value;
}

void SymTensor::accumulate(std::vector<int> index, double value) {
  if (static_cast<int>(index.size()) != order_)
    throw InputError("SymTensor: index length does not match order");
  std::sort(index.begin(), index.end());
  entries_[index] += value;
}

double SymTensor::entry(std::vector<int> index) const {
  std::sort(index.begin(), index.end());
  const auto it = entries_.find(index);
  return it == entries_.end() ? 0.0 : it->second;
}

double SymTensor::orbit_multiplicity(const std::vector<int>& sorted_index) {
  double mult = 1.0;
  int run = 1;
  double denom = 1.0;
  for (std::size_t j = 0; j < sorted_index.size(); ++j) {
    mult *= static_cast<double>(j + 1);
    if (j > 0 && sorted_index[j] == sorted_index[j - 1]) {
      ++run;
      denom *= run;
    } else {
      run = 1;
    }
  }
  return mult / denom;
}

double SymTensor::contract(const std::vector<Vec>& args) const {
  if (static_cast<int>(args.size()) != order_)
    throw InputError("SymTensor::contract: argument count mismatch");
  Kahan acc;
  std::vector<int> perm;
  for (const auto& [idx, val] : entries_) {
    perm = idx;
    // sum over the distinct permutations of the orbit
    do {
      double term = val;
      for (int j = 0; j < order_; ++j) term *= args[j](perm[j]);
      acc.add(term);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return acc.value();
}

double SymTensor::contract_power(const Vec& x) const {
  Kahan acc;
  for (const auto& [idx, val] : entries_) {
    double term = val * orbit_multiplicity(idx);
    for (int j : idx) term *= x(j);
    acc.add(term);
  }
  return acc.value();
}

PolynomialFunctional::PolynomialFunctional(int dim) : dim_(dim) {}

PolynomialFunctional::PolynomialFunctional(int dim, std::vector<SymTensor> tensors)
    : dim_(dim), tensors_(std::move(tensors)) {
  if (static_cast<int>(tensors_.size()) > kMaxDegree + 1)
    throw InputError("PolynomialFunctional: degree above " + std::to_string(kMaxDegree));
  for (std::size_t m = 0; m < tensors_.size(); ++m) {
    if (tensors_[m].empty()) continue;
    if (tensors_[m].order() != static_cast<int>(m))
      throw InputError("PolynomialFunctional: tensor order mismatch at slot " +
                       std::to_string(m));
    if (tensors_[m].dim() != dim_)
      throw InputError("PolynomialFunctional: tensor dimension mismatch");
  }
  rebuild_monomials();
}

int PolynomialFunctional::degree() const {
  int deg = 0;
  for (const auto& [expo, c] : monomials_) {
    int d = 0;
    for (int e : expo) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

void PolynomialFunctional::rebuild_monomials() {
  monomials_.clear();
  for (const SymTensor& t : tensors_) {
    for (const auto& [idx, val] : t.entries()) {
      std::vector<int> expo(dim_, 0);
      for (int j : idx) expo[j]++;
      monomials_[expo] += val * SymTensor::orbit_multiplicity(idx);
    }
  }
  for (auto it = monomials_.begin(); it != monomials_.end();) {
    if (it->second == 0.0)
      it = monomials_.erase(it);
    else
      ++it;
  }
}

double PolynomialFunctional::eval(const Vec& x) const {
  Kahan acc;
  for (const auto& [expo, c] : monomials_) {
    double term = c;
    for (int j = 0; j < dim_; ++j)
      if (expo[j] > 0) term *= int_pow(x(j), expo[j]);
    acc.add(term);
  }
  return acc.value();
}

SymTensor PolynomialFunctional::derivative_tensor(const Vec& x, int m) const {
  if (m < 0 || m > kMaxDerivativeOrder)
    throw InputError("derivative_tensor: order must be in 0..4");
  SymTensor out(dim_, m);
  visit_sorted_tuples(dim_, m, [&](const std::vector<int>& idx) {
    std::vector<int> counts(dim_, 0);
    for (int j : idx) counts[j]++;
    Kahan acc;
    for (const auto& [expo, c] : monomials_) {
      double term = c;
      for (int j = 0; j < dim_ && term != 0.0; ++j) {
        if (counts[j] > expo[j]) {
          term = 0.0;
          break;
        }
        term *= falling_factorial(expo[j], counts[j]);
        term *= int_pow(x(j), expo[j] - counts[j]);
      }
      if (term != 0.0) acc.add(term);
    }
    if (acc.value() != 0.0) out.set(idx, acc.value());
  });
  return out;
}

Vec PolynomialFunctional::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  for (const auto& [expo, c] : monomials_) {
    for (int j = 0; j < dim_; ++j) {
      if (expo[j] == 0) continue;
      double term = c * expo[j] * int_pow(x(j), expo[j] - 1);
      for (int k = 0; k < dim_; ++k)
        if (k != j && expo[k] > 0) term *= int_pow(x(k), expo[k]);
      g(j) += term;
    }
  }
  return g;
}

Mat PolynomialFunctional::hessian(const Vec& x) const {
  const SymTensor t = derivative_tensor(x, 2);
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& [idx, val] : t.entries()) {
    h(idx[0], idx[1]) = val;
    h(idx[1], idx[0]) = val;
  }
  return h;
}

PolynomialFunctional PolynomialFunctional::pullback(const ReducedFrame& frame) const {
  using Poly = std::map<std::vector<int>, double>;
  const int r = frame.r();
  const std::vector<int> zero(r, 0);

  auto poly_mul = [&](const Poly& p, const Poly& q) {
    Poly out;
    for (const auto& [ea, ca] : p)
      for (const auto& [eb, cb] : q) {
        std::vector<int> e(r);
        for (int j = 0; j < r; ++j) e[j] = ea[j] + eb[j];
        out[e] += ca * cb;
      }
    return out;
  };

  Poly total;
  for (const auto& [expo, c] : monomials_) {
    Poly prod{{zero, c}};
    for (int j = 0; j < dim_; ++j) {
      if (expo[j] == 0) continue;
      Poly lin{{zero, frame.offset(j)}};
      for (int k = 0; k < r; ++k) {
        if (frame.basis(j, k) == 0.0) continue;
        std::vector<int> e(r, 0);
        e[k] = 1;
        lin[e] += frame.basis(j, k);
      }
      for (int rep = 0; rep < expo[j]; ++rep) prod = poly_mul(prod, lin);
    }
    for (const auto& [e, cc] : prod) total[e] += cc;
  }

  // re-pack the monomial map as symmetric tensors
  int max_order = 0;
  for (const auto& [e, c] : total) {
    int d = 0;
    for (int v : e) d += v;
    max_order = std::max(max_order, d);
  }
  std::vector<SymTensor> tensors;
  for (int m = 0; m <= max_order; ++m) tensors.emplace_back(r, m);
  for (const auto& [e, c] : total) {
    if (c == 0.0) continue;
    std::vector<int> idx;
    for (int j = 0; j < r; ++j)
      for (int rep = 0; rep < e[j]; ++rep) idx.push_back(j);
    const double mult = SymTensor::orbit_multiplicity(idx);
    tensors[idx.size()].set(idx, c / mult);
  }
  return PolynomialFunctional(r, std::move(tensors));
}

}  // namespace lapexp
