#pragma once

#include <cassert>
#include <vector>

#include "gaudin/ratfun.hpp"

namespace gaudin {

/// Monic linear differential operator
///   d^n/dt^n + a_{n-1} d^{n-1}/dt^{n-1} + ... + a_0
/// with rational-function coefficients.
template <class F>
class DiffOp {
 public:
  DiffOp() = default;
  explicit DiffOp(std::vector<RationalFunction<F>> lower) : a_(std::move(lower)) {}

  /// d/dt + a0.
  static DiffOp first_order(RationalFunction<F> a0) {
    return DiffOp(std::vector<RationalFunction<F>>{std::move(a0)});
  }

  std::size_t order() const { return a_.size(); }
  /// Coefficient of d^k/dt^k, k < order.
  const RationalFunction<F>& coeff(std::size_t k) const { return a_[k]; }

  bool operator==(const DiffOp& o) const { return a_ == o.a_; }

 private:
  std::vector<RationalFunction<F>> a_;
};

/// Composition p . q (apply q first).  Uses the Leibniz rule
/// d^k . f = sum_j C(k, j) f^(j) d^(k-j).
template <class F>
DiffOp<F> compose(const DiffOp<F>& p, const DiffOp<F>& q) {
  const long np = static_cast<long>(p.order());
  const long nq = static_cast<long>(q.order());
  const auto one = RationalFunction<F>::constant(F(1));

  // Full coefficient vectors including the monic leading term.
  std::vector<RationalFunction<F>> b(np + 1), c(nq + 1);
  for (long k = 0; k < np; ++k) b[k] = p.coeff(k);
  b[np] = one;
  for (long k = 0; k < nq; ++k) c[k] = q.coeff(k);
  c[nq] = one;

  // Derivatives of the q coefficients up to order np.
  std::vector<std::vector<RationalFunction<F>>> dc(nq + 1);
  for (long j = 0; j <= nq; ++j) {
    dc[j].resize(np + 1);
    dc[j][0] = c[j];
    for (long d = 1; d <= np; ++d) dc[j][d] = dc[j][d - 1].derivative();
  }

  std::vector<RationalFunction<F>> r(np + nq + 1);
  for (long i = 0; i <= np; ++i) {
    if (b[i].is_zero()) continue;
    for (long j = 0; j <= nq; ++j) {
      for (long d = 0; d <= i; ++d) {
        if (dc[j][d].is_zero()) continue;
        const F binom = FieldTraits<F>::from_rat(binomial_rat(i, d));
        r[i - d + j] = r[i - d + j] + b[i] * (dc[j][d] * binom);
      }
    }
  }
  assert(r[np + nq] == one);
  r.pop_back();
  return DiffOp<F>(std::move(r));
}

}  // namespace gaudin
