#pragma once

#include <random>
#include <set>
#include <vector>

#include "gaudin/ratfun.hpp"
#include "gaudin/scalar.hpp"

namespace testutil {

using gaudin::Rat;
using gaudin::RationalFunction;

inline Rat random_rat(std::mt19937_64& rng, int num_range = 9, int den_range = 4) {
  std::uniform_int_distribution<int> num(-num_range, num_range);
  std::uniform_int_distribution<int> den(1, den_range);
  return Rat(num(rng), den(rng));
}

inline Rat random_nonzero_rat(std::mt19937_64& rng) {
  for (;;) {
    Rat r = random_rat(rng);
    if (r != 0) return r;
  }
}

/// Random exact rational function with up to max_poles distinct poles of
/// order <= 2 and a small polynomial part.
inline RationalFunction<Rat> random_ratfun(std::mt19937_64& rng, int max_poles = 3,
                                           int max_poly_deg = 2) {
  std::uniform_int_distribution<int> npoles(0, max_poles);
  std::uniform_int_distribution<int> order(1, 2);
  std::uniform_int_distribution<int> pdeg(-1, max_poly_deg);
  RationalFunction<Rat> f;
  std::set<Rat> used;
  const int np = npoles(rng);
  for (int k = 0; k < np; ++k) {
    Rat at = random_rat(rng, 5, 2);
    if (!used.insert(at).second) continue;
    std::vector<Rat> coeffs(order(rng));
    for (auto& c : coeffs) c = random_rat(rng);
    f = f + RationalFunction<Rat>::pole_term(at, coeffs);
  }
  const int d = pdeg(rng);
  if (d >= 0) {
    std::vector<Rat> poly(d + 1);
    for (auto& c : poly) c = random_rat(rng);
    f = f + RationalFunction<Rat>::polynomial(poly);
  }
  return f;
}

/// Random distinct rational points, pairwise different.
inline std::vector<Rat> random_distinct_rats(std::mt19937_64& rng, int count,
                                             int num_range = 9, int den_range = 3) {
  std::set<Rat> used;
  while (static_cast<int>(used.size()) < count)
    used.insert(random_rat(rng, num_range, den_range));
  return std::vector<Rat>(used.begin(), used.end());
}

}  // namespace testutil
