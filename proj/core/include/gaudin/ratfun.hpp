#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "gaudin/scalar.hpp"

namespace gaudin {

/// Finite window of a Laurent expansion; c[k] is the coefficient of
/// (t - x0)^(lo + k).
template <class F>
struct LaurentSeries {
  long lo = 0;
  std::vector<F> c;

  F at(long e) const {
    if (e < lo || e >= lo + static_cast<long>(c.size())) return F(0);
    return c[e - lo];
  }
  long hi() const { return lo + static_cast<long>(c.size()) - 1; }
  std::size_t lo_index(long e) const { return static_cast<std::size_t>(e - lo); }
};

/// Rational function of one variable kept in partial-fraction form:
/// a polynomial part plus, for each pole x, a principal part
/// sum_m c_m / (t - x)^m.  Closed under +, -, *, d/dt.
///
/// In the complex instantiation, coefficients below FieldTraits::coeff_tol
/// are trimmed when canonicalizing, and two distinct pole locations closer
/// than FieldTraits::pole_tol are rejected as degenerate input.
template <class F>
class RationalFunction {
 public:
  using PoleMap = std::map<F, std::vector<F>, ScalarLess<F>>;

  RationalFunction() = default;

  static RationalFunction zero() { return RationalFunction(); }

  static RationalFunction constant(const F& v) {
    RationalFunction f;
    if (!(v == F(0))) f.poly_ = {v};
    return f;
  }

  /// Polynomial sum_k coeffs[k] t^k.
  static RationalFunction polynomial(std::vector<F> coeffs) {
    RationalFunction f;
    f.poly_ = std::move(coeffs);
    f.canonicalize();
    return f;
  }

  /// Principal part sum_m coeffs[m-1] / (t - at)^m.
  static RationalFunction pole_term(const F& at, std::vector<F> coeffs) {
    RationalFunction f;
    f.poles_[at] = std::move(coeffs);
    f.canonicalize();
    return f;
  }

  static RationalFunction simple_pole(const F& at, const F& coeff) {
    return pole_term(at, {coeff});
  }

  /// t itself.
  static RationalFunction variable() { return polynomial({F(0), F(1)}); }

  const PoleMap& poles() const { return poles_; }
  const std::vector<F>& polynomial_part() const { return poly_; }
  bool is_zero() const { return poles_.empty() && poly_.empty(); }

  long poly_degree() const { return static_cast<long>(poly_.size()) - 1; }

  long pole_order(const F& x) const {
    auto it = poles_.find(x);
    return it == poles_.end() ? 0 : static_cast<long>(it->second.size());
  }

  /// Coefficient of (t - x)^(-m); zero when absent.
  F principal_coeff(const F& x, long m) const {
    auto it = poles_.find(x);
    if (it == poles_.end()) return F(0);
    if (m < 1 || m > static_cast<long>(it->second.size())) return F(0);
    return it->second[m - 1];
  }

  F residue(const F& x) const { return principal_coeff(x, 1); }

  /// Adds a principal part at x, rejecting near-coincident distinct poles.
  void add_pole_term(const F& x, const std::vector<F>& coeffs) {
    check_near_collision(x);
    auto& dst = poles_[x];
    if (dst.size() < coeffs.size()) dst.resize(coeffs.size(), F(0));
    for (std::size_t m = 0; m < coeffs.size(); ++m) dst[m] += coeffs[m];
    canonicalize();
  }

  RationalFunction operator-() const {
    RationalFunction f = *this;
    for (auto& [x, cs] : f.poles_)
      for (auto& c : cs) c = F(0) - c;
    for (auto& c : f.poly_) c = F(0) - c;
    return f;
  }

  RationalFunction operator+(const RationalFunction& o) const {
    check_cross_collisions(*this, o);
    RationalFunction f = *this;
    for (const auto& [x, cs] : o.poles_) {
      auto& dst = f.poles_[x];
      if (dst.size() < cs.size()) dst.resize(cs.size(), F(0));
      for (std::size_t m = 0; m < cs.size(); ++m) dst[m] += cs[m];
    }
    if (f.poly_.size() < o.poly_.size()) f.poly_.resize(o.poly_.size(), F(0));
    for (std::size_t k = 0; k < o.poly_.size(); ++k) f.poly_[k] += o.poly_[k];
    f.canonicalize();
    return f;
  }

  RationalFunction operator-(const RationalFunction& o) const { return *this + (-o); }

  RationalFunction operator*(const F& s) const {
    if (s == F(0)) return zero();
    RationalFunction f = *this;
    for (auto& [x, cs] : f.poles_)
      for (auto& c : cs) c = c * s;
    for (auto& c : f.poly_) c = c * s;
    f.canonicalize();
    return f;
  }

  /// Product, re-expanded into partial fractions.  Principal parts come from
  /// local Cauchy products of the two Laurent expansions; the polynomial part
  /// comes from the expansion at infinity.
  RationalFunction operator*(const RationalFunction& o) const {
    check_cross_collisions(*this, o);
    RationalFunction out;

    std::vector<F> locations;
    for (const auto& [x, cs] : poles_) locations.push_back(x);
    for (const auto& [x, cs] : o.poles_)
      if (!poles_.count(x)) locations.push_back(x);

    for (const F& x : locations) {
      const long mf = pole_order(x), mg = o.pole_order(x);
      const long n = mf + mg;
      const auto sf = laurent(x, mg - 1);
      const auto sg = o.laurent(x, mf - 1);
      std::vector<F> coeffs(n, F(0));  // coeffs[m-1] ~ (t-x)^(-m)
      for (long e = -n; e <= -1; ++e) {
        F acc(0);
        for (long i = -mf; i <= e + mg; ++i) acc += sf.at(i) * sg.at(e - i);
        coeffs[-e - 1] = acc;
      }
      if (std::any_of(coeffs.begin(), coeffs.end(),
                      [](const F& v) { return !(v == F(0)); }))
        out.poles_[x] = std::move(coeffs);
    }

    const long df = poly_degree(), dg = o.poly_degree();
    long top = -1;
    if (df >= 0 && dg >= 0)
      top = df + dg;
    else if (df >= 0)
      top = df - 1;
    else if (dg >= 0)
      top = dg - 1;
    if (top >= 0) {
      // Expansions at infinity in u = 1/t; t-exponent e maps to u-exponent -e.
      const auto uf = laurent_at_infinity(std::max(dg, 0L) + 1);
      const auto ug = o.laurent_at_infinity(std::max(df, 0L) + 1);
      std::vector<F> poly(top + 1, F(0));
      for (long e = 0; e <= top; ++e) {
        F acc(0);
        for (long iu = -df; iu <= -e + std::max(dg, 0L) + 1; ++iu)
          acc += uf.at(iu) * ug.at(-e - iu);
        poly[e] = acc;
      }
      out.poly_ = std::move(poly);
    }
    out.canonicalize();
    return out;
  }

  RationalFunction derivative() const {
    RationalFunction f;
    for (const auto& [x, cs] : poles_) {
      std::vector<F> d(cs.size() + 1, F(0));
      for (std::size_t m = 1; m <= cs.size(); ++m)
        d[m] = F(0) - FieldTraits<F>::from_int(static_cast<long>(m)) * cs[m - 1];
      f.poles_[x] = std::move(d);
    }
    if (poly_.size() > 1) {
      std::vector<F> d(poly_.size() - 1);
      for (std::size_t k = 1; k < poly_.size(); ++k)
        d[k - 1] = FieldTraits<F>::from_int(static_cast<long>(k)) * poly_[k];
      f.poly_ = std::move(d);
    }
    f.canonicalize();
    return f;
  }

  bool operator==(const RationalFunction& o) const {
    return poles_ == o.poles_ && poly_ == o.poly_;
  }

  F evaluate(const F& t) const {
    F acc(0);
    for (const auto& [x, cs] : poles_) {
      const F d = t - x;
      if (d == F(0)) throw DegenerateInputError("evaluate: argument is a pole");
      F inv_pow = F(1) / d;
      for (std::size_t m = 0; m < cs.size(); ++m) {
        acc += cs[m] * inv_pow;
        inv_pow = inv_pow / d;
      }
    }
    F t_pow(1);
    for (std::size_t k = 0; k < poly_.size(); ++k) {
      acc += poly_[k] * t_pow;
      t_pow = t_pow * t;
    }
    return acc;
  }

  /// Laurent expansion at x0 with exponents from -pole_order(x0) to hi.
  LaurentSeries<F> laurent(const F& x0, long hi) const {
    LaurentSeries<F> s;
    s.lo = -pole_order(x0);
    if (hi < s.lo) {
      s.lo = 0;
      return s;
    }
    s.c.assign(hi - s.lo + 1, F(0));
    for (const auto& [y, cs] : poles_) {
      if (y == x0) {
        for (std::size_t m = 1; m <= cs.size(); ++m)
          if (-static_cast<long>(m) <= hi) s.c[s.lo_index(-static_cast<long>(m))] = cs[m - 1];
        continue;
      }
      const F d = x0 - y;
      const F dinv = F(1) / d;
      for (std::size_t m = 1; m <= cs.size(); ++m) {
        // 1/(t-y)^m around x0: sum_r (-1)^r C(m+r-1, r) d^(-m-r) (t-x0)^r
        F factor = cs[m - 1] * scalar_pow(dinv, static_cast<long>(m));
        for (long r = 0; r <= hi; ++r) {
          if (r > 0)
            factor = factor * dinv * FieldTraits<F>::from_int(-(static_cast<long>(m) + r - 1)) /
                     FieldTraits<F>::from_int(r);
          s.c[s.lo_index(r)] += factor;
        }
      }
    }
    if (!poly_.empty()) {
      // Taylor shift of the polynomial part.
      for (long r = 0; r <= std::min(hi, poly_degree()); ++r) {
        F acc(0);
        for (long k = r; k <= poly_degree(); ++k) {
          F binom = FieldTraits<F>::from_rat(binomial_rat(k, r));
          acc += poly_[k] * binom * scalar_pow(x0, k - r);
        }
        s.c[s.lo_index(r)] += acc;
      }
    }
    return s;
  }

  /// Expansion at infinity: coefficients of u^k in f(1/u), for k up to hi_u.
  LaurentSeries<F> laurent_at_infinity(long hi_u) const {
    LaurentSeries<F> s;
    s.lo = poly_.empty() ? 1 : -poly_degree();
    if (poly_.empty() && poles_.empty()) {
      s.lo = 0;
      return s;
    }
    if (hi_u < s.lo) {
      s.c.clear();
      return s;
    }
    s.c.assign(hi_u - s.lo + 1, F(0));
    for (long k = 0; k <= poly_degree(); ++k)
      if (-k >= s.lo && -k <= hi_u) s.c[s.lo_index(-k)] += poly_[k];
    for (const auto& [y, cs] : poles_) {
      for (std::size_t m = 1; m <= cs.size(); ++m) {
        // 1/(t-y)^m = u^m sum_r C(m+r-1, r) y^r u^r.
        F factor = cs[m - 1];
        for (long r = 0; static_cast<long>(m) + r <= hi_u; ++r) {
          if (r > 0)
            factor = factor * y * FieldTraits<F>::from_int(static_cast<long>(m) + r - 1) /
                     FieldTraits<F>::from_int(r);
          s.c[s.lo_index(static_cast<long>(m) + r)] += factor;
        }
      }
    }
    return s;
  }

 private:
  void canonicalize() {
    for (auto it = poles_.begin(); it != poles_.end();) {
      auto& cs = it->second;
      while (!cs.empty() && FieldTraits<F>::is_zero(cs.back())) cs.pop_back();
      for (auto& c : cs)
        if (FieldTraits<F>::is_zero(c)) c = F(0);
      if (cs.empty())
        it = poles_.erase(it);
      else
        ++it;
    }
    while (!poly_.empty() && FieldTraits<F>::is_zero(poly_.back())) poly_.pop_back();
    for (auto& c : poly_)
      if (FieldTraits<F>::is_zero(c)) c = F(0);
  }

  void check_near_collision(const F& x) const {
    if constexpr (!FieldTraits<F>::is_exact) {
      for (const auto& [y, cs] : poles_) {
        if (!(y == x) && FieldTraits<F>::is_zero(y - x, FieldTraits<F>::pole_tol))
          throw DegenerateInputError("pole locations closer than tolerance");
      }
    }
  }

  static void check_cross_collisions(const RationalFunction& f, const RationalFunction& g) {
    if constexpr (!FieldTraits<F>::is_exact) {
      for (const auto& [x, a] : f.poles_)
        for (const auto& [y, b] : g.poles_)
          if (!(x == y) && FieldTraits<F>::is_zero(x - y, FieldTraits<F>::pole_tol))
            throw DegenerateInputError("pole locations closer than tolerance");
    }
  }

  PoleMap poles_;
  std::vector<F> poly_;
};

template <class F>
RationalFunction<F> operator*(const F& s, const RationalFunction<F>& f) {
  return f * s;
}

template <class F>
bool approx_equal(const RationalFunction<F>& f, const RationalFunction<F>& g, double tol) {
  const RationalFunction<F> d = f - g;
  for (const auto& [x, cs] : d.poles())
    for (const auto& c : cs)
      if (FieldTraits<F>::magnitude(c) > tol) return false;
  for (const auto& c : d.polynomial_part())
    if (FieldTraits<F>::magnitude(c) > tol) return false;
  return true;
}

/// Moebius map s -> (a s + b) / (c s + d).
template <class F>
struct Mobius {
  F a, b, c, d;

  F det() const { return a * d - b * c; }

  static Mobius inversion() { return Mobius{F(0), F(1), F(1), F(0)}; }
  static Mobius translation(const F& t) { return Mobius{F(1), t, F(0), F(1)}; }
  static Mobius scaling(const F& s) { return Mobius{s, F(0), F(0), F(1)}; }
};

namespace detail {

template <class F>
void require_invertible(const Mobius<F>& m) {
  if (FieldTraits<F>::is_zero(m.det(), 1e-14))
    throw DegenerateInputError("Moebius map is singular");
}

// (a s + b)/(c s + d) as a partial-fraction rational function of s.
template <class F>
RationalFunction<F> mobius_as_ratfun(const Mobius<F>& m) {
  if (m.c == F(0)) {
    return RationalFunction<F>::polynomial({m.b / m.d, m.a / m.d});
  }
  RationalFunction<F> f = RationalFunction<F>::constant(m.a / m.c);
  const F res = (m.b * m.c - m.a * m.d) / (m.c * m.c);
  return f + RationalFunction<F>::simple_pole(F(0) - m.d / m.c, res);
}

}  // namespace detail

/// f(phi(s)) for a Moebius map phi, as a rational function of s.
template <class F>
RationalFunction<F> mobius_substitute(const RationalFunction<F>& f, const Mobius<F>& m) {
  detail::require_invertible(m);
  RationalFunction<F> out;

  const auto& poly = f.polynomial_part();
  if (!poly.empty()) {
    const RationalFunction<F> phi = detail::mobius_as_ratfun(m);
    RationalFunction<F> acc = RationalFunction<F>::constant(poly.back());
    for (long k = static_cast<long>(poly.size()) - 2; k >= 0; --k)
      acc = acc * phi + RationalFunction<F>::constant(poly[k]);
    out = out + acc;
  }

  for (const auto& [x, cs] : f.poles()) {
    // 1/(phi(s) - x) is again Moebius unless x is the image of infinity.
    RationalFunction<F> g;
    const F acx = m.a - x * m.c;
    if (!FieldTraits<F>::is_zero(acx, 1e-14)) {
      g = detail::mobius_as_ratfun(Mobius<F>{m.c, m.d, acx, m.b - x * m.d});
    } else {
      const F scale = m.c / (m.b * m.c - m.a * m.d);
      g = RationalFunction<F>::polynomial({m.d * scale, m.c * scale});
    }
    RationalFunction<F> gp = RationalFunction<F>::constant(F(1));
    for (std::size_t mm = 1; mm <= cs.size(); ++mm) {
      gp = gp * g;
      if (!(cs[mm - 1] == F(0))) out = out + gp * cs[mm - 1];
    }
  }
  return out;
}

/// f(phi(s)) * phi'(s)^weight; the pullback of a weight-w density.
template <class F>
RationalFunction<F> mobius_pullback(const RationalFunction<F>& f, const Mobius<F>& m,
                                    long weight) {
  detail::require_invertible(m);
  RationalFunction<F> out = mobius_substitute(f, m);
  if (weight == 0) return out;
  if (m.c == F(0)) {
    const F dphi = m.a / m.d;
    return out * scalar_pow(dphi, weight);
  }
  // phi'(s) = det / (c s + d)^2 = (det/c^2) / (s + d/c)^2.
  const RationalFunction<F> dphi = RationalFunction<F>::pole_term(
      F(0) - m.d / m.c, {F(0), m.det() / (m.c * m.c)});
  for (long k = 0; k < weight; ++k) out = out * dphi;
  return out;
}

}  // namespace gaudin
