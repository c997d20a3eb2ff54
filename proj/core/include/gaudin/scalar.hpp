#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace gaudin {

/// Exact rational scalar with arbitrary-precision numerator and denominator.
using Rat = boost::multiprecision::cpp_rational;
/// Floating-point scalar for the numeric instantiations.
using Cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (pole collisions, repeated
/// marked points, non-dominant weights, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem files or option combinations.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Work item exceeds a configured dimension / start cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

inline double rat_to_double(const Rat& x) { return x.convert_to<double>(); }

inline std::string rat_to_string(const Rat& x) {
  const auto num = boost::multiprecision::numerator(x);
  const auto den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Parses "p/q" or "p"; throws SchemaError on malformed input.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw SchemaError("empty rational literal");
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rat(boost::multiprecision::cpp_int(s));
    }
    boost::multiprecision::cpp_int num(s.substr(0, slash));
    boost::multiprecision::cpp_int den(s.substr(slash + 1));
    if (den == 0) throw SchemaError("rational literal with zero denominator: " + s);
    return Rat(num, den);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError("malformed rational literal: " + s);
  }
}

template <class F>
struct FieldTraits;

template <>
struct FieldTraits<Rat> {
  static constexpr bool is_exact = true;
  /// Trim threshold for canonical forms; exact field trims exact zeros only.
  static bool is_zero(const Rat& x, double = 0.0) { return x == 0; }
  static Rat from_int(long n) { return Rat(n); }
  static Rat from_rat(const Rat& x) { return x; }
  static double magnitude(const Rat& x) { return std::abs(rat_to_double(x)); }
  static std::string describe(const Rat& x) { return rat_to_string(x); }
};

template <>
struct FieldTraits<Cplx> {
  static constexpr bool is_exact = false;
  /// Canonical-form trim threshold for coefficients.
  static constexpr double coeff_tol = 1e-12;
  /// Two pole locations closer than this (but not equal) are a degeneracy.
  static constexpr double pole_tol = 1e-9;
  static bool is_zero(const Cplx& x, double tol = coeff_tol) {
    return std::abs(x) <= tol;
  }
  static Cplx from_int(long n) { return Cplx(static_cast<double>(n), 0.0); }
  static Cplx from_rat(const Rat& x) { return Cplx(rat_to_double(x), 0.0); }
  static double magnitude(const Cplx& x) { return std::abs(x); }
  static std::string describe(const Cplx& x) {
    return "(" + std::to_string(x.real()) + "," + std::to_string(x.imag()) + ")";
  }
};

/// Strict weak order usable as a map key comparator in both fields.
template <class F>
struct ScalarLess;

template <>
struct ScalarLess<Rat> {
  bool operator()(const Rat& a, const Rat& b) const { return a < b; }
};

template <>
struct ScalarLess<Cplx> {
  bool operator()(const Cplx& a, const Cplx& b) const {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  }
};

/// Pole-collision predicate: exact equality over Rat, pole_tol over Cplx.
template <class F>
bool points_coincide(const F& a, const F& b) {
  if constexpr (FieldTraits<F>::is_exact)
    return a == b;
  else
    return FieldTraits<F>::is_zero(a - b, FieldTraits<F>::pole_tol);
}

template <class F>
F scalar_pow(const F& base, long n) {
  if (n < 0) throw Error("scalar_pow: negative exponent");
  F acc = FieldTraits<F>::from_int(1);
  F b = base;
  long e = n;
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

inline Rat binomial_rat(long n, long k) {
  if (k < 0) return Rat(0);
  Rat r(1);
  for (long j = 0; j < k; ++j) {
    r *= Rat(n - j);
    r /= Rat(j + 1);
  }
  return r;
}

}  // namespace gaudin
