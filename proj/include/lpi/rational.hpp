#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <ostream>
#include <stdexcept>
#include <string>

namespace lpi {

// Exact arbitrary-precision arithmetic. cpp_rational keeps values in lowest
// terms with a positive denominator, which is exactly the invariant we need.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

// Largest integer <= q. cpp_int division truncates toward zero.
inline BigInt rat_floor(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt t = n / d;
  if (n < 0 && t * d != n) --t;
  return t;
}

inline BigInt rat_ceil(const Rational& q) { return -rat_floor(-q); }

inline bool is_even(const BigInt& n) { return n % 2 == 0; }

inline std::string to_string(const Rational& q) { return q.str(); }

// A rational extended with two infinities. Used for bound bookkeeping where
// "no constraint" and "unreachable" need explicit representations.
class ExtRational {
 public:
  ExtRational() : kind_(Kind::Finite), value_(0) {}
  explicit ExtRational(Rational v) : kind_(Kind::Finite), value_(std::move(v)) {}

  static ExtRational neg_inf() { return ExtRational(Kind::NegInf); }
  static ExtRational pos_inf() { return ExtRational(Kind::PosInf); }

  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }

  const Rational& value() const {
    if (!is_finite()) throw std::logic_error("ExtRational: value() on infinity");
    return value_;
  }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::Finite || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ == b.kind_) return a.kind_ == Kind::Finite && a.value_ < b.value_;
    if (a.kind_ == Kind::NegInf) return true;
    if (b.kind_ == Kind::PosInf) return true;
    return false;
  }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) { return a < b || a == b; }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return b <= a; }

  // Addition of a finite increment; infinities absorb.
  ExtRational plus(const Rational& d) const {
    return is_finite() ? ExtRational(value_ + d) : *this;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::NegInf: return "-inf";
      case Kind::PosInf: return "inf";
      default: return value_.str();
    }
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtRational& e) {
    return os << e.str();
  }

 private:
  enum class Kind { NegInf, Finite, PosInf };
  explicit ExtRational(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  Rational value_;
};

inline const ExtRational& ext_max(const ExtRational& a, const ExtRational& b) {
  return a < b ? b : a;
}
inline const ExtRational& ext_min(const ExtRational& a, const ExtRational& b) {
  return b < a ? b : a;
}

// Shared error types. Budget overruns are recoverable (the engine reports a
// partial result); logic errors indicate a bug and should surface loudly.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct EngineBug : std::logic_error {
  explicit EngineBug(const std::string& what) : std::logic_error(what) {}
};

}  // namespace lpi
