#pragma once

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "lpi/rational.hpp"
#include "lpi/var.hpp"

namespace lpi {

// A linear expression sum(c_i * v_i) + constant. The coefficient map never
// holds zeros, so equal expressions compare equal structurally.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(Rational constant) : constant_(std::move(constant)) {}

  static LinearExpr constant(Rational c) { return LinearExpr(std::move(c)); }

  static LinearExpr var(const VarId& v, Rational coeff = Rational(1)) {
    LinearExpr e;
    e.set_coeff(v, std::move(coeff));
    return e;
  }

  const std::map<VarId, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant() const { return constant_; }

  Rational coeff(const VarId& v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  void set_coeff(const VarId& v, Rational c) {
    if (c == 0)
      coeffs_.erase(v);
    else
      coeffs_[v] = std::move(c);
  }

  void add_term(const VarId& v, const Rational& c) { set_coeff(v, coeff(v) + c); }
  void add_constant(const Rational& c) { constant_ += c; }

  bool is_constant() const { return coeffs_.empty(); }

  LinearExpr& operator+=(const LinearExpr& o) {
    for (const auto& [v, c] : o.coeffs_) add_term(v, c);
    constant_ += o.constant_;
    return *this;
  }
  LinearExpr& operator-=(const LinearExpr& o) {
    for (const auto& [v, c] : o.coeffs_) add_term(v, -c);
    constant_ -= o.constant_;
    return *this;
  }
  LinearExpr& operator*=(const Rational& k) {
    if (k == 0) {
      coeffs_.clear();
      constant_ = 0;
      return *this;
    }
    for (auto& [v, c] : coeffs_) c *= k;
    constant_ *= k;
    return *this;
  }

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, const Rational& k) { return a *= k; }
  friend LinearExpr operator-(LinearExpr a) { return a *= Rational(-1); }
  friend LinearExpr operator+(LinearExpr a, const Rational& c) {
    a.add_constant(c);
    return a;
  }
  friend LinearExpr operator-(LinearExpr a, const Rational& c) {
    a.add_constant(-c);
    return a;
  }

  friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const LinearExpr& a, const LinearExpr& b) { return !(a == b); }
  friend bool operator<(const LinearExpr& a, const LinearExpr& b) {
    if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
    return a.constant_ < b.constant_;
  }

  std::set<VarId> vars() const {
    std::set<VarId> out;
    for (const auto& [v, c] : coeffs_) out.insert(v);
    return out;
  }

  // Evaluate under a lookup; throws via the lookup if a variable is missing.
  Rational evaluate(const std::function<Rational(const VarId&)>& lookup) const {
    Rational r = constant_;
    for (const auto& [v, c] : coeffs_) r += c * lookup(v);
    return r;
  }

  LinearExpr map_vars(const std::function<VarId(const VarId&)>& fn) const {
    LinearExpr out(constant_);
    for (const auto& [v, c] : coeffs_) out.add_term(fn(v), c);
    return out;
  }

  std::string str() const {
    if (coeffs_.empty()) return constant_.str();
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, c] : coeffs_) {
      if (first) {
        if (c == -1)
          os << "-";
        else if (c != 1)
          os << c.str() << "*";
      } else {
        os << (c > 0 ? " + " : " - ");
        Rational a = abs(c);
        if (a != 1) os << a.str() << "*";
      }
      os << v.str();
      first = false;
    }
    if (constant_ > 0) os << " + " << constant_.str();
    if (constant_ < 0) os << " - " << Rational(-constant_).str();
    return os.str();
  }

 private:
  std::map<VarId, Rational> coeffs_;
  Rational constant_{0};
};

}  // namespace lpi
