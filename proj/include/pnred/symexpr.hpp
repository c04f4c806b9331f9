#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pnred {

using Rational = mpq_class;
using VarId = std::uint32_t;

// Variable names are interned once per process; ids are stable for the
// lifetime of the program.
VarId intern(std::string_view name);
const std::string& var_name(VarId id);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raised when an operation would leave the polynomial-times-exponential class.
class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Laurent monomial: sorted (variable, nonzero exponent) pairs.
using Monomial = std::vector<std::pair<VarId, int>>;

// Affine form sum_i coeff_i x_i + constant, coefficients nonzero and sorted.
struct LinearForm {
  std::vector<std::pair<VarId, Rational>> coeffs;
  Rational constant;

  bool empty() const { return coeffs.empty() && constant == 0; }
  friend bool operator==(const LinearForm& a, const LinearForm& b) {
    return a.coeffs == b.coeffs && a.constant == b.constant;
  }
};

// coef * monomial * exp(lin)
struct Term {
  Rational coef;
  Monomial mono;
  LinearForm lin;
};

class Expr {
 public:
  Expr() = default;
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr variable(std::string_view name);
  static Expr variable(VarId id);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<Rational> constant_value() const;
  bool is_single_term() const { return terms_.size() == 1; }
  // True when every term is a rational constant or a degree-one variable
  // without exponential factor.
  bool is_affine() const;
  std::optional<LinearForm> as_linear_form() const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  Expr& operator+=(const Expr& other);
  Expr& operator-=(const Expr& other);
  Expr& operator*=(const Expr& other);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr pow(int exponent) const;
  // Reciprocal of a single nonzero term.
  Expr inverse() const;
  // Exact quotient when this is a multiple of divisor inside the class.
  std::optional<Expr> try_divide(const Expr& divisor) const;

  Expr diff(VarId var) const;
  Expr diff(std::string_view var) const { return diff(intern(var)); }
  Expr substitute(const std::map<VarId, Expr>& replacement) const;
  Expr substitute(const std::map<std::string, Expr>& replacement) const;

  std::set<std::string> free_vars() const;
  std::set<VarId> free_var_ids() const;
  std::string str() const;

  // Evaluate with any numeric type supporting +, *, /, exp.
  template <class T, class Lookup>
  T eval_with(Lookup&& lookup) const;

  static Expr from_terms(std::vector<Term> terms);

 private:
  std::vector<Term> terms_;
};

Expr exp(const Expr& argument);
Expr parse(std::string_view text);

// Integer power for numeric types; negative exponents go through 1/x.
template <class T>
T ipow(T base, int exponent) {
  bool invert = exponent < 0;
  unsigned e = invert ? static_cast<unsigned>(-exponent) : static_cast<unsigned>(exponent);
  T result(1.0);
  while (e) {
    if (e & 1u) result = result * base;
    base = base * base;
    e >>= 1u;
  }
  return invert ? T(1.0) / result : result;
}

template <class T, class Lookup>
T Expr::eval_with(Lookup&& lookup) const {
  using std::exp;
  T total(0.0);
  for (const auto& t : terms_) {
    T value(t.coef.get_d());
    for (const auto& [v, e] : t.mono) value = value * ipow(lookup(v), e);
    if (!t.lin.empty()) {
      T arg(t.lin.constant.get_d());
      for (const auto& [v, c] : t.lin.coeffs) arg = arg + T(c.get_d()) * lookup(v);
      value = value * exp(arg);
    }
    total = total + value;
  }
  return total;
}

// Forward-mode dual number for single-direction derivative checks.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  Dual(double v, double d) : value(v), deriv(d) {}
};
inline Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
inline Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
inline Dual operator*(Dual a, Dual b) { return {a.value * b.value, a.deriv * b.value + a.value * b.deriv}; }
inline Dual operator/(Dual a, Dual b) {
  return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
}
inline Dual exp(Dual a) {
  double e = std::exp(a.value);
  return {e, e * a.deriv};
}

// Numeric point: variable values plus optional tangent seeds for Dual mode.
struct Point {
  std::map<std::string, double> values;
  std::map<std::string, double> seeds;
};

double eval(const Expr& e, const Point& point);
Dual eval_dual(const Expr& e, const Point& point);

}  // namespace pnred
