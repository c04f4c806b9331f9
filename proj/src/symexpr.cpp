#include "pnred/symexpr.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace pnred {

namespace {

struct VarRegistry {
  std::mutex mutex;
  std::deque<std::string> names;
  std::unordered_map<std::string, VarId> ids;
};

VarRegistry& registry() {
  static VarRegistry r;
  return r;
}

bool key_less(const Term& a, const Term& b) {
  if (a.mono != b.mono) return a.mono < b.mono;
  if (a.lin.coeffs != b.lin.coeffs) return a.lin.coeffs < b.lin.coeffs;
  return a.lin.constant < b.lin.constant;
}

bool key_equal(const Term& a, const Term& b) {
  return a.mono == b.mono && a.lin == b.lin;
}

void canonicalize(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), key_less);
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && key_equal(out.back(), t)) {
      out.back().coef += t.coef;
    } else {
      if (!out.empty() && out.back().coef == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coef == 0) out.pop_back();
  terms = std::move(out);
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

LinearForm lin_add(const LinearForm& a, const LinearForm& b, const Rational& scale = 1) {
  LinearForm out;
  out.constant = a.constant + scale * b.constant;
  std::size_t i = 0, j = 0;
  while (i < a.coeffs.size() || j < b.coeffs.size()) {
    if (j == b.coeffs.size() || (i < a.coeffs.size() && a.coeffs[i].first < b.coeffs[j].first)) {
      out.coeffs.push_back(a.coeffs[i++]);
    } else if (i == a.coeffs.size() || b.coeffs[j].first < a.coeffs[i].first) {
      out.coeffs.emplace_back(b.coeffs[j].first, scale * b.coeffs[j].second);
      ++j;
    } else {
      Rational c = a.coeffs[i].second + scale * b.coeffs[j].second;
      if (c != 0) out.coeffs.emplace_back(a.coeffs[i].first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

Term term_mul(const Term& a, const Term& b) {
  return Term{a.coef * b.coef, mono_mul(a.mono, b.mono), lin_add(a.lin, b.lin)};
}

Term term_inverse(const Term& t) {
  Term out;
  out.coef = 1 / t.coef;
  for (const auto& [v, e] : t.mono) out.mono.emplace_back(v, -e);
  for (const auto& [v, c] : t.lin.coeffs) out.lin.coeffs.emplace_back(v, -c);
  out.lin.constant = -t.lin.constant;
  return out;
}

// Lexicographic group order on the exponent data of a term (coefficient
// ignored). Compatible with multiplication, which the division loop needs.
template <class Vec, class Zero>
int sparse_cmp(const Vec& a, const Vec& b, const Zero& zero) {
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      return a[i].second > zero ? 1 : -1;
    }
    if (i == a.size() || b[j].first < a[i].first) {
      return b[j].second > zero ? -1 : 1;
    }
    if (a[i].second != b[j].second) return a[i].second > b[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  return 0;
}

int group_cmp(const Term& a, const Term& b) {
  if (int c = sparse_cmp(a.mono, b.mono, 0)) return c;
  if (int c = sparse_cmp(a.lin.coeffs, b.lin.coeffs, Rational(0))) return c;
  if (a.lin.constant != b.lin.constant) return a.lin.constant > b.lin.constant ? 1 : -1;
  return 0;
}

const Term& leading(const std::vector<Term>& terms) {
  return *std::max_element(terms.begin(), terms.end(),
                           [](const Term& a, const Term& b) { return group_cmp(a, b) < 0; });
}

const Term& trailing(const std::vector<Term>& terms) {
  return *std::min_element(terms.begin(), terms.end(),
                           [](const Term& a, const Term& b) { return group_cmp(a, b) < 0; });
}

std::string lin_str(const LinearForm& lf) {
  std::vector<std::pair<std::string, Rational>> named;
  for (const auto& [v, c] : lf.coeffs) named.emplace_back(var_name(v), c);
  std::sort(named.begin(), named.end());
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rational& c, const std::string& name) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (name.empty()) {
      os << mag.get_str();
    } else if (mag == 1) {
      os << name;
    } else {
      os << mag.get_str() << "*" << name;
    }
  };
  for (const auto& [name, c] : named) emit(c, name);
  if (lf.constant != 0) emit(lf.constant, "");
  return os.str();
}

using PrintKey = std::tuple<std::vector<std::pair<std::string, int>>,
                            std::vector<std::pair<std::string, Rational>>, Rational>;

PrintKey print_key(const Term& t) {
  PrintKey k;
  for (const auto& [v, e] : t.mono) std::get<0>(k).emplace_back(var_name(v), -e);
  for (const auto& [v, c] : t.lin.coeffs) std::get<1>(k).emplace_back(var_name(v), c);
  std::sort(std::get<0>(k).begin(), std::get<0>(k).end());
  std::sort(std::get<1>(k).begin(), std::get<1>(k).end());
  std::get<2>(k) = t.lin.constant;
  return k;
}

std::string term_body(const Term& t) {
  std::vector<std::pair<std::string, int>> named;
  for (const auto& [v, e] : t.mono) named.emplace_back(var_name(v), e);
  std::sort(named.begin(), named.end());
  std::vector<std::string> factors;
  for (const auto& [name, e] : named) {
    factors.push_back(e == 1 ? name : name + "^" + std::to_string(e));
  }
  if (!t.lin.empty()) factors.push_back("exp(" + lin_str(t.lin) + ")");
  Rational mag = abs(t.coef);
  std::string out;
  if (factors.empty()) return mag.get_str();
  if (mag != 1) out = mag.get_str() + "*";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "*";
    out += factors[i];
  }
  return out;
}

}  // namespace

VarId intern(std::string_view name) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mutex);
  auto it = r.ids.find(std::string(name));
  if (it != r.ids.end()) return it->second;
  auto id = static_cast<VarId>(r.names.size());
  r.names.emplace_back(name);
  r.ids.emplace(std::string(name), id);
  return id;
}

const std::string& var_name(VarId id) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mutex);
  return r.names.at(id);
}

Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(long value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) {
  Rational reduced = value;
  reduced.canonicalize();
  if (reduced != 0) terms_.push_back(Term{reduced, {}, {}});
}

Expr Expr::variable(std::string_view name) { return variable(intern(name)); }

Expr Expr::variable(VarId id) {
  Expr e;
  e.terms_.push_back(Term{1, {{id, 1}}, {}});
  return e;
}

Expr Expr::from_terms(std::vector<Term> terms) {
  for (auto& t : terms) {
    std::sort(t.mono.begin(), t.mono.end());
    std::sort(t.lin.coeffs.begin(), t.lin.coeffs.end());
  }
  canonicalize(terms);
  Expr e;
  e.terms_ = std::move(terms);
  return e;
}

bool Expr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty() && terms_[0].lin.empty());
}

std::optional<Rational> Expr::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (is_constant()) return terms_[0].coef;
  return std::nullopt;
}

bool Expr::is_affine() const { return as_linear_form().has_value(); }

std::optional<LinearForm> Expr::as_linear_form() const {
  LinearForm lf;
  for (const auto& t : terms_) {
    if (!t.lin.empty()) return std::nullopt;
    if (t.mono.empty()) {
      lf.constant += t.coef;
    } else if (t.mono.size() == 1 && t.mono[0].second == 1) {
      lf.coeffs.emplace_back(t.mono[0].first, t.coef);
    } else {
      return std::nullopt;
    }
  }
  std::sort(lf.coeffs.begin(), lf.coeffs.end());
  return lf;
}

Expr& Expr::operator+=(const Expr& other) {
  *this = *this + other;
  return *this;
}

Expr& Expr::operator-=(const Expr& other) {
  *this = *this - other;
  return *this;
}

Expr& Expr::operator*=(const Expr& other) {
  *this = *this * other;
  return *this;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  Expr out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    if (j == b.terms_.size() || (i < a.terms_.size() && key_less(a.terms_[i], b.terms_[j]))) {
      out.terms_.push_back(a.terms_[i++]);
    } else if (i == a.terms_.size() || key_less(b.terms_[j], a.terms_[i])) {
      out.terms_.push_back(b.terms_[j++]);
    } else {
      Rational c = a.terms_[i].coef + b.terms_[j].coef;
      if (c != 0) {
        out.terms_.push_back(a.terms_[i]);
        out.terms_.back().coef = c;
      }
      ++i;
      ++j;
    }
  }
  return out;
}

Expr operator-(const Expr& a) {
  Expr out = a;
  for (auto& t : out.terms_) t.coef = -t.coef;
  return out;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  std::vector<Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) terms.push_back(term_mul(x, y));
  }
  if (a.terms_.size() > 1 && b.terms_.size() > 1) canonicalize(terms);
  else if (terms.size() > 1) {
    // Multiplying by a single term preserves distinctness, only order may change.
    std::sort(terms.begin(), terms.end(), key_less);
  }
  Expr out;
  out.terms_ = std::move(terms);
  return out;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].coef != b.terms_[i].coef || !key_equal(a.terms_[i], b.terms_[i])) return false;
  }
  return true;
}

Expr Expr::inverse() const {
  if (terms_.size() != 1) throw ExprError("reciprocal of a sum is outside the expression class: " + str());
  Expr out;
  out.terms_.push_back(term_inverse(terms_[0]));
  return out;
}

Expr Expr::pow(int exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  Expr result(1);
  Expr base = *this;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

std::optional<Expr> Expr::try_divide(const Expr& divisor) const {
  if (divisor.is_zero()) throw ExprError("division by zero");
  if (is_zero()) return Expr();
  if (divisor.is_single_term()) return *this * divisor.inverse();
  const Term lead_d = leading(divisor.terms_);
  const Term trail_d = trailing(divisor.terms_);
  const Term floor = term_mul(trailing(terms_), term_inverse(trail_d));
  Expr remainder = *this;
  std::vector<Term> quotient;
  const std::size_t limit = 64 + 8 * terms_.size() * divisor.terms_.size();
  for (std::size_t step = 0; !remainder.is_zero(); ++step) {
    if (step > limit) return std::nullopt;
    Term t = term_mul(leading(remainder.terms_), term_inverse(lead_d));
    if (group_cmp(t, floor) < 0) return std::nullopt;
    Expr single;
    single.terms_.push_back(t);
    remainder = remainder - single * divisor;
    quotient.push_back(std::move(t));
  }
  return from_terms(std::move(quotient));
}

Expr Expr::diff(VarId var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    for (std::size_t k = 0; k < t.mono.size(); ++k) {
      if (t.mono[k].first != var) continue;
      Term d = t;
      int e = t.mono[k].second;
      d.coef *= e;
      if (e == 1) {
        d.mono.erase(d.mono.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        d.mono[k].second = e - 1;
      }
      out.push_back(std::move(d));
    }
    for (const auto& [v, c] : t.lin.coeffs) {
      if (v != var) continue;
      Term d = t;
      d.coef *= c;
      out.push_back(std::move(d));
    }
  }
  canonicalize(out);
  Expr e;
  e.terms_ = std::move(out);
  return e;
}

Expr Expr::substitute(const std::map<std::string, Expr>& replacement) const {
  std::map<VarId, Expr> by_id;
  for (const auto& [name, e] : replacement) by_id.emplace(intern(name), e);
  return substitute(by_id);
}

Expr Expr::substitute(const std::map<VarId, Expr>& replacement) const {
  std::map<VarId, LinearForm> affine;
  Expr total;
  for (const auto& t : terms_) {
    Term kept{t.coef, {}, {}};
    Expr factor(1);
    for (const auto& [v, e] : t.mono) {
      auto it = replacement.find(v);
      if (it == replacement.end()) {
        kept.mono.emplace_back(v, e);
      } else {
        factor = factor * it->second.pow(e);
      }
    }
    LinearForm lin;
    lin.constant = t.lin.constant;
    for (const auto& [v, c] : t.lin.coeffs) {
      auto it = replacement.find(v);
      if (it == replacement.end()) {
        LinearForm single;
        single.coeffs.emplace_back(v, c);
        lin = lin_add(lin, single);
        continue;
      }
      auto cached = affine.find(v);
      if (cached == affine.end()) {
        auto lf = it->second.as_linear_form();
        if (!lf) {
          throw ExprError("non-affine substitution for " + var_name(v) + " inside exp: " + it->second.str());
        }
        cached = affine.emplace(v, *lf).first;
      }
      lin = lin_add(lin, cached->second, c);
    }
    kept.lin = std::move(lin);
    Expr piece;
    piece.terms_.push_back(std::move(kept));
    total += piece * factor;
  }
  return total;
}

std::set<VarId> Expr::free_var_ids() const {
  std::set<VarId> out;
  for (const auto& t : terms_) {
    for (const auto& [v, e] : t.mono) out.insert(v);
    for (const auto& [v, c] : t.lin.coeffs) out.insert(v);
  }
  return out;
}

std::set<std::string> Expr::free_vars() const {
  std::set<std::string> out;
  for (VarId v : free_var_ids()) out.insert(var_name(v));
  return out;
}

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<PrintKey, const Term*>> order;
  order.reserve(terms_.size());
  for (const auto& t : terms_) order.emplace_back(print_key(t), &t);
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  bool first = true;
  for (const auto& [key, t] : order) {
    if (first) {
      if (t->coef < 0) out += "-";
    } else {
      out += t->coef < 0 ? " - " : " + ";
    }
    first = false;
    out += term_body(*t);
  }
  return out;
}

Expr exp(const Expr& argument) {
  auto lf = argument.as_linear_form();
  if (!lf) throw ExprError("exp argument must be affine: " + argument.str());
  if (lf->empty()) return Expr(1);
  return Expr::from_terms({Term{1, {}, *lf}});
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr acc = product();
    for (;;) {
      if (accept('+')) {
        acc += product();
      } else if (accept('-')) {
        acc -= product();
      } else {
        return acc;
      }
    }
  }

  Expr product() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (!d.is_single_term()) {
          throw ParseError(d.is_zero() ? "division by zero" : "division by a sum", at);
        }
        acc *= d.inverse();
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  int integer_exponent() {
    skip_ws();
    bool paren = accept('(');
    bool negative = false;
    if (accept('-')) negative = true;
    else accept('+');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    if (pos_ - start > 6) fail("exponent too large");
    int value = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (paren && !accept(')')) fail("expected ')'");
    return negative ? -value : value;
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      std::size_t at = pos_;
      int e = integer_exponent();
      if (e < 0 && !base.is_single_term()) throw ParseError("negative power of a sum", at);
      return base.pow(e);
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.') fail("decimal literals are not supported");
      return Expr(Rational(mpz_class(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "exp") {
        if (!accept('(')) fail("expected '(' after exp");
        std::size_t at = pos_;
        Expr arg = sum();
        if (!accept(')')) fail("expected ')'");
        if (!arg.is_affine()) throw ParseError("exp argument must be affine", at);
        return pnred::exp(arg);
      }
      return Expr::variable(name);
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

double eval(const Expr& e, const Point& point) {
  return e.eval_with<double>([&](VarId v) {
    auto it = point.values.find(var_name(v));
    if (it == point.values.end()) throw ExprError("unbound variable " + var_name(v));
    return it->second;
  });
}

Dual eval_dual(const Expr& e, const Point& point) {
  return e.eval_with<Dual>([&](VarId v) {
    const std::string& name = var_name(v);
    auto it = point.values.find(name);
    if (it == point.values.end()) throw ExprError("unbound variable " + name);
    auto seed = point.seeds.find(name);
    return Dual(it->second, seed == point.seeds.end() ? 0.0 : seed->second);
  });
}

}  // namespace pnred
