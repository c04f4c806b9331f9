#pragma once

// Hand-rolled random generators for property tests.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pnred/algebroid.hpp"
#include "pnred/symexpr.hpp"

namespace testgen {

// Expression tree rendered as text, with a structural derivative that does
// not go through the engine's canonical form.
struct Node {
  enum Kind { Const, Var, Sum, Prod, Pow, Exp } kind;
  int num = 0, den = 1;
  std::string var;
  std::shared_ptr<Node> a, b;
  int exponent = 0;
};
using NodePtr = std::shared_ptr<Node>;

inline NodePtr constant(int num, int den = 1) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Const;
  n->num = num;
  n->den = den;
  return n;
}
inline NodePtr variable(const std::string& v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Var;
  n->var = v;
  return n;
}
inline NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
inline NodePtr power(NodePtr a, int e) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Pow;
  n->a = std::move(a);
  n->exponent = e;
  return n;
}
inline NodePtr exponential(NodePtr linear) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Exp;
  n->a = std::move(linear);
  return n;
}

inline std::string render(const NodePtr& n) {
  switch (n->kind) {
    case Node::Const:
      return "(" + std::to_string(n->num) + (n->den != 1 ? "/" + std::to_string(n->den) : "") + ")";
    case Node::Var:
      return n->var;
    case Node::Sum:
      return "(" + render(n->a) + " + " + render(n->b) + ")";
    case Node::Prod:
      return "(" + render(n->a) + " * " + render(n->b) + ")";
    case Node::Pow:
      return "(" + render(n->a) + ")^" + std::to_string(n->exponent);
    case Node::Exp:
      return "exp(" + render(n->a) + ")";
  }
  return "";
}

inline NodePtr derivative(const NodePtr& n, const std::string& v) {
  switch (n->kind) {
    case Node::Const:
      return constant(0);
    case Node::Var:
      return constant(n->var == v ? 1 : 0);
    case Node::Sum:
      return binary(Node::Sum, derivative(n->a, v), derivative(n->b, v));
    case Node::Prod:
      return binary(Node::Sum, binary(Node::Prod, derivative(n->a, v), n->b),
                    binary(Node::Prod, n->a, derivative(n->b, v)));
    case Node::Pow:
      if (n->exponent == 0) return constant(0);
      return binary(Node::Prod, binary(Node::Prod, constant(n->exponent), power(n->a, n->exponent - 1)),
                    derivative(n->a, v));
    case Node::Exp:
      return binary(Node::Prod, n, derivative(n->a, v));
  }
  return constant(0);
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  NodePtr linear(const std::vector<std::string>& vars) {
    NodePtr out = constant(uniform_int(-2, 2), uniform_int(1, 2));
    for (const auto& v : vars) {
      int c = uniform_int(-2, 2);
      if (c) out = binary(Node::Sum, out, binary(Node::Prod, constant(c, uniform_int(1, 3)), variable(v)));
    }
    return out;
  }

  NodePtr tree(const std::vector<std::string>& vars, int depth) {
    int pick = depth <= 0 ? uniform_int(0, 1) : uniform_int(0, 5);
    switch (pick) {
      case 0:
        return constant(uniform_int(-3, 3), uniform_int(1, 3));
      case 1:
        return variable(vars[static_cast<std::size_t>(uniform_int(0, static_cast<int>(vars.size()) - 1))]);
      case 2:
        return binary(Node::Sum, tree(vars, depth - 1), tree(vars, depth - 1));
      case 3:
        return binary(Node::Prod, tree(vars, depth - 1), tree(vars, depth - 1));
      case 4:
        return power(tree(vars, depth - 1), uniform_int(0, 3));
      default:
        return exponential(linear(vars));
    }
  }

  // Member of the coefficient class, small enough for fast tests.
  pnred::Expr expr(const std::vector<std::string>& vars, int max_terms = 3, bool with_exp = true) {
    pnred::Expr out;
    int terms = uniform_int(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      pnred::Expr term(pnred::Rational(uniform_int(-3, 3), uniform_int(1, 2)));
      for (const auto& v : vars) {
        int e = uniform_int(0, 4) == 0 ? uniform_int(1, 2) : 0;
        if (e) term *= pnred::Expr::variable(v).pow(e);
      }
      if (with_exp && uniform_int(0, 3) == 0) {
        auto lin = pnred::parse(render(linear(vars)));
        term *= pnred::exp(lin);
      }
      out += term;
    }
    return out;
  }

  pnred::Section section(const pnred::LieAlgebroid& A, int max_terms = 2, bool with_exp = true) {
    pnred::Section X(A.rank());
    for (auto& x : X) x = uniform_int(0, 2) == 0 ? pnred::Expr() : expr(A.base_vars, max_terms, with_exp);
    return X;
  }

  pnred::KForm form(const pnred::LieAlgebroid& A, int degree) {
    pnred::KForm w(degree);
    pnred::for_each_increasing(static_cast<int>(A.rank()), degree, [&](const std::vector<int>& idx) {
      if (uniform_int(0, 1)) w.add(idx, expr(A.base_vars, 2));
    });
    return w;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testgen
