#include "seabed/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "seabed/errors.hpp"

namespace seabed {

struct Expression::Node {
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, call };
  Kind kind;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double x) const {
    switch (kind) {
      case Kind::number: return value;
      case Kind::variable: return x;
      case Kind::add: return a->eval(x) + b->eval(x);
      case Kind::sub: return a->eval(x) - b->eval(x);
      case Kind::mul: return a->eval(x) * b->eval(x);
      case Kind::div: return a->eval(x) / b->eval(x);
      case Kind::pow: return std::pow(a->eval(x), b->eval(x));
      case Kind::neg: return -a->eval(x);
      case Kind::call: return fn(a->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_num(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::number;
  n->value = v;
  return n;
}

struct Parser {
  const std::string& s;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s + "': " + msg + " at position " + std::to_string(pos));
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr n = parse_term();
    while (true) {
      if (eat('+'))
        n = make(Kind::add, n, parse_term());
      else if (eat('-'))
        n = make(Kind::sub, n, parse_term());
      else
        return n;
    }
  }

  NodePtr parse_term() {
    NodePtr n = parse_factor();
    while (true) {
      if (eat('*'))
        n = make(Kind::mul, n, parse_factor());
      else if (eat('/'))
        n = make(Kind::div, n, parse_factor());
      else
        return n;
    }
  }

  // Unary minus binds looser than '^', so -X^2 means -(X^2).
  NodePtr parse_factor() {
    if (eat('-')) return make(Kind::neg, parse_factor());
    if (eat('+')) return parse_factor();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) return make(Kind::pow, base, parse_factor());  // right associative
    return base;
  }

  NodePtr parse_primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = static_cast<size_t>(end - s.c_str());
      return make_num(v);
    }
    if (c == '(') {
      ++pos;
      NodePtr n = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "X" || name == "x") return make(Kind::variable);
      if (name == "pi") return make_num(3.14159265358979323846);
      double (*fn)(double) = nullptr;
      if (name == "sin")
        fn = [](double v) { return std::sin(v); };
      else if (name == "cos")
        fn = [](double v) { return std::cos(v); };
      else if (name == "exp")
        fn = [](double v) { return std::exp(v); };
      else if (name == "tanh")
        fn = [](double v) { return std::tanh(v); };
      else if (name == "sqrt")
        fn = [](double v) { return std::sqrt(v); };
      else if (name == "abs")
        fn = [](double v) { return std::abs(v); };
      else
        fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      NodePtr arg = parse_expr();
      if (!eat(')')) fail("missing ')'");
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::call;
      n->fn = fn;
      n->a = std::move(arg);
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p{text};
  Expression e;
  e.text_ = text;
  e.root_ = p.parse_expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

double Expression::operator()(double x) const { return root_->eval(x); }

}  // namespace seabed
