#pragma once

#include <functional>
#include <memory>
#include <string>

namespace seabed {

// Arithmetic expressions in one variable X: numbers, X, pi, + - * / ^,
// parentheses, and sin/cos/exp/tanh/sqrt/abs. Parse errors throw ConfigError
// with the offending position.
class Expression {
public:
  static Expression parse(const std::string& text);

  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace seabed
