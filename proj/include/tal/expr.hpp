#pragma once

#include <map>
#include <memory>
#include <string>

namespace tal {

/// A parsed scalar expression in one or more named variables.
///
/// Grammar: numbers, identifiers, + - * / ^ (right-assoc), parentheses and
/// the call forms exp log sqrt abs sin cos tanh. Values are immutable after
/// parsing; evaluation and differentiation are const and reentrant.
class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);
  static Expr constant(double value);
  static Expr variable(const std::string& name);

  bool valid() const { return root_ != nullptr; }

  /// Evaluate with the single variable "x" bound.
  double operator()(double x) const;

  /// Evaluate with an explicit variable binding.
  double eval(const std::map<std::string, double>& vars) const;

  /// Exact symbolic derivative with respect to `var`.
  Expr derivative(const std::string& var = "x") const;

  /// True when the expression references the given variable.
  bool depends_on(const std::string& var) const;

  std::string to_string() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace tal
