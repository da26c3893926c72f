#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viscowave {

/// Compiled arithmetic expression over named real variables.
///
/// Grammar: `+ - * / ^`, unary minus, parentheses, numeric literals,
/// constants `pi` and `e`, and the functions sin cos tan exp log sqrt abs
/// tanh sinh cosh, pow(a,b), min(a,b), max(a,b). `^` is right associative.
/// Used for coefficient fields, initial data, prehistories and delay weights
/// in config files.
class Expression {
 public:
  struct Node;

  /// Throws viscowave::Error with the offending column on malformed input
  /// or on an identifier that is neither a variable nor a known name.
  static Expression parse(std::string_view text, std::vector<std::string> variables);

  static Expression constant(double value);

  double operator()(std::span<const double> values) const;
  double operator()(double a) const;
  double operator()(double a, double b) const;

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }
  bool is_constant() const;

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace viscowave
