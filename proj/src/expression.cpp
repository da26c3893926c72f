#include "viscowave/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <utility>

#include "viscowave/field.hpp"

namespace viscowave {

struct Expression::Node {
  enum class Kind { kNumber, kVariable, kUnary, kBinary, kCall1, kCall2 };
  Kind kind = Kind::kNumber;
  double value = 0.0;
  std::size_t var = 0;
  char op = 0;
  std::string fn;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

double call1(const std::string& fn, double a) {
  if (fn == "sin") return std::sin(a);
  if (fn == "cos") return std::cos(a);
  if (fn == "tan") return std::tan(a);
  if (fn == "exp") return std::exp(a);
  if (fn == "log") return std::log(a);
  if (fn == "sqrt") return std::sqrt(a);
  if (fn == "abs") return std::fabs(a);
  if (fn == "tanh") return std::tanh(a);
  if (fn == "sinh") return std::sinh(a);
  if (fn == "cosh") return std::cosh(a);
  return std::nan("");
}

double call2(const std::string& fn, double a, double b) {
  if (fn == "pow") return std::pow(a, b);
  if (fn == "min") return std::fmin(a, b);
  if (fn == "max") return std::fmax(a, b);
  return std::nan("");
}

bool is_unary_fn(const std::string& s) {
  return s == "sin" || s == "cos" || s == "tan" || s == "exp" || s == "log" || s == "sqrt" ||
         s == "abs" || s == "tanh" || s == "sinh" || s == "cosh";
}

bool is_binary_fn(const std::string& s) { return s == "pow" || s == "min" || s == "max"; }

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  NodePtr parse_all() {
    auto node = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("expression '" + std::string(text_) + "': " + msg + " at column " +
                std::to_string(pos_ + 1));
  }

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

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static NodePtr binary(char op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::kBinary;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = binary('+', lhs, parse_product());
      } else if (accept('-')) {
        lhs = binary('-', lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary('*', lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary('/', lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::kUnary;
      n->op = '-';
      n->lhs = parse_unary();
      return n;
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return binary('^', base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      auto inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character");
  }

  NodePtr parse_number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    auto n = std::make_shared<Expression::Node>();
    n->value = v;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::kVariable;
        n->var = i;
        return n;
      }
    }
    if (name == "pi" || name == "e") {
      auto n = std::make_shared<Expression::Node>();
      n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    if (is_unary_fn(name)) {
      expect('(');
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::kCall1;
      n->fn = name;
      n->lhs = parse_sum();
      expect(')');
      return n;
    }
    if (is_binary_fn(name)) {
      expect('(');
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::kCall2;
      n->fn = name;
      n->lhs = parse_sum();
      expect(',');
      n->rhs = parse_sum();
      expect(')');
      return n;
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, std::span<const double> vals) {
  switch (n.kind) {
    case Kind::kNumber:
      return n.value;
    case Kind::kVariable:
      return vals[n.var];
    case Kind::kUnary:
      return -eval(*n.lhs, vals);
    case Kind::kBinary: {
      const double a = eval(*n.lhs, vals);
      const double b = eval(*n.rhs, vals);
      switch (n.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          return a / b;
        default:
          return std::pow(a, b);
      }
    }
    case Kind::kCall1:
      return call1(n.fn, eval(*n.lhs, vals));
    case Kind::kCall2:
      return call2(n.fn, eval(*n.lhs, vals), eval(*n.rhs, vals));
  }
  return std::nan("");
}

bool has_variable(const Expression::Node& n) {
  if (n.kind == Kind::kVariable) return true;
  if (n.lhs && has_variable(*n.lhs)) return true;
  if (n.rhs && has_variable(*n.rhs)) return true;
  return false;
}

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  Parser p(text, e.variables_);
  e.root_ = p.parse_all();
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  e.text_ = buf;
  auto n = std::make_shared<Node>();
  n->value = value;
  e.root_ = n;
  return e;
}

double Expression::operator()(std::span<const double> values) const {
  if (values.size() < variables_.size()) {
    throw Error("expression '" + text_ + "': expected " + std::to_string(variables_.size()) +
                " arguments");
  }
  return eval(*root_, values);
}

double Expression::operator()(double a) const {
  const double v[1] = {a};
  return (*this)(std::span<const double>(v, variables_.size() > 1 ? 0 : 1));
}

double Expression::operator()(double a, double b) const {
  const double v[2] = {a, b};
  return (*this)(std::span<const double>(v, 2));
}

bool Expression::is_constant() const { return !has_variable(*root_); }

}  // namespace viscowave
