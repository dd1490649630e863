#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "nullbound/dual.hpp"
#include "nullbound/error.hpp"

namespace nullbound {

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Abs, Tanh };
enum class BinaryOp { Add, Sub, Mul, Div };

/// Immutable expression tree over the coordinates x0..x{n-1}.
///
/// Nodes are shared and never mutated after construction, so an Expression
/// can be copied freely and evaluated from several threads at once.
class Expression {
 public:
  enum class Kind { Constant, Variable, Unary, Binary, Power };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;  // constant value, or the exponent of a Power node
    int index = 0;       // variable index
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expression();  // the constant 0
  explicit Expression(std::shared_ptr<const Node> root);

  static Expression constant(double c);
  static Expression variable(int index);
  static Expression unary(UnaryOp op, const Expression& arg);
  static Expression binary(BinaryOp op, const Expression& lhs, const Expression& rhs);
  static Expression power(const Expression& base, double exponent);

  const Node& root() const { return *root_; }

  /// Largest variable index used, or -1 for a constant expression.
  int max_variable() const;
  bool is_constant() const { return max_variable() < 0; }

  /// Evaluates at `x`; T is double or SecondOrderDual. Throws Error(Domain)
  /// for log/sqrt of a negative, division by zero, or any non-finite result.
  template <typename T>
  T evaluate(std::span<const T> x) const;

 private:
  std::shared_ptr<const Node> root_;
};

/// Parses a single expression. Variables must satisfy index < dimension.
Expression parse_expression(std::string_view source, int dimension = kMaxDimension);

/// Fully parenthesised text that parses back to an expression evaluating
/// identically (constants printed with 17 significant digits).
std::string to_string(const Expression& e);

namespace detail {

[[noreturn]] void throw_domain(const char* what, double argument);

template <typename T>
T checked(T r) {
  if (!std::isfinite(value_of(r))) throw_domain("non-finite intermediate value", value_of(r));
  return r;
}

template <typename T>
T evaluate_node(const Expression::Node& node, std::span<const T> x) {
  using Kind = Expression::Kind;
  switch (node.kind) {
    case Kind::Constant:
      if constexpr (std::is_same_v<T, double>) {
        return node.value;
      } else {
        return T::constant(node.value, x.empty() ? 0 : x[0].dimension());
      }
    case Kind::Variable:
      return x[node.index];
    case Kind::Unary: {
      const T a = evaluate_node(*node.lhs, x);
      const double av = value_of(a);
      using std::abs, std::cos, std::exp, std::log, std::sin, std::sqrt, std::tanh;
      switch (node.unary) {
        case UnaryOp::Neg: return checked(-a);
        case UnaryOp::Sin: return checked(sin(a));
        case UnaryOp::Cos: return checked(cos(a));
        case UnaryOp::Exp: return checked(exp(a));
        case UnaryOp::Log:
          if (!(av > 0.0)) throw_domain("log of non-positive argument", av);
          return checked(log(a));
        case UnaryOp::Sqrt:
          if (av < 0.0) throw_domain("sqrt of negative argument", av);
          return checked(sqrt(a));
        case UnaryOp::Abs: return checked(abs(a));
        case UnaryOp::Tanh: return checked(tanh(a));
      }
      break;
    }
    case Kind::Binary: {
      const T a = evaluate_node(*node.lhs, x);
      const T b = evaluate_node(*node.rhs, x);
      switch (node.binary) {
        case BinaryOp::Add: return checked(a + b);
        case BinaryOp::Sub: return checked(a - b);
        case BinaryOp::Mul: return checked(a * b);
        case BinaryOp::Div:
          if (value_of(b) == 0.0) throw_domain("division by zero", value_of(a));
          return checked(a / b);
      }
      break;
    }
    case Kind::Power: {
      const T a = evaluate_node(*node.lhs, x);
      const double av = value_of(a);
      const double c = node.value;
      if (av < 0.0 && c != std::floor(c)) {
        throw_domain("non-integer power of negative base", av);
      }
      if (av == 0.0 && c < 0.0) throw_domain("division by zero", av);
      using std::pow;
      return checked(pow(a, c));
    }
  }
  throw_domain("malformed expression", 0.0);
}

}  // namespace detail

template <typename T>
T Expression::evaluate(std::span<const T> x) const {
  T result = detail::evaluate_node(*root_, x);
  if (!all_finite(result)) detail::throw_domain("non-finite result", value_of(result));
  return result;
}

}  // namespace nullbound
