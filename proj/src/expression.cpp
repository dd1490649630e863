#include "nullbound/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace nullbound {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::MissingWeight: return "MissingWeight";
    case ErrorCode::RiemannianSignature: return "RiemannianSignature";
    case ErrorCode::NotInFlowImage: return "NotInFlowImage";
    case ErrorCode::NotNull: return "NotNull";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Error";
}

namespace detail {

void throw_domain(const char* what, double argument) {
  std::ostringstream os;
  os << what << " (argument " << argument << ")";
  throw Error(ErrorCode::Domain, os.str());
}

}  // namespace detail

namespace {

using Node = Expression::Node;
using Kind = Expression::Kind;

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

int max_variable_of(const Node& n) {
  switch (n.kind) {
    case Kind::Constant: return -1;
    case Kind::Variable: return n.index;
    case Kind::Unary:
    case Kind::Power: return max_variable_of(*n.lhs);
    case Kind::Binary: return std::max(max_variable_of(*n.lhs), max_variable_of(*n.rhs));
  }
  return -1;
}

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos}, {"exp", UnaryOp::Exp},
    {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
    {"tanh", UnaryOp::Tanh},
};

// Recursive-descent parser. Precedence, tightest first:
//   ^ (constant exponent), unary -, * /, + -. Binary operators are
//   left-associative.
class Parser {
 public:
  Parser(std::string_view src, int dimension) : src_(src), dimension_(dimension) {}

  Expression parse() {
    Expression e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail(ErrorCode::Syntax, "unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const { fail_at(code, msg, pos_); }

  [[noreturn]] void fail_at(ErrorCode code, const std::string& msg, std::size_t at) const {
    throw ParseError(code, msg, 1, static_cast<int>(at) + 1);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(ErrorCode::Syntax, std::string("expected '") + c + "' before end of input");
      fail(ErrorCode::Syntax, std::string("expected '") + c + "'");
    }
  }

  Expression parse_sum() {
    Expression lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = Expression::binary(BinaryOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = Expression::binary(BinaryOp::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_product() {
    Expression lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expression::binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expression::binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) return Expression::unary(UnaryOp::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    for (;;) {
      if (!accept('^')) return base;
      base = Expression::power(base, parse_exponent());
    }
  }

  double parse_exponent() {
    skip_space();
    const std::size_t start = pos_;
    const bool negate = accept('-');
    Expression e = parse_primary();
    if (!e.is_constant()) fail_at(ErrorCode::Syntax, "exponent must be constant", start);
    const double c = e.evaluate<double>({});
    return negate ? -c : c;
  }

  Expression parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail(ErrorCode::Syntax, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(ErrorCode::Syntax, std::string("unexpected '") + c + "'");
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value)) {
      fail_at(ErrorCode::Syntax, "malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'", start);
    }
    return Expression::constant(value);
  }

  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      if (name.size() != 2) fail_at(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start);
      const int index = name[1] - '0';
      if (index >= dimension_) {
        fail_at(ErrorCode::VariableOutOfRange,
                "variable '" + std::string(name) + "' exceeds dimension " + std::to_string(dimension_), start);
      }
      return Expression::variable(index);
    }
    for (const auto& f : kFunctions) {
      if (f.name == name) {
        expect('(');
        Expression arg = parse_sum();
        expect(')');
        return Expression::unary(f.op, arg);
      }
    }
    fail_at(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  int dimension_;
  std::size_t pos_ = 0;
};

std::string format_constant(double c) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  std::string s(buf);
  if (c < 0.0 || (c == 0.0 && std::signbit(c))) return "(" + s + ")";
  return s;
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Constant:
      out += format_constant(n.value);
      return;
    case Kind::Variable:
      out += 'x';
      out += static_cast<char>('0' + n.index);
      return;
    case Kind::Unary:
      if (n.unary == UnaryOp::Neg) {
        out += "(-";
        print(*n.lhs, out);
        out += ')';
        return;
      }
      for (const auto& f : kFunctions) {
        if (f.op == n.unary) out += f.name;
      }
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    case Kind::Binary: {
      static constexpr char kSymbol[] = {'+', '-', '*', '/'};
      out += '(';
      print(*n.lhs, out);
      out += ' ';
      out += kSymbol[static_cast<int>(n.binary)];
      out += ' ';
      print(*n.rhs, out);
      out += ')';
      return;
    }
    case Kind::Power:
      out += '(';
      print(*n.lhs, out);
      out += ")^(";
      out += format_constant(n.value);
      out += ')';
      return;
  }
}

}  // namespace

Expression::Expression() : root_(make_node(Node{})) {}

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::constant(double c) {
  Node n;
  n.kind = Kind::Constant;
  n.value = c;
  return Expression(make_node(std::move(n)));
}

Expression Expression::variable(int index) {
  if (index < 0 || index >= kMaxDimension) {
    throw Error(ErrorCode::VariableOutOfRange, "variable index " + std::to_string(index) + " out of range");
  }
  Node n;
  n.kind = Kind::Variable;
  n.index = index;
  return Expression(make_node(std::move(n)));
}

Expression Expression::unary(UnaryOp op, const Expression& arg) {
  Node n;
  n.kind = Kind::Unary;
  n.unary = op;
  n.lhs = arg.root_;
  return Expression(make_node(std::move(n)));
}

Expression Expression::binary(BinaryOp op, const Expression& lhs, const Expression& rhs) {
  Node n;
  n.kind = Kind::Binary;
  n.binary = op;
  n.lhs = lhs.root_;
  n.rhs = rhs.root_;
  return Expression(make_node(std::move(n)));
}

Expression Expression::power(const Expression& base, double exponent) {
  Node n;
  n.kind = Kind::Power;
  n.value = exponent;
  n.lhs = base.root_;
  return Expression(make_node(std::move(n)));
}

int Expression::max_variable() const { return max_variable_of(*root_); }

Expression parse_expression(std::string_view source, int dimension) {
  return Parser(source, dimension).parse();
}

std::string to_string(const Expression& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

}  // namespace nullbound
