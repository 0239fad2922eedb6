#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chblend {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

  /// Byte offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form expression in x and y, e.g. "cos(10*(x-y))*x*y".
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | 'x' | 'y' | 'pi' | func '(' sum ')' | '(' sum ')'
///   func    := sin | cos | exp | abs | tanh
/// Multiplication must be explicit: "10xy" is rejected, write "10*x*y".
class Expr {
 public:
  enum class Op {
    Number,
    VarX,
    VarY,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Abs,
    Tanh,
  };

  struct Node {
    Op op = Op::Number;
    double value = 0.0;  // Number only
    int lhs = -1;        // operand of unary nodes, left operand of binary nodes
    int rhs = -1;
  };

  static Expr parse(std::string_view text);

  /// Throws EvalError when an operation yields a non-finite value.
  double eval(double x, double y) const;

  /// Fully parenthesized text that parses back to an equivalent tree.
  std::string to_string() const;

  const std::string& source() const { return source_; }

 private:
  friend class ExprParser;

  double eval_node(int index, double x, double y) const;
  void print_node(int index, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;
};

}  // namespace chblend
