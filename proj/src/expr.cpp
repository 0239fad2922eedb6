#include "chblend/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace chblend {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  const auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    Token tok;
    tok.offset = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          while (k < s.size() && is_digit(s[k])) ++k;
          j = k;
        }
      }
      tok.kind = Tok::Number;
      tok.text = s.substr(i, j - i);
      const auto res = std::from_chars(s.data() + i, s.data() + j, tok.number);
      if (res.ec != std::errc() || res.ptr != s.data() + j)
        throw ParseError(i, "malformed number '" + std::string(tok.text) + "'");
      i = j;
    } else if (is_alpha(c)) {
      std::size_t j = i;
      while (j < s.size() && (is_alpha(s[j]) || is_digit(s[j]))) ++j;
      tok.kind = Tok::Ident;
      tok.text = s.substr(i, j - i);
      i = j;
    } else {
      switch (c) {
        case '+': tok.kind = Tok::Plus; break;
        case '-': tok.kind = Tok::Minus; break;
        case '*': tok.kind = Tok::Star; break;
        case '/': tok.kind = Tok::Slash; break;
        case '^': tok.kind = Tok::Caret; break;
        case '(': tok.kind = Tok::LParen; break;
        case ')': tok.kind = Tok::RParen; break;
        default: throw ParseError(i, std::string("unexpected character '") + c + "'");
      }
      tok.text = s.substr(i, 1);
      ++i;
    }
    out.push_back(tok);
  }
  Token end;
  end.offset = s.size();
  out.push_back(end);
  return out;
}

const char* op_name(Expr::Op op) {
  switch (op) {
    case Expr::Op::Sin: return "sin";
    case Expr::Op::Cos: return "cos";
    case Expr::Op::Exp: return "exp";
    case Expr::Op::Abs: return "abs";
    case Expr::Op::Tanh: return "tanh";
    default: return "?";
  }
}

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : tokens_(tokenize(text)) {}

  Expr run(std::string_view text) {
    Expr e;
    e.source_ = std::string(text);
    expr_ = &e;
    if (peek().kind == Tok::End) throw ParseError(0, "empty expression");
    e.root_ = sum();
    if (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Number || t.kind == Tok::Ident || t.kind == Tok::LParen)
        throw ParseError(t.offset, "implicit multiplication is not supported; insert '*'");
      throw ParseError(t.offset, "unexpected '" + std::string(t.text) + "'");
    }
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  int add(Expr::Op op, double value = 0.0, int lhs = -1, int rhs = -1) {
    expr_->nodes_.push_back({op, value, lhs, rhs});
    return static_cast<int>(expr_->nodes_.size()) - 1;
  }

  int sum() {
    int lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const auto op = next().kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub;
      lhs = add(op, 0.0, lhs, product());
    }
    return lhs;
  }

  int product() {
    int lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const auto op = next().kind == Tok::Star ? Expr::Op::Mul : Expr::Op::Div;
      lhs = add(op, 0.0, lhs, unary());
    }
    return lhs;
  }

  int unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return add(Expr::Op::Neg, 0.0, unary());
    }
    if (peek().kind == Tok::Plus) {
      next();
      return unary();
    }
    return power();
  }

  int power() {
    const int base = primary();
    if (peek().kind == Tok::Caret) {
      next();
      return add(Expr::Op::Pow, 0.0, base, unary());
    }
    return base;
  }

  int primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Number:
        return add(Expr::Op::Number, t.number);
      case Tok::LParen: {
        const int inner = sum();
        expect_rparen(t.offset);
        return inner;
      }
      case Tok::Ident:
        return identifier(t);
      case Tok::End:
        throw ParseError(t.offset, "unexpected end of expression");
      default:
        throw ParseError(t.offset, "unexpected '" + std::string(t.text) + "'");
    }
  }

  int identifier(const Token& t) {
    if (t.text == "x") return add(Expr::Op::VarX);
    if (t.text == "y") return add(Expr::Op::VarY);
    if (t.text == "pi") return add(Expr::Op::Number, std::numbers::pi);

    Expr::Op op;
    if (t.text == "sin") op = Expr::Op::Sin;
    else if (t.text == "cos") op = Expr::Op::Cos;
    else if (t.text == "exp") op = Expr::Op::Exp;
    else if (t.text == "abs") op = Expr::Op::Abs;
    else if (t.text == "tanh") op = Expr::Op::Tanh;
    else throw ParseError(t.offset, "unknown identifier '" + std::string(t.text) + "'");

    if (peek().kind != Tok::LParen)
      throw ParseError(peek().offset, "expected '(' after '" + std::string(t.text) + "'");
    const std::size_t open = next().offset;
    const int arg = sum();
    expect_rparen(open);
    return add(op, 0.0, arg);
  }

  void expect_rparen(std::size_t open) {
    if (peek().kind != Tok::RParen)
      throw ParseError(peek().offset,
                       "expected ')' to close '(' at offset " + std::to_string(open));
    next();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Expr* expr_ = nullptr;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text).run(text); }

double Expr::eval(double x, double y) const {
  if (root_ < 0) throw EvalError("evaluating an empty expression");
  return eval_node(root_, x, y);
}

double Expr::eval_node(int index, double x, double y) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  double r = 0.0;
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::VarX: return x;
    case Op::VarY: return y;
    case Op::Neg: r = -eval_node(n.lhs, x, y); break;
    case Op::Add: r = eval_node(n.lhs, x, y) + eval_node(n.rhs, x, y); break;
    case Op::Sub: r = eval_node(n.lhs, x, y) - eval_node(n.rhs, x, y); break;
    case Op::Mul: r = eval_node(n.lhs, x, y) * eval_node(n.rhs, x, y); break;
    case Op::Div: {
      const double num = eval_node(n.lhs, x, y);
      const double den = eval_node(n.rhs, x, y);
      if (den == 0.0) throw EvalError("division by zero in '" + source_ + "'");
      r = num / den;
      break;
    }
    case Op::Pow: r = std::pow(eval_node(n.lhs, x, y), eval_node(n.rhs, x, y)); break;
    case Op::Sin: r = std::sin(eval_node(n.lhs, x, y)); break;
    case Op::Cos: r = std::cos(eval_node(n.lhs, x, y)); break;
    case Op::Exp: r = std::exp(eval_node(n.lhs, x, y)); break;
    case Op::Abs: r = std::abs(eval_node(n.lhs, x, y)); break;
    case Op::Tanh: r = std::tanh(eval_node(n.lhs, x, y)); break;
  }
  if (!std::isfinite(r))
    throw EvalError("non-finite value in '" + source_ + "' at (" + std::to_string(x) + ", " +
                    std::to_string(y) + ")");
  return r;
}

std::string Expr::to_string() const {
  std::string out;
  if (root_ >= 0) print_node(root_, out);
  return out;
}

void Expr::print_node(int index, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  const auto binary = [&](char sym) {
    out += '(';
    print_node(n.lhs, out);
    out += sym;
    print_node(n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += '(';
      out += buf;
      out += ')';
      return;
    }
    case Op::VarX: out += 'x'; return;
    case Op::VarY: out += 'y'; return;
    case Op::Neg:
      out += "(-";
      print_node(n.lhs, out);
      out += ')';
      return;
    case Op::Add: binary('+'); return;
    case Op::Sub: binary('-'); return;
    case Op::Mul: binary('*'); return;
    case Op::Div: binary('/'); return;
    case Op::Pow: binary('^'); return;
    default:
      out += op_name(n.op);
      out += '(';
      print_node(n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace chblend
