#include "slpart/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "slpart/errors.hpp"

namespace slpart {
namespace {

using Op = CoeffExpr::Op;
using NodePtr = std::shared_ptr<const CoeffExpr::Node>;

struct FunctionInfo {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<FunctionInfo, 7> kFunctions{{
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"exp", Op::Exp, 1},
    {"sqrt", Op::Sqrt, 1},
    {"abs", Op::Abs, 1},
    {"min", Op::Min, 2},
    {"max", Op::Max, 2},
}};

NodePtr make_node(Op op, double value = 0.0, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<CoeffExpr::Node>();
  n->op = op;
  n->value = value;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    auto node = expr();
    skip_ws();
    if (pos_ != src_.size()) {
      throw ParseError(fmt::format("unexpected '{}'", src_[pos_]), pos_);
    }
    return node;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) {
        throw ParseError(fmt::format("expected '{}' but input ended", c), pos_);
      }
      throw ParseError(fmt::format("expected '{}'", c), pos_);
    }
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, 0.0, {lhs, term()});
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, 0.0, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, 0.0, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make_node(Op::Div, 0.0, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Op::Neg, 0.0, {unary()});
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_node(Op::Pow, 0.0, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      auto inner = expr();
      expect(')');
      return inner;
    }
    throw ParseError(fmt::format("unexpected '{}'", c), pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        // A bare 'e' after a number is an identifier error, not an exponent.
        pos_ = save;
        throw ParseError("malformed exponent", save);
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      throw ParseError("malformed number", start);
    }
    return make_node(Op::Number, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return make_node(Op::Var);
    if (name == "pi") return make_node(Op::Number, std::numbers::pi);

    auto it = std::find_if(kFunctions.begin(), kFunctions.end(),
                           [&](const FunctionInfo& f) { return f.name == name; });
    if (it == kFunctions.end()) {
      throw ParseError(fmt::format("unknown identifier '{}'", name), start);
    }
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != '(') {
      throw ParseError(fmt::format("function '{}' requires '('", name), pos_);
    }
    ++pos_;
    std::vector<NodePtr> args;
    skip_ws();
    if (!accept(')')) {
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
    }
    if (static_cast<int>(args.size()) != it->arity) {
      throw ParseError(fmt::format("function '{}' takes {} argument(s), got {}",
                                   name, it->arity, args.size()),
                       start);
    }
    return make_node(it->op, 0.0, std::move(args));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Min: return "min";
    case Op::Max: return "max";
    default: return "";
  }
}

char infix_symbol(Op op) {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    case Op::Pow: return '^';
    default: return '?';
  }
}

void print(const CoeffExpr::Node& n, std::string& out) {
  switch (n.op) {
    case Op::Number:
      // Parenthesised so that negative or exponent forms reparse unchanged.
      out += fmt::format("({:.17g})", n.value);
      break;
    case Op::Var:
      out += 'x';
      break;
    case Op::Neg:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      break;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow:
      out += '(';
      print(*n.args[0], out);
      out += infix_symbol(n.op);
      print(*n.args[1], out);
      out += ')';
      break;
    default:
      out += op_name(n.op);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      break;
  }
}

}  // namespace

CoeffExpr parse_expr(std::string_view src) {
  CoeffExpr e;
  e.source_ = std::string(src);
  e.root_ = Parser(src).parse();

  // Flatten to postfix, tracking the stack depth needed by evaluation.
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const CoeffExpr::Node& n) -> void {
    for (const auto& a : n.args) self(self, *a);
    e.program_.push_back({n.op, n.value});
    if (n.op == Op::Number || n.op == Op::Var) {
      ++depth;
      e.max_stack_ = std::max(e.max_stack_, depth);
    } else {
      depth -= n.args.size() - 1;
    }
    if (n.op == Op::Var) e.constant_ = false;
  };
  emit(emit, *e.root_);
  return e;
}

double CoeffExpr::operator()(double x) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (max_stack_ > kInline) {
    big.resize(max_stack_);
    stack = big.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::Number: stack[sp++] = in.value; break;
      case Op::Var: stack[sp++] = x; break;
      case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
      case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
      case Op::Min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
      case Op::Max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
      case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
      case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
      case Op::Sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
      case Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
    }
  }
  return stack[0];
}

std::string CoeffExpr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

}  // namespace slpart
