#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace slpart {

/// Closed-form expression in one variable `x`.
///
/// Accepted grammar (nothing else parses):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative
///     primary := number | 'x' | 'pi' | func '(' args ')' | '(' expr ')'
///     func    := sin | cos | exp | sqrt | abs  (one argument)
///              | min | max                     (two arguments)
///
/// The parsed tree is kept for printing; evaluation runs a flattened
/// postfix program. Instances are immutable and cheap to copy.
class CoeffExpr {
 public:
  enum class Op {
    Number, Var, Neg, Add, Sub, Mul, Div, Pow,
    Sin, Cos, Exp, Sqrt, Abs, Min, Max
  };

  struct Node {
    Op op;
    double value = 0.0;  // Number only
    std::vector<std::shared_ptr<const Node>> args;
  };

  CoeffExpr() = default;

  /// Raw evaluation; may return NaN or inf, domain checks are the caller's.
  double operator()(double x) const;

  /// Fully parenthesised rendering that reparses to an equivalent tree.
  std::string to_string() const;

  const std::string& source() const noexcept { return source_; }

  /// True when the expression does not reference `x`.
  bool is_constant() const noexcept { return constant_; }

  const Node& root() const { return *root_; }

 private:
  friend CoeffExpr parse_expr(std::string_view src);

  struct Instr {
    Op op;
    double value;
  };

  std::string source_;
  std::shared_ptr<const Node> root_;
  std::vector<Instr> program_;
  std::size_t max_stack_ = 0;
  bool constant_ = true;
};

/// Throws ParseError (with byte offset) on syntax errors, unknown
/// identifiers and arity mismatches.
CoeffExpr parse_expr(std::string_view src);

}  // namespace slpart
