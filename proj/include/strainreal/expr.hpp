#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "strainreal/jet.hpp"

namespace strainreal {

enum class Var { X, Y };

class Tape;

/// Immutable symbolic scalar field in the variables x and y.
///
/// Nodes are shared (the tree is a DAG after differentiation) and simplified
/// on construction: constants fold, 0/1 identities vanish, sums and products
/// are flattened with their operands in a canonical order, so two
/// expressions that differ only by the order of commutative operands compare
/// equal. Subtraction is stored as addition of a product with -1.
///
/// Evaluation goes through a compiled tape that is built once per node and
/// cached; an Expr is safe to share across threads.
class Expr {
 public:
  enum class Kind { Const, Pi, VarX, VarY, Add, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };

  struct Node;

  Expr();  // the constant 0
  Expr(double c);  // NOLINT(google-explicit-constructor)

  static Expr constant(double c);
  static Expr pi();
  static Expr x();
  static Expr y();
  static Expr var(Var v);

  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr quotient(const Expr& num, const Expr& den);
  static Expr power(const Expr& base, int exponent);
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr log(const Expr& a);
  static Expr sqrt(const Expr& a);

  Kind kind() const;
  /// Numeric value of a Const node.
  double value() const;
  /// Exponent of a Pow node.
  int exponent() const;
  const std::vector<Expr>& children() const;

  bool is_constant() const { return kind() == Kind::Const; }
  bool is_zero() const { return is_constant() && value() == 0.0; }
  bool is_one() const { return is_constant() && value() == 1.0; }
  bool depends_on(Var v) const;

  double eval(double x, double y) const;
  Jet eval(const Jet& x, const Jet& y) const;
  /// Value, gradient and Hessian at (x, y) in one pass.
  Jet jet(double x, double y) const { return eval(Jet::var_x(x), Jet::var_y(y)); }

  /// Number of distinct nodes in the DAG.
  std::size_t node_count() const;

  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
  /// Total structural order used to canonicalize commutative operands.
  friend int compare(const Expr& a, const Expr& b);

  const Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Tape& tape() const;

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Parses the field-expression language:
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+')? base ('^' integer)?
///   base   := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func   := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
///
/// Whitespace is insignificant. Throws ParseError with the offending offset.
Expr parse_expression(std::string_view text);

/// Exact partial derivative of the given order (1..6).
Expr differentiate(const Expr& f, Var var, int order = 1);

/// Replaces x and y by the given expressions.
Expr substitute(const Expr& f, const Expr& x_repl, const Expr& y_repl);

}  // namespace strainreal
