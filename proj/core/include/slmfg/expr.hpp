#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slmfg {

/// Names one scalar variable as (block, index), e.g. x.0 or y.f1.1.
/// The block of a leader variable is "x"; follower blocks are "y.<id>";
/// multiplier blocks introduced by the KKT reformulation are "lam.<id>".
struct VarId {
  std::string block;
  int index = 0;

  friend bool operator==(const VarId& a, const VarId& b) {
    return a.index == b.index && a.block == b.block;
  }
  friend bool operator<(const VarId& a, const VarId& b) {
    if (a.block != b.block) return a.block < b.block;
    return a.index < b.index;
  }
  std::string str() const { return block + "." + std::to_string(index); }
};

/// Total map from variables to values; must cover every variable of the
/// expression being evaluated.
using Assignment = std::map<VarId, double>;

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure; carries the byte offset of the offending token.
class ParseError : public ExprError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : ExprError(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UndeclaredVariableError : public ParseError {
 public:
  UndeclaredVariableError(const VarId& var, std::size_t offset)
      : ParseError("undeclared variable '" + var.str() + "'", offset),
        var_(var) {}
  const VarId& var() const { return var_; }

 private:
  VarId var_;
};

class MissingVariableError : public ExprError {
 public:
  explicit MissingVariableError(const VarId& var)
      : ExprError("assignment is missing variable '" + var.str() + "'") {}
};

/// Immutable symbolic scalar expression over named real variables.
///
/// Nodes: Constant, Var, Sum (n-ary), Product (n-ary), Power (nonnegative
/// integer exponent) and Negate.  Empty sums evaluate to 0 and empty
/// products to 1.  Trees are shared through shared_ptr and never mutated
/// after construction, so expressions may be used freely across threads.
class Expr {
 public:
  enum class Kind { Constant, Var, Sum, Product, Power, Negate };

  Expr();  // Constant 0

  static Expr constant(double value);
  static Expr var(VarId id);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr pow(Expr base, int exponent);  // exponent >= 0
  static Expr negate(Expr e);

  Kind kind() const;
  double constant_value() const;            // Constant only
  const VarId& var_id() const;              // Var only
  const std::vector<Expr>& operands() const;  // Sum/Product only
  const Expr& base() const;                 // Power only
  int exponent() const;                     // Power only
  const Expr& child() const;                // Negate only

  // Convenience builders used heavily by the modelling layer.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator-(const Expr& a, const Expr& b);

  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Exact recursive evaluation; throws MissingVariableError if `a` does not
/// cover every variable of `e`.
double eval(const Expr& e, const Assignment& a);

/// Exact symbolic partial derivative; no numerical differentiation and no
/// simplification of the result.
Expr diff(const Expr& e, const VarId& v);

/// Componentwise diff in the given order; entries are canonically simplified.
std::vector<Expr> grad(const Expr& e, std::span<const VarId> vars);

/// Matrix of second partials (simplified); symmetric by construction once in
/// canonical form.
std::vector<std::vector<Expr>> hessian(const Expr& e,
                                       std::span<const VarId> vars);

/// Canonical simplification: flatten nested sums/products, fold constants,
/// normalise Negate into a (-1)-factor, drop units and sort operands under a
/// total structural order.  No polynomial expansion.
Expr simplify(const Expr& e);

/// Prefix-form rendering of the tree as-is.  parse_expr(to_string(simplify(e)))
/// reproduces simplify(e) exactly.
std::string to_string(const Expr& e);

/// Total structural order: negative/zero/positive like strcmp.
int compare(const Expr& a, const Expr& b);
bool structurally_equal(const Expr& a, const Expr& b);

/// All variables referenced by the expression.
std::set<VarId> variables(const Expr& e);

/// Replace selected variables by constants (partial evaluation).
Expr substitute(const Expr& e, const Assignment& values);

/// Rename variables; ids absent from the map are left untouched.
Expr rename_vars(const Expr& e, const std::map<VarId, VarId>& renames);

/// True when the (simplified) expression references no variables; the value
/// is written through `value` when non-null.
bool is_constant(const Expr& e, double* value = nullptr);

/// Parse the prefix grammar
///   expr   := number | varref | "(" op expr* ")"   op in {+, *, ^, neg}
///   varref := block "." index | block "." subblock "." index
/// against a declared variable set.
Expr parse_expr(const std::string& text, const std::set<VarId>& declared);

/// Shortest digit rendering that round-trips through strtod.
std::string format_double(double v);

/// Axis-aligned sampling domain used by convexity checks and searches.
struct Box {
  std::map<VarId, std::pair<double, double>> ranges;

  bool covers(const VarId& v) const { return ranges.count(v) != 0; }
  bool valid() const {
    for (const auto& [v, r] : ranges)
      if (!(r.first <= r.second)) return false;
    return true;
  }
  static Box uniform(std::span<const VarId> vars, double lo, double hi);
};

struct ConvexityVerdict {
  enum class Kind { ConvexCertified, NonconvexWitness, Unknown };
  Kind kind = Kind::Unknown;
  Assignment witness;  // populated for NonconvexWitness
  bool exact = false;  // true when decided by the constant-Hessian eigen test
  std::string note;

  bool certified() const { return kind == Kind::ConvexCertified; }
};

/// Convexity of `e` in `vars` over `domain_box`.  Quadratics (constant
/// Hessian in `vars`) are decided exactly by an eigenvalue test; otherwise
/// the Hessian is sampled on the box: one indefinite sample yields
/// NonconvexWitness, all-PSD samples yield Unknown.
ConvexityVerdict classify_convexity(const Expr& e, std::span<const VarId> vars,
                                    const Box& domain_box, int samples,
                                    std::uint64_t seed = 0);

/// Binds an expression to a fixed variable ordering for repeated evaluation
/// without per-call map lookups (a flattened postfix walk of the same tree).
class Evaluator {
 public:
  Evaluator() = default;
  Evaluator(const Expr& e, std::span<const VarId> order);
  double operator()(std::span<const double> values) const;

 private:
  struct Op {
    enum class Code { Const, Load, Add, Mul, Pow, Neg } code;
    int arg = 0;
    double c = 0.0;
  };
  std::vector<Op> tape_;
  std::size_t max_stack_ = 0;
};

}  // namespace slmfg
