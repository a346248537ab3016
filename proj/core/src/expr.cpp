#include "slmfg/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace slmfg {

struct Expr::Node {
  Kind kind;
  double value = 0.0;           // Constant
  VarId var;                    // Var
  std::vector<Expr> children;   // Sum/Product operands, Power base, Negate child
  int exponent = 0;             // Power
};

namespace {

Expr make_node(Expr::Node n) {
  return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

}  // namespace

Expr::Expr() : Expr(constant(0.0).node_) {}

Expr Expr::constant(double value) {
  Node n;
  n.kind = Kind::Constant;
  n.value = value;
  return make_node(std::move(n));
}

Expr Expr::var(VarId id) {
  Node n;
  n.kind = Kind::Var;
  n.var = std::move(id);
  return make_node(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  Node n;
  n.kind = Kind::Sum;
  n.children = std::move(terms);
  return make_node(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  Node n;
  n.kind = Kind::Product;
  n.children = std::move(factors);
  return make_node(std::move(n));
}

Expr Expr::pow(Expr base, int exponent) {
  if (exponent < 0) throw ExprError("Power exponent must be nonnegative");
  Node n;
  n.kind = Kind::Power;
  n.children.push_back(std::move(base));
  n.exponent = exponent;
  return make_node(std::move(n));
}

Expr Expr::negate(Expr e) {
  Node n;
  n.kind = Kind::Negate;
  n.children.push_back(std::move(e));
  return make_node(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
const VarId& Expr::var_id() const { return node_->var; }
const std::vector<Expr>& Expr::operands() const { return node_->children; }
const Expr& Expr::base() const { return node_->children.front(); }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::child() const { return node_->children.front(); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::negate(a); }
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::sum({a, Expr::negate(b)});
}

double eval(const Expr& e, const Assignment& a) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.constant_value();
    case Expr::Kind::Var: {
      auto it = a.find(e.var_id());
      if (it == a.end()) throw MissingVariableError(e.var_id());
      return it->second;
    }
    case Expr::Kind::Sum: {
      double s = 0.0;
      for (const Expr& t : e.operands()) s += eval(t, a);
      return s;
    }
    case Expr::Kind::Product: {
      double p = 1.0;
      for (const Expr& f : e.operands()) p *= eval(f, a);
      return p;
    }
    case Expr::Kind::Power: {
      double b = eval(e.base(), a);
      double r = 1.0;
      for (int i = 0; i < e.exponent(); ++i) r *= b;
      return r;
    }
    case Expr::Kind::Negate:
      return -eval(e.child(), a);
  }
  throw ExprError("corrupt expression node");
}

Expr diff(const Expr& e, const VarId& v) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return Expr::constant(0.0);
    case Expr::Kind::Var:
      return Expr::constant(e.var_id() == v ? 1.0 : 0.0);
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(e.operands().size());
      for (const Expr& t : e.operands()) terms.push_back(diff(t, v));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Product: {
      // Product rule: sum over factors with one factor differentiated.
      std::vector<Expr> terms;
      const auto& fs = e.operands();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Expr> fac;
        fac.reserve(fs.size());
        for (std::size_t j = 0; j < fs.size(); ++j)
          fac.push_back(j == i ? diff(fs[j], v) : fs[j]);
        terms.push_back(Expr::product(std::move(fac)));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Power: {
      int n = e.exponent();
      if (n == 0) return Expr::constant(0.0);
      return Expr::product(
          {Expr::constant(static_cast<double>(n)),
           Expr::pow(e.base(), n - 1), diff(e.base(), v)});
    }
    case Expr::Kind::Negate:
      return Expr::negate(diff(e.child(), v));
  }
  throw ExprError("corrupt expression node");
}

std::vector<Expr> grad(const Expr& e, std::span<const VarId> vars) {
  std::vector<Expr> g;
  g.reserve(vars.size());
  for (const VarId& v : vars) g.push_back(simplify(diff(e, v)));
  return g;
}

std::vector<std::vector<Expr>> hessian(const Expr& e,
                                       std::span<const VarId> vars) {
  std::vector<std::vector<Expr>> h(vars.size());
  std::vector<Expr> firsts;
  firsts.reserve(vars.size());
  for (const VarId& v : vars) firsts.push_back(diff(e, v));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    h[i].reserve(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j)
      h[i].push_back(simplify(diff(firsts[i], vars[j])));
  }
  return h;
}

namespace {

int kind_rank(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Constant: return 0;
    case Expr::Kind::Var: return 1;
    case Expr::Kind::Power: return 2;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Product: return 4;
    case Expr::Kind::Sum: return 5;
  }
  return 6;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Expr::Kind::Constant: {
      double x = a.constant_value(), y = b.constant_value();
      if (x < y) return -1;
      if (x > y) return 1;
      return 0;
    }
    case Expr::Kind::Var: {
      if (a.var_id() == b.var_id()) return 0;
      return a.var_id() < b.var_id() ? -1 : 1;
    }
    case Expr::Kind::Power: {
      int c = compare(a.base(), b.base());
      if (c != 0) return c;
      if (a.exponent() != b.exponent())
        return a.exponent() < b.exponent() ? -1 : 1;
      return 0;
    }
    case Expr::Kind::Negate:
      return compare(a.child(), b.child());
    case Expr::Kind::Product:
    case Expr::Kind::Sum: {
      const auto& xs = a.operands();
      const auto& ys = b.operands();
      for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
        int c = compare(xs[i], ys[i]);
        if (c != 0) return c;
      }
      if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  return compare(a, b) == 0;
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Var:
      return e;
    case Expr::Kind::Negate: {
      // Normalise to a (-1)-factor so canonical forms are Negate-free.
      return simplify(Expr::product({Expr::constant(-1.0), e.child()}));
    }
    case Expr::Kind::Power: {
      Expr b = simplify(e.base());
      int n = e.exponent();
      if (n == 0) return Expr::constant(1.0);
      if (n == 1) return b;
      if (b.kind() == Expr::Kind::Constant) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= b.constant_value();
        return Expr::constant(r);
      }
      return Expr::pow(b, n);
    }
    case Expr::Kind::Product: {
      std::vector<Expr> factors;
      double c = 1.0;
      // Flatten and fold; a zero factor collapses everything.
      std::vector<Expr> pending(e.operands().rbegin(), e.operands().rend());
      while (!pending.empty()) {
        Expr f = simplify(pending.back());
        pending.pop_back();
        if (f.kind() == Expr::Kind::Product) {
          for (auto it = f.operands().rbegin(); it != f.operands().rend(); ++it)
            pending.push_back(*it);
        } else if (f.kind() == Expr::Kind::Constant) {
          c *= f.constant_value();
        } else {
          factors.push_back(std::move(f));
        }
      }
      if (c == 0.0) return Expr::constant(0.0);
      std::sort(factors.begin(), factors.end(),
                [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
      if (factors.empty()) return Expr::constant(c);
      if (c != 1.0) factors.insert(factors.begin(), Expr::constant(c));
      if (factors.size() == 1) return factors.front();
      return Expr::product(std::move(factors));
    }
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      double c = 0.0;
      std::vector<Expr> pending(e.operands().rbegin(), e.operands().rend());
      while (!pending.empty()) {
        Expr t = simplify(pending.back());
        pending.pop_back();
        if (t.kind() == Expr::Kind::Sum) {
          for (auto it = t.operands().rbegin(); it != t.operands().rend(); ++it)
            pending.push_back(*it);
        } else if (t.kind() == Expr::Kind::Constant) {
          c += t.constant_value();
        } else {
          terms.push_back(std::move(t));
        }
      }
      std::sort(terms.begin(), terms.end(),
                [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
      if (terms.empty()) return Expr::constant(c);
      if (c != 0.0) terms.insert(terms.begin(), Expr::constant(c));
      if (terms.size() == 1) return terms.front();
      return Expr::sum(std::move(terms));
    }
  }
  throw ExprError("corrupt expression node");
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  double r = std::round(v);
  if (r == v && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return format_double(e.constant_value());
    case Expr::Kind::Var:
      return e.var_id().str();
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::string s = e.kind() == Expr::Kind::Sum ? "(+" : "(*";
      for (const Expr& t : e.operands()) {
        s += ' ';
        s += to_string(t);
      }
      s += ')';
      return s;
    }
    case Expr::Kind::Power:
      return "(^ " + to_string(e.base()) + " " +
             std::to_string(e.exponent()) + ")";
    case Expr::Kind::Negate:
      return "(neg " + to_string(e.child()) + ")";
  }
  throw ExprError("corrupt expression node");
}

std::set<VarId> variables(const Expr& e) {
  std::set<VarId> out;
  std::vector<const Expr*> stack{&e};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (cur->kind() == Expr::Kind::Var) {
      out.insert(cur->var_id());
    } else if (cur->kind() != Expr::Kind::Constant) {
      for (const Expr& c : cur->node().children) stack.push_back(&c);
    }
  }
  return out;
}

Expr substitute(const Expr& e, const Assignment& values) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e;
    case Expr::Kind::Var: {
      auto it = values.find(e.var_id());
      return it == values.end() ? e : Expr::constant(it->second);
    }
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      for (const Expr& c : e.operands()) kids.push_back(substitute(c, values));
      return e.kind() == Expr::Kind::Sum ? Expr::sum(std::move(kids))
                                         : Expr::product(std::move(kids));
    }
    case Expr::Kind::Power:
      return Expr::pow(substitute(e.base(), values), e.exponent());
    case Expr::Kind::Negate:
      return Expr::negate(substitute(e.child(), values));
  }
  throw ExprError("corrupt expression node");
}

Expr rename_vars(const Expr& e, const std::map<VarId, VarId>& renames) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e;
    case Expr::Kind::Var: {
      auto it = renames.find(e.var_id());
      return it == renames.end() ? e : Expr::var(it->second);
    }
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      for (const Expr& c : e.operands()) kids.push_back(rename_vars(c, renames));
      return e.kind() == Expr::Kind::Sum ? Expr::sum(std::move(kids))
                                         : Expr::product(std::move(kids));
    }
    case Expr::Kind::Power:
      return Expr::pow(rename_vars(e.base(), renames), e.exponent());
    case Expr::Kind::Negate:
      return Expr::negate(rename_vars(e.child(), renames));
  }
  throw ExprError("corrupt expression node");
}

bool is_constant(const Expr& e, double* value) {
  Expr s = simplify(e);
  if (s.kind() != Expr::Kind::Constant) {
    if (variables(s).empty()) {
      if (value) *value = eval(s, {});
      return true;
    }
    return false;
  }
  if (value) *value = s.constant_value();
  return true;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  std::string text;
  std::size_t offset;
  bool paren_open = false;
  bool paren_close = false;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({"(", i, true, false});
      ++i;
      continue;
    }
    if (c == ')') {
      out.push_back({")", i, false, true});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           text[j] != '(' && text[j] != ')')
      ++j;
    out.push_back({text.substr(i, j - i), i, false, false});
    i = j;
  }
  return out;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_varref(const std::string& s, VarId* out) {
  auto pos = s.rfind('.');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= s.size()) return false;
  const std::string idx = s.substr(pos + 1);
  for (char c : idx)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  out->block = s.substr(0, pos);
  out->index = std::atoi(idx.c_str());
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::set<VarId>& declared)
      : tokens_(std::move(tokens)), declared_(declared) {}

  Expr parse() {
    Expr e = parse_expr();
    if (pos_ != tokens_.size())
      throw ParseError("trailing input after expression", tokens_[pos_].offset);
    return e;
  }

 private:
  const Token& peek() const {
    if (pos_ >= tokens_.size())
      throw ParseError("unexpected end of input",
                       tokens_.empty() ? 0 : tokens_.back().offset + 1);
    return tokens_[pos_];
  }
  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }

  Expr parse_expr() {
    Token t = next();
    if (t.paren_close) throw ParseError("unexpected ')'", t.offset);
    if (!t.paren_open) return parse_atom(t);

    Token op = next();
    if (op.paren_open || op.paren_close)
      throw ParseError("expected operator after '('", op.offset);

    std::vector<Expr> args;
    while (!peek().paren_close) args.push_back(parse_expr());
    Token close = next();  // consume ')'

    if (op.text == "+") return Expr::sum(std::move(args));
    if (op.text == "*") return Expr::product(std::move(args));
    if (op.text == "neg") {
      if (args.size() != 1)
        throw ParseError("neg takes exactly one operand", op.offset);
      return Expr::negate(std::move(args[0]));
    }
    if (op.text == "^") {
      if (args.size() != 2)
        throw ParseError("^ takes (base, nonnegative-integer)", op.offset);
      if (args[1].kind() != Expr::Kind::Constant)
        throw ParseError("^ exponent must be an integer literal", close.offset);
      double ev = args[1].constant_value();
      if (ev < 0 || ev != std::floor(ev))
        throw ParseError("^ exponent must be a nonnegative integer",
                         close.offset);
      return Expr::pow(std::move(args[0]), static_cast<int>(ev));
    }
    throw ParseError("unknown operator '" + op.text + "'", op.offset);
  }

  Expr parse_atom(const Token& t) {
    double num;
    if (parse_number(t.text, &num)) return Expr::constant(num);
    VarId v;
    if (parse_varref(t.text, &v)) {
      if (!declared_.count(v)) throw UndeclaredVariableError(v, t.offset);
      return Expr::var(std::move(v));
    }
    throw ParseError("expected number or variable, got '" + t.text + "'",
                     t.offset);
  }

  std::vector<Token> tokens_;
  const std::set<VarId>& declared_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const std::set<VarId>& declared) {
  auto tokens = tokenize(text);
  if (tokens.empty()) throw ParseError("empty expression", 0);
  return Parser(std::move(tokens), declared).parse();
}

// ---------------------------------------------------------------------------
// Convexity classification
// ---------------------------------------------------------------------------

Box Box::uniform(std::span<const VarId> vars, double lo, double hi) {
  Box b;
  for (const VarId& v : vars) b.ranges[v] = {lo, hi};
  return b;
}

ConvexityVerdict classify_convexity(const Expr& e, std::span<const VarId> vars,
                                    const Box& domain_box, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw ExprError("classify_convexity: samples must be >= 1");
  const std::size_t n = vars.size();
  ConvexityVerdict out;
  if (n == 0) {
    out.kind = ConvexityVerdict::Kind::ConvexCertified;
    out.exact = true;
    out.note = "no variables";
    return out;
  }

  auto h = hessian(e, vars);

  bool constant_hessian = true;
  Eigen::MatrixXd H(n, n);
  for (std::size_t i = 0; i < n && constant_hessian; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v;
      if (!is_constant(h[i][j], &v)) {
        constant_hessian = false;
        break;
      }
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }

  auto psd = [](const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (M + M.transpose()));
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    return es.eigenvalues().minCoeff() >= -1e-9 * scale;
  };

  if (constant_hessian) {
    out.exact = true;
    if (psd(H)) {
      out.kind = ConvexityVerdict::Kind::ConvexCertified;
      out.note = "constant Hessian is PSD";
    } else {
      out.kind = ConvexityVerdict::Kind::NonconvexWitness;
      out.note = "constant Hessian is indefinite";
      // Any point witnesses an indefinite constant Hessian; report centers
      // of the box where available, zero elsewhere.
      for (const VarId& v : variables(e)) {
        auto it = domain_box.ranges.find(v);
        out.witness[v] =
            it == domain_box.ranges.end()
                ? 0.0
                : 0.5 * (it->second.first + it->second.second);
      }
    }
    return out;
  }

  // Sampled verdicts need a box covering every variable the Hessian mentions.
  std::set<VarId> needed;
  for (const auto& row : h)
    for (const Expr& entry : row)
      for (const VarId& v : variables(entry)) needed.insert(v);
  if (!domain_box.valid()) throw ExprError("classify_convexity: empty box");
  for (const VarId& v : needed)
    if (!domain_box.covers(v))
      throw ExprError("classify_convexity: box does not cover '" + v.str() +
                      "'");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Assignment a;
    for (const VarId& v : needed) {
      auto [lo, hi] = domain_box.ranges.at(v);
      a[v] = lo + (hi - lo) * unit(rng);
    }
    Eigen::MatrixXd Hs(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        Hs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            eval(h[i][j], a);
    if (!psd(Hs)) {
      out.kind = ConvexityVerdict::Kind::NonconvexWitness;
      out.witness = std::move(a);
      out.note = "sampled Hessian is indefinite";
      return out;
    }
  }
  out.kind = ConvexityVerdict::Kind::Unknown;
  out.note = "all sampled Hessians PSD; sampling cannot certify";
  return out;
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

Evaluator::Evaluator(const Expr& e, std::span<const VarId> order) {
  std::map<VarId, int> slots;
  for (std::size_t i = 0; i < order.size(); ++i)
    slots[order[i]] = static_cast<int>(i);

  std::size_t depth = 0;
  max_stack_ = 0;
  // Postorder emission; `depth` tracks the evaluation stack height.
  auto emit = [&](auto&& self, const Expr& x) -> void {
    switch (x.kind()) {
      case Expr::Kind::Constant:
        tape_.push_back({Op::Code::Const, 0, x.constant_value()});
        ++depth;
        break;
      case Expr::Kind::Var: {
        auto it = slots.find(x.var_id());
        if (it == slots.end()) throw MissingVariableError(x.var_id());
        tape_.push_back({Op::Code::Load, it->second, 0.0});
        ++depth;
        break;
      }
      case Expr::Kind::Sum:
      case Expr::Kind::Product: {
        for (const Expr& c : x.operands()) self(self, c);
        tape_.push_back({x.kind() == Expr::Kind::Sum ? Op::Code::Add
                                                     : Op::Code::Mul,
                         static_cast<int>(x.operands().size()), 0.0});
        depth -= x.operands().size();
        ++depth;
        break;
      }
      case Expr::Kind::Power:
        self(self, x.base());
        tape_.push_back({Op::Code::Pow, x.exponent(), 0.0});
        break;
      case Expr::Kind::Negate:
        self(self, x.child());
        tape_.push_back({Op::Code::Neg, 0, 0.0});
        break;
    }
    max_stack_ = std::max(max_stack_, depth);
  };
  emit(emit, e);
}

double Evaluator::operator()(std::span<const double> values) const {
  double small[32];
  std::vector<double> big;
  double* stack = small;
  if (max_stack_ > 32) {
    big.resize(max_stack_);
    stack = big.data();
  }
  std::size_t top = 0;
  for (const Op& op : tape_) {
    switch (op.code) {
      case Op::Code::Const:
        stack[top++] = op.c;
        break;
      case Op::Code::Load:
        stack[top++] = values[static_cast<std::size_t>(op.arg)];
        break;
      case Op::Code::Add: {
        double s = 0.0;
        for (int i = 0; i < op.arg; ++i) s += stack[--top];
        stack[top++] = s;
        break;
      }
      case Op::Code::Mul: {
        double p = 1.0;
        for (int i = 0; i < op.arg; ++i) p *= stack[--top];
        stack[top++] = p;
        break;
      }
      case Op::Code::Pow: {
        double b = stack[--top];
        double r = 1.0;
        for (int i = 0; i < op.arg; ++i) r *= b;
        stack[top++] = r;
        break;
      }
      case Op::Code::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
    }
  }
  return top == 1 ? stack[0] : 0.0;
}

}  // namespace slmfg
