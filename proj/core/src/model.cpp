#include "slmfg/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace slmfg {

std::vector<VarId> FollowerProblem::vars() const {
  std::vector<VarId> v;
  v.reserve(dim);
  for (int i = 0; i < dim; ++i) v.push_back({block(), i});
  return v;
}

std::vector<VarId> LeaderSpec::vars() const {
  std::vector<VarId> v;
  v.reserve(dim);
  for (int i = 0; i < dim; ++i) v.push_back({"x", i});
  return v;
}

const FollowerProblem& SlmfgProblem::follower(const std::string& id) const {
  for (const auto& f : followers)
    if (f.id == id) return f;
  throw ValidationError("unknown follower '" + id + "'");
}

int SlmfgProblem::follower_index(const std::string& id) const {
  for (std::size_t i = 0; i < followers.size(); ++i)
    if (followers[i].id == id) return static_cast<int>(i);
  throw ValidationError("unknown follower '" + id + "'");
}

std::vector<VarId> SlmfgProblem::all_vars() const {
  std::vector<VarId> v = leader.vars();
  for (const auto& f : followers) {
    auto fv = f.vars();
    v.insert(v.end(), fv.begin(), fv.end());
  }
  return v;
}

int SlmfgProblem::follower_offset(int index) const {
  int off = leader.dim;
  for (int i = 0; i < index; ++i) off += followers[i].dim;
  return off;
}

int SlmfgProblem::total_follower_dim() const {
  int d = 0;
  for (const auto& f : followers) d += f.dim;
  return d;
}

const FollowerProblem& GnepProblem::follower(const std::string& id) const {
  for (const auto& f : followers)
    if (f.id == id) return f;
  throw ValidationError("unknown follower '" + id + "'");
}

const SharedGroup& GnepProblem::group_of(const std::string& follower_id) const {
  for (const auto& g : groups)
    for (const auto& m : g.members)
      if (m == follower_id) return g;
  throw ValidationError("follower '" + follower_id + "' is in no group");
}

std::vector<VarId> GnepProblem::all_vars() const {
  std::vector<VarId> v = leader.vars();
  for (const auto& f : followers) {
    auto fv = f.vars();
    v.insert(v.end(), fv.begin(), fv.end());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct BlockDims {
  std::map<std::string, int> dims;  // block name -> dimension

  bool known(const VarId& v) const {
    auto it = dims.find(v.block);
    return it != dims.end() && v.index >= 0 && v.index < it->second;
  }
};

BlockDims block_dims(const LeaderSpec& leader,
                     const std::vector<FollowerProblem>& followers) {
  BlockDims bd;
  bd.dims["x"] = leader.dim;
  for (const auto& f : followers) bd.dims[f.block()] = f.dim;
  return bd;
}

void check_scope(const Expr& e, const BlockDims& bd,
                 const std::set<std::string>& allowed_blocks,
                 const std::string& where, std::vector<std::string>* out) {
  for (const VarId& v : variables(e)) {
    if (!bd.known(v)) {
      out->push_back(where + ": variable '" + v.str() +
                     "' is undeclared or out of range");
    } else if (!allowed_blocks.count(v.block)) {
      out->push_back(where + ": variable '" + v.str() +
                     "' is out of scope");
    }
  }
}

std::set<std::string> all_blocks(const BlockDims& bd) {
  std::set<std::string> s;
  for (const auto& [b, d] : bd.dims) s.insert(b);
  return s;
}

void validate_common(const LeaderSpec& leader,
                     const std::vector<FollowerProblem>& followers,
                     std::vector<std::string>* out) {
  if (leader.dim < 1) out->push_back("leader: dim must be >= 1");
  if (leader.box && leader.box->first > leader.box->second)
    out->push_back("leader: box lower bound exceeds upper bound");

  const BlockDims bd = block_dims(leader, followers);

  check_scope(leader.objective, bd, all_blocks(bd), "leader objective", out);
  for (std::size_t j = 0; j < leader.constraints.size(); ++j)
    check_scope(leader.constraints[j], bd, {"x"},
                "leader constraint " + std::to_string(j + 1), out);

  std::set<std::string> seen;
  for (const auto& f : followers) {
    if (f.dim < 1) out->push_back("follower " + f.id + ": dim must be >= 1");
    if (!seen.insert(f.id).second)
      out->push_back("duplicate follower id '" + f.id + "'");
    check_scope(f.objective, bd, all_blocks(bd),
                "follower " + f.id + " objective", out);
    for (std::size_t j = 0; j < f.constraints.size(); ++j)
      check_scope(f.constraints[j], bd, {"x", f.block()},
                  "follower " + f.id + " constraint " + std::to_string(j + 1),
                  out);
  }
}

}  // namespace

std::vector<std::string> validate(const SlmfgProblem& p) {
  std::vector<std::string> out;
  validate_common(p.leader, p.followers, &out);
  return out;
}

std::vector<std::string> validate(const GnepProblem& p) {
  std::vector<std::string> out;
  validate_common(p.leader, p.followers, &out);

  const BlockDims bd = block_dims(p.leader, p.followers);
  std::map<std::string, int> membership;  // follower id -> #groups containing it
  std::set<std::string> group_names;
  for (const auto& g : p.groups) {
    if (!group_names.insert(g.name).second)
      out.push_back("duplicate group name '" + g.name + "'");
    if (g.members.empty())
      out.push_back("group " + g.name + ": empty member list");
    std::set<std::string> member_blocks = {"x"};
    for (const auto& m : g.members) {
      membership[m] += 1;
      bool known = false;
      for (const auto& f : p.followers) known = known || f.id == m;
      if (!known) {
        out.push_back("group " + g.name + ": unknown member '" + m + "'");
      } else {
        member_blocks.insert("y." + m);
      }
    }
    for (std::size_t j = 0; j < g.shared_constraints.size(); ++j)
      check_scope(g.shared_constraints[j], bd, member_blocks,
                  "group " + g.name + " shared constraint " +
                      std::to_string(j + 1),
                  &out);
  }
  for (const auto& f : p.followers) {
    auto it = membership.find(f.id);
    if (it == membership.end())
      out.push_back("follower " + f.id + " belongs to no group");
    else if (it->second > 1)
      out.push_back("follower " + f.id + " belongs to multiple groups");
  }

  // Objectives must not reference same-group peers.
  for (const auto& g : p.groups) {
    for (const auto& m : g.members) {
      bool known = false;
      for (const auto& f : p.followers) known = known || f.id == m;
      if (!known) continue;
      const FollowerProblem& f = p.follower(m);
      for (const VarId& v : variables(f.objective)) {
        for (const auto& peer : g.members) {
          if (peer != m && v.block == "y." + peer)
            out.push_back("follower " + m + " objective references same-group peer variable '" +
                          v.str() + "'");
        }
      }
    }
  }
  return out;
}

std::vector<std::string> validate(const Problem& p) {
  return std::visit([](const auto& q) { return validate(q); }, p);
}

void require_valid(const Problem& p, const std::string& origin) {
  auto violations = validate(p);
  if (!violations.empty()) {
    std::string msg = origin + ": invalid problem:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

struct Statement {
  std::string keyword;
  std::vector<std::string> args;
  std::size_t offset = 0;
};

struct Section {
  std::string kind;  // leader | follower | group | mpcc
  std::string name;  // follower id / group name
  std::vector<Statement> statements;
  std::size_t offset = 0;
};

[[noreturn]] void fail(const std::string& origin, std::size_t offset,
                       const std::string& msg) {
  throw ParseError(origin + ": " + msg, offset);
}

struct RawToken {
  std::string text;
  std::size_t offset;
  bool quoted = false;
};

std::vector<RawToken> lex(const std::string& text, const std::string& origin) {
  std::vector<RawToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '{' || c == '}' || c == ';') {
      out.push_back({std::string(1, c), i, false});
      ++i;
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"') ++j;
      if (j >= text.size()) fail(origin, i, "unterminated string literal");
      out.push_back({text.substr(i + 1, j - i - 1), i, true});
      i = j + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           text[j] != '{' && text[j] != '}' && text[j] != ';' &&
           text[j] != '"' && text[j] != '#')
      ++j;
    out.push_back({text.substr(i, j - i), i, false});
    i = j;
  }
  return out;
}

std::vector<Section> parse_sections(const std::string& text,
                                    const std::string& origin) {
  auto tokens = lex(text, origin);
  std::vector<Section> sections;
  std::size_t i = 0;
  while (i < tokens.size()) {
    Section sec;
    sec.kind = tokens[i].text;
    sec.offset = tokens[i].offset;
    ++i;
    if (sec.kind != "leader" && sec.kind != "follower" && sec.kind != "group" &&
        sec.kind != "mpcc")
      fail(origin, sec.offset, "unknown section '" + sec.kind + "'");
    if (sec.kind == "follower" || sec.kind == "group") {
      if (i >= tokens.size() || tokens[i].text == "{")
        fail(origin, sec.offset, sec.kind + " section needs a name");
      sec.name = tokens[i].text;
      ++i;
    }
    if (i >= tokens.size() || tokens[i].text != "{")
      fail(origin, i < tokens.size() ? tokens[i].offset : text.size(),
           "expected '{'");
    ++i;
    while (i < tokens.size() && tokens[i].text != "}") {
      Statement st;
      st.keyword = tokens[i].text;
      st.offset = tokens[i].offset;
      ++i;
      while (i < tokens.size() && tokens[i].text != ";") {
        if (tokens[i].text == "{" || tokens[i].text == "}")
          fail(origin, tokens[i].offset, "expected ';' before brace");
        st.args.push_back(tokens[i].text);
        ++i;
      }
      if (i >= tokens.size())
        fail(origin, st.offset, "statement missing terminating ';'");
      ++i;  // consume ';'
      sec.statements.push_back(std::move(st));
    }
    if (i >= tokens.size())
      fail(origin, sec.offset, "section missing closing '}'");
    ++i;  // consume '}'
    sections.push_back(std::move(sec));
  }
  return sections;
}

int parse_int_arg(const Statement& st, std::size_t idx,
                  const std::string& origin) {
  if (idx >= st.args.size())
    fail(origin, st.offset, "'" + st.keyword + "' is missing an argument");
  try {
    return std::stoi(st.args[idx]);
  } catch (...) {
    fail(origin, st.offset,
         "'" + st.keyword + "' expects an integer, got '" + st.args[idx] + "'");
  }
}

double parse_double_arg(const Statement& st, std::size_t idx,
                        const std::string& origin) {
  if (idx >= st.args.size())
    fail(origin, st.offset, "'" + st.keyword + "' is missing an argument");
  try {
    return std::stod(st.args[idx]);
  } catch (...) {
    fail(origin, st.offset,
         "'" + st.keyword + "' expects a number, got '" + st.args[idx] + "'");
  }
}

const std::string& single_arg(const Statement& st, const std::string& origin) {
  if (st.args.size() != 1)
    fail(origin, st.offset,
         "'" + st.keyword + "' expects exactly one argument");
  return st.args[0];
}

}  // namespace

Problem parse_problem_text(const std::string& text, const std::string& origin) {
  auto sections = parse_sections(text, origin);

  // First pass: dimensions, so expressions can be parsed against the full
  // declared variable set.
  std::optional<int> leader_dim;
  std::vector<std::pair<std::string, int>> follower_dims;
  bool has_group = false;
  for (const auto& sec : sections) {
    if (sec.kind == "group") has_group = true;
    if (sec.kind != "leader" && sec.kind != "follower") continue;
    int dim = -1;
    for (const auto& st : sec.statements)
      if (st.keyword == "dim") dim = parse_int_arg(st, 0, origin);
    if (dim < 1) fail(origin, sec.offset, "section is missing 'dim k;' (k >= 1)");
    if (sec.kind == "leader") {
      if (leader_dim) fail(origin, sec.offset, "duplicate leader section");
      leader_dim = dim;
    } else {
      follower_dims.emplace_back(sec.name, dim);
    }
  }
  if (!leader_dim) fail(origin, 0, "missing leader section");

  std::set<VarId> declared;
  for (int i = 0; i < *leader_dim; ++i) declared.insert({"x", i});
  for (const auto& [id, dim] : follower_dims) {
    for (int i = 0; i < dim; ++i) declared.insert({"y." + id, i});
    // Constraint counts are unknown until the second pass; multiplier blocks
    // for mpcc sections are declared generously and range-checked later.
    for (int i = 0; i < 64; ++i) declared.insert({"lam." + id, i});
  }

  auto parse_quoted_expr = [&](const Statement& st) {
    const std::string& body = single_arg(st, origin);
    try {
      return parse_expr(body, declared);
    } catch (const ParseError& e) {
      fail(origin, st.offset, std::string(e.what()));
    }
  };

  LeaderSpec leader;
  std::vector<FollowerProblem> followers;
  std::vector<SharedGroup> groups;

  for (const auto& sec : sections) {
    if (sec.kind == "leader") {
      leader.dim = *leader_dim;
      bool have_objective = false;
      for (const auto& st : sec.statements) {
        if (st.keyword == "dim") continue;
        if (st.keyword == "objective") {
          leader.objective = parse_quoted_expr(st);
          have_objective = true;
        } else if (st.keyword == "constraint") {
          leader.constraints.push_back(parse_quoted_expr(st));
        } else if (st.keyword == "box") {
          leader.box = {parse_double_arg(st, 0, origin),
                        parse_double_arg(st, 1, origin)};
        } else {
          fail(origin, st.offset,
               "unknown leader statement '" + st.keyword + "'");
        }
      }
      if (!have_objective) fail(origin, sec.offset, "leader has no objective");
    } else if (sec.kind == "follower") {
      FollowerProblem f;
      f.id = sec.name;
      for (const auto& [id, dim] : follower_dims)
        if (id == f.id) f.dim = dim;
      bool have_objective = false;
      for (const auto& st : sec.statements) {
        if (st.keyword == "dim") continue;
        if (st.keyword == "objective") {
          f.objective = parse_quoted_expr(st);
          have_objective = true;
        } else if (st.keyword == "constraint") {
          f.constraints.push_back(parse_quoted_expr(st));
        } else {
          fail(origin, st.offset,
               "unknown follower statement '" + st.keyword + "'");
        }
      }
      if (!have_objective)
        fail(origin, sec.offset, "follower " + f.id + " has no objective");
      followers.push_back(std::move(f));
    } else if (sec.kind == "group") {
      SharedGroup g;
      g.name = sec.name;
      for (const auto& st : sec.statements) {
        if (st.keyword == "members") {
          if (st.args.empty())
            fail(origin, st.offset, "'members' needs at least one id");
          g.members = st.args;
        } else if (st.keyword == "shared_constraint") {
          g.shared_constraints.push_back(parse_quoted_expr(st));
        } else {
          fail(origin, st.offset,
               "unknown group statement '" + st.keyword + "'");
        }
      }
      groups.push_back(std::move(g));
    }
    // mpcc sections are handled by the reformulation loader and are
    // transparent to the plain problem reader.
  }

  Problem out;
  if (has_group) {
    GnepProblem g;
    g.leader = std::move(leader);
    g.followers = std::move(followers);
    g.groups = std::move(groups);
    out = std::move(g);
  } else {
    SlmfgProblem p;
    p.leader = std::move(leader);
    p.followers = std::move(followers);
    out = std::move(p);
  }
  require_valid(out, origin);
  return out;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path);
}

namespace {

void render_leader(std::ostream& os, const LeaderSpec& leader) {
  os << "leader {\n";
  os << "  dim " << leader.dim << ";\n";
  os << "  objective \"" << to_string(leader.objective) << "\";\n";
  for (const auto& c : leader.constraints)
    os << "  constraint \"" << to_string(c) << "\";\n";
  if (leader.box)
    os << "  box " << format_double(leader.box->first) << " "
       << format_double(leader.box->second) << ";\n";
  os << "}\n";
}

void render_follower(std::ostream& os, const FollowerProblem& f) {
  os << "follower " << f.id << " {\n";
  os << "  dim " << f.dim << ";\n";
  os << "  objective \"" << to_string(f.objective) << "\";\n";
  for (const auto& c : f.constraints)
    os << "  constraint \"" << to_string(c) << "\";\n";
  os << "}\n";
}

}  // namespace

std::string render_problem(const Problem& p) {
  std::ostringstream os;
  if (std::holds_alternative<SlmfgProblem>(p)) {
    const auto& q = std::get<SlmfgProblem>(p);
    render_leader(os, q.leader);
    for (const auto& f : q.followers) render_follower(os, f);
  } else {
    const auto& q = std::get<GnepProblem>(p);
    render_leader(os, q.leader);
    for (const auto& f : q.followers) render_follower(os, f);
    for (const auto& g : q.groups) {
      os << "group " << g.name << " {\n";
      os << "  members";
      for (const auto& m : g.members) os << " " << m;
      os << ";\n";
      for (const auto& c : g.shared_constraints)
        os << "  shared_constraint \"" << to_string(c) << "\";\n";
      os << "}\n";
    }
  }
  return os.str();
}

void save_problem(const Problem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write problem file '" + path + "'", 0);
  out << render_problem(p);
}

namespace {

bool equal_exprs(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(a[i], b[i])) return false;
  return true;
}

bool equal_leader(const LeaderSpec& a, const LeaderSpec& b) {
  return a.dim == b.dim && structurally_equal(a.objective, b.objective) &&
         equal_exprs(a.constraints, b.constraints) && a.box == b.box;
}

bool equal_followers(const std::vector<FollowerProblem>& a,
                     const std::vector<FollowerProblem>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].dim != b[i].dim) return false;
    if (!structurally_equal(a[i].objective, b[i].objective)) return false;
    if (!equal_exprs(a[i].constraints, b[i].constraints)) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Problem& a, const Problem& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<SlmfgProblem>(a)) {
    const auto& x = std::get<SlmfgProblem>(a);
    const auto& y = std::get<SlmfgProblem>(b);
    return equal_leader(x.leader, y.leader) &&
           equal_followers(x.followers, y.followers);
  }
  const auto& x = std::get<GnepProblem>(a);
  const auto& y = std::get<GnepProblem>(b);
  if (!equal_leader(x.leader, y.leader) ||
      !equal_followers(x.followers, y.followers))
    return false;
  if (x.groups.size() != y.groups.size()) return false;
  for (std::size_t i = 0; i < x.groups.size(); ++i) {
    if (x.groups[i].name != y.groups[i].name) return false;
    if (x.groups[i].members != y.groups[i].members) return false;
    if (!equal_exprs(x.groups[i].shared_constraints,
                     y.groups[i].shared_constraints))
      return false;
  }
  return true;
}

Assignment assignment_from_point(const SlmfgProblem& p,
                                 std::span<const double> xy) {
  auto vars = p.all_vars();
  if (xy.size() < vars.size())
    throw ValidationError("point has " + std::to_string(xy.size()) +
                          " coordinates, problem needs " +
                          std::to_string(vars.size()));
  Assignment a;
  for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = xy[i];
  return a;
}

std::vector<double> leader_part(const SlmfgProblem& p,
                                std::span<const double> xy) {
  return {xy.begin(), xy.begin() + p.leader.dim};
}

std::vector<double> follower_part(const SlmfgProblem& p, int follower_index,
                                  std::span<const double> xy) {
  int off = p.follower_offset(follower_index);
  int dim = p.followers[follower_index].dim;
  return {xy.begin() + off, xy.begin() + off + dim};
}

bool leader_feasible(const SlmfgProblem& p, std::span<const double> x,
                     double tol) {
  if (static_cast<int>(x.size()) < p.leader.dim) return false;
  if (p.leader.box) {
    for (int i = 0; i < p.leader.dim; ++i)
      if (x[i] < p.leader.box->first - tol || x[i] > p.leader.box->second + tol)
        return false;
  }
  if (!p.leader.constraints.empty()) {
    Assignment a;
    for (int i = 0; i < p.leader.dim; ++i) a[{"x", i}] = x[i];
    for (const auto& c : p.leader.constraints)
      if (eval(c, a) > tol) return false;
  }
  return true;
}

}  // namespace slmfg
