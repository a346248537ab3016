#include "slmfg/mpcc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace slmfg::mpcc {

std::vector<VarId> MpccProblem::multiplier_vars(int follower_index) const {
  const auto& f = game.followers[follower_index];
  std::vector<VarId> v;
  v.reserve(f.constraints.size());
  for (std::size_t j = 0; j < f.constraints.size(); ++j)
    v.push_back({"lam." + f.id, static_cast<int>(j)});
  return v;
}

std::vector<VarId> MpccProblem::point_vars() const {
  std::vector<VarId> v = game.all_vars();
  for (std::size_t f = 0; f < game.followers.size(); ++f) {
    auto mv = multiplier_vars(static_cast<int>(f));
    v.insert(v.end(), mv.begin(), mv.end());
  }
  return v;
}

int MpccProblem::point_dim() const {
  return static_cast<int>(point_vars().size());
}

MpccProblem build_mpcc(const SlmfgProblem& p) {
  MpccProblem m;
  m.game = p;
  for (const auto& f : p.followers) {
    auto own = f.vars();
    auto gobj = grad(f.objective, own);

    std::vector<std::vector<Expr>> gcons;
    gcons.reserve(f.constraints.size());
    for (const auto& c : f.constraints) gcons.push_back(grad(c, own));

    std::vector<Expr> stat;
    stat.reserve(own.size());
    for (std::size_t k = 0; k < own.size(); ++k) {
      std::vector<Expr> terms;
      terms.push_back(gobj[k]);
      for (std::size_t j = 0; j < f.constraints.size(); ++j)
        terms.push_back(Expr::product(
            {Expr::var({"lam." + f.id, static_cast<int>(j)}), gcons[j][k]}));
      stat.push_back(simplify(Expr::sum(std::move(terms))));
    }
    m.stationarity.push_back(std::move(stat));

    std::vector<Expr> comp_terms;
    for (std::size_t j = 0; j < f.constraints.size(); ++j)
      comp_terms.push_back(Expr::product(
          {Expr::var({"lam." + f.id, static_cast<int>(j)}), f.constraints[j]}));
    m.complementarity.push_back(simplify(Expr::sum(std::move(comp_terms))));
  }
  return m;
}

double KktResidual::total() const {
  return std::max({stationarity_norm, feasibility_violation, sign_violation,
                   complementarity_gap});
}

KktResidual kkt_residual(const MpccProblem& m, std::span<const double> point) {
  auto vars = m.point_vars();
  if (point.size() != vars.size())
    throw DimensionError("kkt_residual: point has " +
                         std::to_string(point.size()) + " coordinates, MPCC needs " +
                         std::to_string(vars.size()));
  Assignment a;
  for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = point[i];

  KktResidual r;
  for (std::size_t f = 0; f < m.game.followers.size(); ++f) {
    const auto& fp = m.game.followers[f];
    for (const auto& s : m.stationarity[f])
      r.stationarity_norm = std::max(r.stationarity_norm, std::abs(eval(s, a)));
    for (const auto& g : fp.constraints)
      r.feasibility_violation = std::max(r.feasibility_violation, eval(g, a));
    for (const auto& lv : m.multiplier_vars(static_cast<int>(f)))
      r.sign_violation = std::max(r.sign_violation, -a.at(lv));
    r.complementarity_gap =
        std::max(r.complementarity_gap, std::abs(eval(m.complementarity[f], a)));
  }
  r.feasibility_violation = std::max(r.feasibility_violation, 0.0);
  r.sign_violation = std::max(r.sign_violation, 0.0);
  return r;
}

bool is_mpcc_feasible(const MpccProblem& m, std::span<const double> point,
                      double tol) {
  if (kkt_residual(m, point).total() > tol) return false;
  return leader_feasible(m.game, point.subspan(0, m.game.leader.dim), tol);
}

std::string render_mpcc(const MpccProblem& m) {
  std::ostringstream os;
  os << render_problem(Problem(m.game));
  os << "mpcc {\n";
  for (std::size_t f = 0; f < m.game.followers.size(); ++f) {
    for (const auto& s : m.stationarity[f])
      os << "  stationarity " << m.game.followers[f].id << " \""
         << to_string(s) << "\";\n";
  }
  for (std::size_t f = 0; f < m.game.followers.size(); ++f)
    os << "  complementarity " << m.game.followers[f].id << " \""
       << to_string(m.complementarity[f]) << "\";\n";
  os << "}\n";
  return os.str();
}

void save_mpcc(const MpccProblem& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write mpcc file '" + path + "'", 0);
  out << render_mpcc(m);
}

MpccProblem load_mpcc(const std::string& path) {
  Problem p = load_problem(path);
  if (!std::holds_alternative<SlmfgProblem>(p))
    throw ValidationError(path + ": mpcc files must not contain group sections");
  MpccProblem rebuilt = build_mpcc(std::get<SlmfgProblem>(p));

  // Cross-check any mpcc section in the file against the rebuild, so a
  // hand-edited reformulation cannot silently drift from its problem.
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  auto expect = [&](const std::string& needle) {
    if (text.find(needle) == std::string::npos)
      throw ValidationError(path +
                            ": mpcc section does not match the reformulation "
                            "of the embedded problem (missing \"" +
                            needle + "\")");
  };
  if (text.find("mpcc") != std::string::npos) {
    for (std::size_t f = 0; f < rebuilt.game.followers.size(); ++f) {
      for (const auto& s : rebuilt.stationarity[f]) expect(to_string(s));
      expect(to_string(rebuilt.complementarity[f]));
    }
  }
  return rebuilt;
}

}  // namespace slmfg::mpcc
