#include "slmfg/gnep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "search.hpp"

namespace slmfg::gnep {

namespace {

constexpr double kTieTol = 1e-9;

Assignment leader_assignment(const GnepProblem& g, std::span<const double> x) {
  Assignment a;
  auto lv = g.leader.vars();
  if (x.size() < lv.size())
    throw ValidationError("gnep: leader point too short");
  for (std::size_t i = 0; i < lv.size(); ++i) a[lv[i]] = x[i];
  return a;
}

void require_objectives_private(const GnepProblem& g) {
  for (const auto& f : g.followers) {
    for (const VarId& v : variables(f.objective)) {
      if (v.block != "x" && v.block != f.block())
        throw ValidationError("reduce_rosen_to_opt: follower " + f.id +
                              " objective references '" + v.str() +
                              "'; the single-group reduction requires "
                              "objectives independent of the other followers");
    }
  }
}

// Joint convexity of one shared constraint in the group's variables.  With a
// fixed leader value the check is exact for quadratics; otherwise the leader
// value ranges over the box and sampling applies.
bool shared_constraint_certified(const GnepProblem& g, const SharedGroup& grp,
                                 const Expr& c, const Assignment* x_fixed,
                                 const RunConfig& cfg) {
  std::vector<VarId> group_vars;
  for (const auto& m : grp.members) {
    auto fv = g.follower(m).vars();
    group_vars.insert(group_vars.end(), fv.begin(), fv.end());
  }
  Expr target = x_fixed ? simplify(substitute(c, *x_fixed)) : c;
  std::vector<VarId> box_vars = group_vars;
  if (!x_fixed) {
    auto lv = g.leader.vars();
    box_vars.insert(box_vars.end(), lv.begin(), lv.end());
  }
  Box box = Box::uniform(box_vars, cfg.box_lo, cfg.box_hi);
  auto v = classify_convexity(target, group_vars, box, cfg.samples,
                              sub_seed(cfg.seed, "gnep-certify"));
  return v.certified();
}

void certify_or_throw(const GnepProblem& g, const Assignment* x_fixed,
                      const RunConfig& cfg, bool assume) {
  if (assume) return;
  for (const auto& grp : g.groups)
    for (const auto& c : grp.shared_constraints)
      if (!shared_constraint_certified(g, grp, c, x_fixed, cfg))
        throw CertificationError(
            "shared constraint \"" + to_string(c) + "\" of group " + grp.name +
            " is not certified jointly convex; pass the explicit override to "
            "proceed anyway");
}

}  // namespace

OptProblem reduce_rosen_to_opt(const GnepProblem& g, std::span<const double> x,
                               const RunConfig& cfg,
                               bool assume_jointly_convex) {
  if (g.groups.size() != 1)
    throw ValidationError(
        "reduce_rosen_to_opt expects exactly one shared-constraint group");
  require_objectives_private(g);
  Assignment xa = leader_assignment(g, x);
  certify_or_throw(g, &xa, cfg, assume_jointly_convex);

  OptProblem out;
  std::vector<Expr> objective_terms;
  for (const auto& f : g.followers) {
    auto fv = f.vars();
    out.vars.insert(out.vars.end(), fv.begin(), fv.end());
    objective_terms.push_back(simplify(substitute(f.objective, xa)));
    for (const auto& c : f.constraints)
      out.constraints.push_back(simplify(substitute(c, xa)));
  }
  out.objective = simplify(Expr::sum(std::move(objective_terms)));
  for (const auto& grp : g.groups)
    for (const auto& c : grp.shared_constraints)
      out.constraints.push_back(simplify(substitute(c, xa)));
  return out;
}

SlmfgProblem reduce_grouped_to_nep(const GnepProblem& g, const RunConfig& cfg,
                                   bool assume_jointly_convex) {
  require_valid(Problem(g), "reduce_grouped_to_nep");
  certify_or_throw(g, nullptr, cfg, assume_jointly_convex);

  // Rename every member variable into its group's pseudo-follower block.
  std::map<VarId, VarId> renames;
  for (const auto& grp : g.groups) {
    int offset = 0;
    for (const auto& m : grp.members) {
      const FollowerProblem& f = g.follower(m);
      for (int i = 0; i < f.dim; ++i)
        renames[{f.block(), i}] = {"y." + grp.name, offset + i};
      offset += f.dim;
    }
  }

  SlmfgProblem out;
  out.leader = g.leader;  // carried over unchanged
  for (const auto& grp : g.groups) {
    FollowerProblem pseudo;
    pseudo.id = grp.name;
    pseudo.dim = 0;
    std::vector<Expr> objective_terms;
    for (const auto& m : grp.members) {
      const FollowerProblem& f = g.follower(m);
      pseudo.dim += f.dim;
      objective_terms.push_back(rename_vars(f.objective, renames));
      for (const auto& c : f.constraints)
        pseudo.constraints.push_back(rename_vars(c, renames));
    }
    pseudo.objective = Expr::sum(std::move(objective_terms));
    for (const auto& c : grp.shared_constraints)
      pseudo.constraints.push_back(rename_vars(c, renames));
    out.followers.push_back(std::move(pseudo));
  }
  require_valid(Problem(out), "reduce_grouped_to_nep output");
  return out;
}

namespace {

struct MemberCtx {
  int follower_index = 0;
  int profile_offset = 0;  // into the full original profile
  int dim = 1;
  Evaluator obj;                       // over own vars
  std::vector<Evaluator> private_con;  // over own vars
};

bool objectives_cross_group_independent(const GnepProblem& g) {
  for (const auto& f : g.followers)
    for (const VarId& v : variables(f.objective))
      if (v.block != "x" && v.block != f.block()) return false;
  return true;
}

}  // namespace

EquivalenceReport check_reduction_equivalence(const GnepProblem& g,
                                              std::span<const double> x,
                                              const nep::GridSpec& grid,
                                              const RunConfig& cfg,
                                              bool assume_jointly_convex) {
  EquivalenceReport rep;
  rep.grid_step = grid.step;

  rep.joint_convexity_certified = true;
  for (const auto& grp : g.groups)
    for (const auto& c : grp.shared_constraints)
      rep.joint_convexity_certified =
          rep.joint_convexity_certified &&
          shared_constraint_certified(g, grp, c, nullptr, cfg);
  if (!rep.joint_convexity_certified && !assume_jointly_convex)
    throw CertificationError(
        "check_reduction_equivalence: shared constraints not certified "
        "jointly convex; pass the explicit override to proceed anyway");
  rep.hypothesis_violated = !rep.joint_convexity_certified;

  // The per-group enumeration below needs objectives that do not couple
  // followers across groups.
  if (!objectives_cross_group_independent(g))
    throw ValidationError(
        "check_reduction_equivalence: objectives couple across groups");

  Assignment xa = leader_assignment(g, x);

  const int total_dim = [&] {
    int d = 0;
    for (const auto& f : g.followers) d += f.dim;
    return d;
  }();
  std::vector<int> follower_offset(g.followers.size(), 0);
  for (std::size_t i = 1; i < g.followers.size(); ++i)
    follower_offset[i] = follower_offset[i - 1] + g.followers[i - 1].dim;

  // ---- grid-RGNEP, group by group ---------------------------------------
  std::vector<std::vector<std::vector<double>>> group_eqs;
  std::vector<std::vector<std::pair<int, int>>> group_layout;  // (offset, dim)

  for (const auto& grp : g.groups) {
    std::vector<MemberCtx> members;
    std::vector<VarId> group_vars;
    for (const auto& mid : grp.members) {
      const FollowerProblem& f = g.follower(mid);
      MemberCtx mc;
      for (std::size_t i = 0; i < g.followers.size(); ++i)
        if (g.followers[i].id == mid) mc.follower_index = static_cast<int>(i);
      mc.profile_offset = follower_offset[mc.follower_index];
      mc.dim = f.dim;
      mc.obj = Evaluator(simplify(substitute(f.objective, xa)), f.vars());
      for (const auto& c : f.constraints)
        mc.private_con.emplace_back(simplify(substitute(c, xa)), f.vars());
      members.push_back(std::move(mc));
      auto fv = f.vars();
      group_vars.insert(group_vars.end(), fv.begin(), fv.end());
    }
    std::vector<Evaluator> shared_ev;
    for (const auto& c : grp.shared_constraints)
      shared_ev.emplace_back(simplify(substitute(c, xa)), group_vars);

    int group_dim = 0;
    double axis_len = detail::grid_axis(grid.lo, grid.hi, grid.step).size();
    double prof_count = 1;
    for (const auto& mc : members) {
      group_dim += mc.dim;
      for (int i = 0; i < mc.dim; ++i) prof_count *= axis_len;
    }
    if (prof_count > 2e6)
      throw ValidationError("check_reduction_equivalence: group grid too large");

    std::vector<double> lo(group_dim, grid.lo), hi(group_dim, grid.hi);
    std::vector<std::vector<double>> eqs;
    std::vector<double> work(group_dim);
    detail::for_each_grid_point(
        lo, hi, grid.step, [&](std::span<const double> prof) {
          int off = 0;
          for (const auto& mc : members) {
            std::span<const double> own = prof.subspan(off, mc.dim);
            for (const auto& e : mc.private_con)
              if (e(own) > cfg.feas_tol) return;
            off += mc.dim;
          }
          for (const auto& e : shared_ev)
            if (e(prof) > cfg.feas_tol) return;

          // Per-member conditional argmin with the peers held fixed.
          std::copy(prof.begin(), prof.end(), work.begin());
          off = 0;
          for (const auto& mc : members) {
            std::span<const double> own = prof.subspan(off, mc.dim);
            double own_val = mc.obj(own);
            double best = own_val;
            std::vector<double> lo2(mc.dim, grid.lo), hi2(mc.dim, grid.hi);
            const int member_off = off;
            detail::for_each_grid_point(
                lo2, hi2, grid.step, [&](std::span<const double> z) {
                  for (const auto& e : mc.private_con)
                    if (e(z) > cfg.feas_tol) return;
                  std::copy(z.begin(), z.end(), work.begin() + member_off);
                  for (const auto& e : shared_ev)
                    if (e(work) > cfg.feas_tol) return;
                  best = std::min(best, mc.obj(z));
                });
            std::copy(own.begin(), own.end(), work.begin() + member_off);
            if (own_val > best + kTieTol) return;  // not a best response
            off += mc.dim;
          }
          eqs.emplace_back(prof.begin(), prof.end());
        });

    std::vector<std::pair<int, int>> layout;
    for (const auto& mc : members)
      layout.emplace_back(mc.profile_offset, mc.dim);
    group_eqs.push_back(std::move(eqs));
    group_layout.push_back(std::move(layout));
  }

  // Product across groups, rewritten into the original follower order.
  std::vector<std::vector<double>> rgnep;
  {
    bool any_empty = false;
    for (const auto& ge : group_eqs) any_empty = any_empty || ge.empty();
    if (!group_eqs.empty() && !any_empty) {
      std::vector<std::size_t> idx(group_eqs.size(), 0);
      while (true) {
        std::vector<double> full(total_dim, 0.0);
        for (std::size_t gi = 0; gi < group_eqs.size(); ++gi) {
          const auto& prof = group_eqs[gi][idx[gi]];
          int pos = 0;
          for (const auto& [offset, dim] : group_layout[gi]) {
            for (int i = 0; i < dim; ++i) full[offset + i] = prof[pos + i];
            pos += dim;
          }
        }
        rgnep.push_back(std::move(full));
        if (rgnep.size() > 500000)
          throw ValidationError(
              "check_reduction_equivalence: RGNEP grid set too large");
        std::size_t i = group_eqs.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (++idx[i] < group_eqs[i].size()) {
            done = false;
            break;
          }
          idx[i] = 0;
        }
        if (done) break;
      }
    }
  }
  rep.rgnep_count = rgnep.size();

  // ---- reduced problem's grid solutions ----------------------------------
  SlmfgProblem reduced = reduce_grouped_to_nep(g, cfg, true);
  auto reduced_eqs = nep::brute_force_nep(reduced, x, grid, cfg);

  std::vector<std::vector<double>> reduced_pts;
  for (const auto& ge : reduced_eqs) {
    std::vector<double> full(total_dim, 0.0);
    int pos = 0;
    for (std::size_t gi = 0; gi < g.groups.size(); ++gi) {
      for (const auto& [offset, dim] : group_layout[gi]) {
        for (int i = 0; i < dim; ++i) full[offset + i] = ge.y[pos + i];
        pos += dim;
      }
    }
    reduced_pts.push_back(std::move(full));
  }
  rep.reduced_count = reduced_pts.size();

  const double match_tol = grid.step + 1e-9;
  auto matched = [&](const std::vector<double>& a,
                     const std::vector<std::vector<double>>& pool) {
    for (const auto& b : pool) {
      double d = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
      if (d <= match_tol) return true;
    }
    return false;
  };
  for (const auto& a : rgnep)
    if (!matched(a, reduced_pts)) rep.rgnep_only.push_back(a);
  for (const auto& b : reduced_pts)
    if (!matched(b, rgnep)) rep.reduced_only.push_back(b);
  return rep;
}

}  // namespace slmfg::gnep
