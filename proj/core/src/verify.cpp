#include "slmfg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include <Eigen/Dense>

#include "slmfg/linalg.hpp"
#include "slmfg/multipliers.hpp"
#include "search.hpp"

namespace slmfg::verify {

namespace {

// The per-follower scan tables below require the own-block argmin (and the
// own-block gradients) to be independent of the other followers; additive
// cross terms are fine.  The corpus satisfies this; coupled objectives fall
// back to the joint scan.
bool separable_objectives(const SlmfgProblem& p) {
  for (const auto& f : p.followers)
    for (const auto& g : p.followers) {
      if (g.id == f.id) continue;
      for (const VarId& u : f.vars())
        for (const VarId& w : g.vars()) {
          double v = 0.0;
          if (!(is_constant(simplify(diff(diff(f.objective, u), w)), &v) &&
                v == 0.0))
            return false;
        }
    }
  return true;
}

// Follower data specialised at a fixed leader point (other followers pinned
// at the base profile; valid for the scans by separability).
struct FollowerCtx {
  std::vector<VarId> own;
  std::vector<Evaluator> con_ev;
  Evaluator obj_ev;
  std::vector<std::vector<Evaluator>> con_grad_ev;  // [j][coordinate]
  std::vector<Evaluator> obj_grad_ev;

  std::size_t n() const { return own.size(); }
  std::size_t pcount() const { return con_ev.size(); }
  bool feasible(std::span<const double> y, double tol) const {
    for (const auto& e : con_ev)
      if (e(y) > tol) return false;
    return true;
  }
  std::vector<int> active_set(std::span<const double> y, double tol) const {
    std::vector<int> act;
    for (std::size_t j = 0; j < con_ev.size(); ++j)
      if (std::abs(con_ev[j](y)) <= tol) act.push_back(static_cast<int>(j));
    return act;
  }
  Eigen::MatrixXd active_gradients(const std::vector<int>& act,
                                   std::span<const double> y) const {
    Eigen::MatrixXd a(n(), act.size());
    for (std::size_t c = 0; c < act.size(); ++c)
      for (std::size_t r = 0; r < n(); ++r)
        a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            con_grad_ev[act[c]][r](y);
    return a;
  }
  Eigen::VectorXd obj_gradient(std::span<const double> y) const {
    Eigen::VectorXd g(n());
    for (std::size_t i = 0; i < n(); ++i) g[i] = obj_grad_ev[i](y);
    return g;
  }
};

FollowerCtx make_ctx(const SlmfgProblem& p, std::size_t fi,
                     std::span<const double> x,
                     std::span<const double> base_y) {
  const auto& f = p.followers[fi];
  Assignment fixed;
  auto lv = p.leader.vars();
  for (std::size_t i = 0; i < lv.size(); ++i) fixed[lv[i]] = x[i];
  int off = 0;
  for (const auto& g : p.followers) {
    if (g.id != f.id)
      for (int i = 0; i < g.dim; ++i) fixed[{g.block(), i}] = base_y[off + i];
    off += g.dim;
  }

  FollowerCtx ctx;
  ctx.own = f.vars();
  Expr obj = simplify(substitute(f.objective, fixed));
  ctx.obj_ev = Evaluator(obj, ctx.own);
  for (const auto& e : grad(obj, ctx.own))
    ctx.obj_grad_ev.emplace_back(e, ctx.own);
  for (const auto& c : f.constraints) {
    Expr sc = simplify(substitute(c, fixed));
    ctx.con_ev.emplace_back(sc, ctx.own);
    std::vector<Evaluator> ge;
    for (const auto& e : grad(sc, ctx.own)) ge.emplace_back(e, ctx.own);
    ctx.con_grad_ev.push_back(std::move(ge));
  }
  return ctx;
}

linalg::Tolerances lin_tols(const RunConfig& cfg) {
  linalg::Tolerances t;
  t.rank_rel = cfg.rank_tol;
  t.sign = cfg.sign_tol;
  t.residual = 1e-9;
  return t;
}

// Ball grid points of one follower's own block around a base block.
std::vector<std::vector<double>> ball_points(std::span<const double> center,
                                             double radius, double step) {
  std::vector<double> lo(center.size()), hi(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    lo[i] = center[i] - radius;
    hi[i] = center[i] + radius;
  }
  std::vector<std::vector<double>> pts;
  detail::for_each_grid_point(lo, hi, step, [&](std::span<const double> y) {
    pts.emplace_back(y.begin(), y.end());
  });
  return pts;
}

std::vector<std::vector<double>> box_points(std::size_t n, double lo, double hi,
                                            double step) {
  std::vector<double> los(n, lo), his(n, hi);
  std::vector<std::vector<double>> pts;
  detail::for_each_grid_point(los, his, step, [&](std::span<const double> y) {
    pts.emplace_back(y.begin(), y.end());
  });
  return pts;
}

// Equilibrium candidates of one follower at the leader point among the given
// own-block points: feasibility, best-response gap over the verification
// grid, and (when Slater holds) the KKT residual.
std::vector<std::vector<double>> nash_candidates(
    const FollowerCtx& ctx, const std::vector<std::vector<double>>& candidates,
    cq::Verdict slater, const RunConfig& cfg) {
  double grid_min = std::numeric_limits<double>::infinity();
  auto verif = box_points(ctx.n(), cfg.box_lo, cfg.box_hi, cfg.grid_step);
  for (const auto& y : verif)
    if (ctx.feasible(y, cfg.feas_tol))
      grid_min = std::min(grid_min, ctx.obj_ev(y));

  std::vector<std::vector<double>> out;
  for (const auto& y : candidates) {
    if (!ctx.feasible(y, cfg.feas_tol)) continue;
    double gap = std::max(0.0, ctx.obj_ev(y) - grid_min);
    if (gap > cfg.gap_tol) continue;
    if (slater == cq::Verdict::Holds) {
      auto act = ctx.active_set(y, cfg.activity_tol);
      double resid = linalg::nonneg_min_residual_inf(
          ctx.active_gradients(act, y), ctx.obj_gradient(y), lin_tols(cfg));
      if (resid > cfg.gap_tol) continue;
    }
    out.push_back(y);
  }
  return out;
}

// MPCC-completable candidates: (own point, multiplier) pairs where the
// multiplier polytope at the point meets the given coordinate box, or is
// merely nonempty when no box is given.
struct MpccCandidate {
  std::vector<double> y;
  std::vector<double> lam;
};

std::vector<MpccCandidate> mpcc_candidates(
    const FollowerCtx& ctx, const std::vector<std::vector<double>>& candidates,
    const std::optional<std::pair<std::vector<double>, std::vector<double>>>&
        lam_box,
    const RunConfig& cfg) {
  std::vector<MpccCandidate> out;
  for (const auto& y : candidates) {
    if (!ctx.feasible(y, cfg.feas_tol)) continue;
    multipliers::MultiplierPolytope poly;
    poly.num_constraints = static_cast<int>(ctx.pcount());
    poly.active.indices = ctx.active_set(y, cfg.activity_tol);
    poly.a = ctx.active_gradients(poly.active.indices, y);
    poly.b = -ctx.obj_gradient(y);

    std::optional<std::vector<double>> lam;
    if (lam_box) {
      lam =
          multipliers::point_in_box(poly, lam_box->first, lam_box->second, cfg);
    } else {
      auto bfs =
          linalg::basic_feasible_solutions(poly.a, poly.b, lin_tols(cfg));
      if (!bfs.empty()) lam = poly.expand(bfs.front().point);
    }
    if (lam) out.push_back({y, std::move(*lam)});
  }
  return out;
}

struct ScanOutcome {
  bool found = false;
  std::vector<double> point;
  double objective = 0.0;
  long tested = 0;
};

// Enumerate the product of per-follower candidate lists in lexicographic
// order; report the first full profile strictly better than `threshold`.
template <typename Candidate>
ScanOutcome product_scan(
    const SlmfgProblem& p, std::span<const double> x,
    const std::vector<std::vector<Candidate>>& lists,
    const Evaluator& leader_obj, double threshold, double strict,
    const std::function<const std::vector<double>&(const Candidate&)>& own_of,
    const std::function<std::vector<double>(
        std::span<const double>, const std::vector<const Candidate*>&)>&
        assemble) {
  ScanOutcome out;
  for (const auto& l : lists)
    if (l.empty()) return out;

  std::vector<std::size_t> idx(lists.size(), 0);
  std::vector<double> full(p.leader.dim + p.total_follower_dim());
  std::copy(x.begin(), x.end(), full.begin());
  while (true) {
    std::vector<const Candidate*> picks;
    picks.reserve(lists.size());
    int off = p.leader.dim;
    for (std::size_t f = 0; f < lists.size(); ++f) {
      const Candidate& c = lists[f][idx[f]];
      picks.push_back(&c);
      const auto& own = own_of(c);
      std::copy(own.begin(), own.end(), full.begin() + off);
      off += p.followers[f].dim;
    }
    ++out.tested;
    double v = leader_obj(full);
    if (v < threshold - strict) {
      out.found = true;
      out.objective = v;
      out.point = assemble(full, picks);
      return out;
    }
    std::size_t i = lists.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++idx[i] < lists[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) return out;
  }
}

using SlaterCache = std::map<std::vector<double>, std::vector<cq::Verdict>>;

const std::vector<cq::Verdict>& slater_at(const SlmfgProblem& p,
                                          const std::vector<double>& x,
                                          const RunConfig& cfg,
                                          SlaterCache& cache) {
  auto it = cache.find(x);
  if (it != cache.end()) return it->second;
  std::vector<cq::Verdict> v;
  for (const auto& f : p.followers)
    v.push_back(cq::check_slater(p, f.id, x, cfg.box_lo, cfg.box_hi,
                                 cfg.samples, cfg)
                    .verdict);
  return cache.emplace(x, std::move(v)).first->second;
}

RunConfig probe_config(const RunConfig& cfg) {
  RunConfig probe = cfg;
  probe.multistart = std::min(cfg.multistart, 8);
  probe.samples = std::min(cfg.samples, 16);
  return probe;
}

std::vector<std::vector<double>> leader_grid(std::span<const double> x_center,
                                             double radius, double step,
                                             const SlmfgProblem& p) {
  std::vector<double> lo(x_center.size()), hi(x_center.size());
  for (std::size_t i = 0; i < x_center.size(); ++i) {
    lo[i] = x_center[i] - radius;
    hi[i] = x_center[i] + radius;
  }
  std::vector<std::vector<double>> pts;
  detail::for_each_grid_point(lo, hi, step, [&](std::span<const double> x) {
    std::vector<double> xv(x.begin(), x.end());
    if (leader_feasible(p, xv, 1e-12)) pts.push_back(std::move(xv));
  });
  return pts;
}

std::vector<std::vector<double>> leader_box_grid(const SlmfgProblem& p,
                                                 double lo, double hi,
                                                 double step) {
  std::vector<double> los(p.leader.dim, lo), his(p.leader.dim, hi);
  std::vector<std::vector<double>> xs;
  detail::for_each_grid_point(los, his, step, [&](std::span<const double> xv) {
    std::vector<double> v(xv.begin(), xv.end());
    if (leader_feasible(p, v, 1e-12)) xs.push_back(std::move(v));
  });
  return xs;
}

}  // namespace

LocalMinVerdict is_local_min_slmfg(const SlmfgProblem& p,
                                   std::span<const double> point, double radius,
                                   double step, const RunConfig& cfg) {
  LocalMinVerdict verdict;
  verdict.radius = radius;
  verdict.step = step;

  std::vector<double> x(point.begin(), point.begin() + p.leader.dim);
  std::vector<double> y(point.begin() + p.leader.dim, point.end());

  SlaterCache slater_cache;
  if (!leader_feasible(p, x, cfg.feas_tol))
    throw InfeasibleBasePointError(
        "base point violates the leader's feasible set");
  {
    auto base_nash = nep::is_nash_equilibrium_with_slater(
        p, x, y, cfg.gap_tol, cfg, slater_at(p, x, cfg, slater_cache));
    if (!base_nash.is_equilibrium)
      throw InfeasibleBasePointError("base point is not a Nash equilibrium: " +
                                     base_nash.note);
  }

  Evaluator leader_obj(p.leader.objective, p.all_vars());
  std::vector<double> base_full(point.begin(), point.end());
  const double base_val = leader_obj(base_full);

  if (!separable_objectives(p))
    throw ValidationError(
        "is_local_min_slmfg: coupled follower objectives are outside the "
        "separable scan");

  auto xs = leader_grid(x, radius, step, p);
  for (const auto& xp : xs) {
    const auto& slater = slater_at(p, xp, cfg, slater_cache);
    std::vector<std::vector<std::vector<double>>> lists;
    int off = 0;
    for (std::size_t fi = 0; fi < p.followers.size(); ++fi) {
      FollowerCtx ctx = make_ctx(p, fi, xp, y);
      auto pts = ball_points(
          std::span<const double>(y).subspan(off, p.followers[fi].dim), radius,
          step);
      lists.push_back(nash_candidates(ctx, pts, slater[fi], cfg));
      off += p.followers[fi].dim;
    }
    auto outcome = product_scan<std::vector<double>>(
        p, xp, lists, leader_obj, base_val, cfg.strict_improve,
        [](const std::vector<double>& c) -> const std::vector<double>& {
          return c;
        },
        [&](std::span<const double> full,
            const std::vector<const std::vector<double>*>&) {
          return std::vector<double>(full.begin(), full.end());
        });
    verdict.feasible_neighbors_tested += outcome.tested;
    if (outcome.found) {
      verdict.better_found = true;
      verdict.better_point = outcome.point;
      verdict.objective_gap = base_val - outcome.objective;
      return verdict;
    }
  }

  // Equilibrium-manifold probe: exact best responses at each scanned x catch
  // equilibria the neighbor grid misses.
  RunConfig probe = probe_config(cfg);
  for (const auto& xp : xs) {
    nep::NepResult nr;
    try {
      nr = nep::solve_nep(p, xp, probe);
    } catch (const nep::InfeasibleFollowerError&) {
      continue;
    } catch (const nep::UnboundedError&) {
      continue;
    }
    for (const auto& eq : nr.equilibria) {
      double d = 0.0;
      for (std::size_t i = 0; i < eq.y.size(); ++i)
        d = std::max(d, std::abs(eq.y[i] - y[i]));
      if (d > radius + 1e-12) continue;
      std::vector<double> full(xp.begin(), xp.end());
      full.insert(full.end(), eq.y.begin(), eq.y.end());
      ++verdict.feasible_neighbors_tested;
      double v = leader_obj(full);
      if (v < base_val - cfg.strict_improve) {
        verdict.better_found = true;
        verdict.better_point = full;
        verdict.objective_gap = base_val - v;
        return verdict;
      }
    }
  }
  return verdict;
}

LocalMinVerdict is_local_min_mpcc(const mpcc::MpccProblem& m,
                                  std::span<const double> point, double radius,
                                  double step, const RunConfig& cfg) {
  const SlmfgProblem& p = m.game;
  LocalMinVerdict verdict;
  verdict.radius = radius;
  verdict.step = step;

  if (!mpcc::is_mpcc_feasible(m, point, cfg.gap_tol))
    throw InfeasibleBasePointError("base point is not MPCC-feasible");

  std::vector<double> x(point.begin(), point.begin() + p.leader.dim);
  const int ydim = p.total_follower_dim();
  std::vector<double> y(point.begin() + p.leader.dim,
                        point.begin() + p.leader.dim + ydim);
  std::vector<std::vector<double>> lam0;
  {
    int off = p.leader.dim + ydim;
    for (const auto& f : p.followers) {
      int cnt = static_cast<int>(f.constraints.size());
      lam0.emplace_back(point.begin() + off, point.begin() + off + cnt);
      off += cnt;
    }
  }

  if (!separable_objectives(p))
    throw ValidationError(
        "is_local_min_mpcc: coupled follower objectives are outside the "
        "separable scan");

  Evaluator leader_obj(p.leader.objective, p.all_vars());
  std::vector<double> base_xy(point.begin(),
                              point.begin() + p.leader.dim + ydim);
  const double base_val = leader_obj(base_xy);

  auto lam_box_of = [&](std::size_t fi) {
    std::vector<double> lb, ub;
    for (double l : lam0[fi]) {
      lb.push_back(std::max(0.0, l - radius));
      ub.push_back(l + radius);
    }
    return std::make_optional(std::make_pair(lb, ub));
  };

  auto xs = leader_grid(x, radius, step, p);
  for (const auto& xp : xs) {
    std::vector<std::vector<MpccCandidate>> lists;
    int off = 0;
    for (std::size_t fi = 0; fi < p.followers.size(); ++fi) {
      FollowerCtx ctx = make_ctx(p, fi, xp, y);
      auto pts = ball_points(
          std::span<const double>(y).subspan(off, p.followers[fi].dim), radius,
          step);
      lists.push_back(mpcc_candidates(ctx, pts, lam_box_of(fi), cfg));
      off += p.followers[fi].dim;
    }
    auto outcome = product_scan<MpccCandidate>(
        p, xp, lists, leader_obj, base_val, cfg.strict_improve,
        [](const MpccCandidate& c) -> const std::vector<double>& {
          return c.y;
        },
        [&](std::span<const double> full,
            const std::vector<const MpccCandidate*>& picks) {
          std::vector<double> pt(full.begin(), full.end());
          for (const auto* c : picks)
            pt.insert(pt.end(), c->lam.begin(), c->lam.end());
          return pt;
        });
    verdict.feasible_neighbors_tested += outcome.tested;
    if (outcome.found) {
      verdict.better_found = true;
      verdict.better_point = outcome.point;
      verdict.objective_gap = base_val - outcome.objective;
      return verdict;
    }
  }

  // Manifold probe with exact multiplier completion inside the ball.
  RunConfig probe = probe_config(cfg);
  for (const auto& xp : xs) {
    nep::NepResult nr;
    try {
      nr = nep::solve_nep(p, xp, probe);
    } catch (const nep::InfeasibleFollowerError&) {
      continue;
    } catch (const nep::UnboundedError&) {
      continue;
    }
    for (const auto& eq : nr.equilibria) {
      double d = 0.0;
      for (std::size_t i = 0; i < eq.y.size(); ++i)
        d = std::max(d, std::abs(eq.y[i] - y[i]));
      if (d > radius + 1e-12) continue;
      std::vector<double> full(xp.begin(), xp.end());
      full.insert(full.end(), eq.y.begin(), eq.y.end());
      double v = leader_obj(full);
      if (v >= base_val - cfg.strict_improve) continue;
      bool ok = true;
      std::vector<double> lam_all;
      for (std::size_t fi = 0; fi < p.followers.size() && ok; ++fi) {
        try {
          auto poly = multipliers::multiplier_polytope(
              p, p.followers[fi].id, xp, eq.y, cfg.activity_tol, cfg.feas_tol);
          auto box = lam_box_of(fi);
          auto lam =
              multipliers::point_in_box(poly, box->first, box->second, cfg);
          if (!lam) {
            ok = false;
            break;
          }
          lam_all.insert(lam_all.end(), lam->begin(), lam->end());
        } catch (const multipliers::InfeasiblePointError&) {
          ok = false;
        }
      }
      if (!ok) continue;
      ++verdict.feasible_neighbors_tested;
      full.insert(full.end(), lam_all.begin(), lam_all.end());
      verdict.better_found = true;
      verdict.better_point = full;
      verdict.objective_gap = base_val - v;
      return verdict;
    }
  }
  return verdict;
}

std::string gate_status_name(GateStatus s) {
  switch (s) {
    case GateStatus::Transferred:
      return "Transferred";
    case GateStatus::HypothesisFailed:
      return "HypothesisFailed";
    case GateStatus::ConclusionRefuted:
      return "ConclusionRefuted";
  }
  return "?";
}

namespace {

HypothesisCheck convexity_at_x(const SlmfgProblem& p, std::span<const double> x,
                               const RunConfig& cfg) {
  HypothesisCheck h;
  h.name = "follower-convexity";
  h.verdict = cq::Verdict::Holds;
  Assignment xa;
  auto lv = p.leader.vars();
  for (std::size_t i = 0; i < lv.size(); ++i) xa[lv[i]] = x[i];
  Box all_box = Box::uniform(p.all_vars(), cfg.box_lo, cfg.box_hi);
  for (const auto& f : p.followers) {
    auto own = f.vars();
    auto merge = [&](const ConvexityVerdict& v, const std::string& what) {
      if (v.kind == ConvexityVerdict::Kind::NonconvexWitness) {
        h.verdict = cq::Verdict::Fails;
        if (h.detail.empty())
          h.detail = "follower " + f.id + " " + what + " not convex in y^f";
      } else if (!v.certified() && h.verdict == cq::Verdict::Holds) {
        h.verdict = cq::Verdict::Unknown;
        h.detail = "follower " + f.id + " " + what + " convexity unresolved";
      }
    };
    merge(classify_convexity(simplify(substitute(f.objective, xa)), own,
                             all_box, cfg.samples,
                             sub_seed(cfg.seed, "gate-conv")),
          "objective");
    for (const auto& c : f.constraints)
      merge(classify_convexity(simplify(substitute(c, xa)), own, all_box,
                               cfg.samples, sub_seed(cfg.seed, "gate-conv")),
            "constraint");
  }
  if (h.verdict == cq::Verdict::Holds)
    h.detail = "objectives and constraints convex-certified at x";
  return h;
}

HypothesisCheck slater_hypothesis(const SlmfgProblem& p,
                                  std::span<const double> x,
                                  const RunConfig& cfg) {
  HypothesisCheck h;
  h.name = "slater";
  h.verdict = cq::Verdict::Holds;
  for (const auto& f : p.followers) {
    auto rep =
        cq::check_slater(p, f.id, x, cfg.box_lo, cfg.box_hi, cfg.samples, cfg);
    if (rep.verdict == cq::Verdict::Fails) {
      h.verdict = cq::Verdict::Fails;
      h.detail = "follower " + f.id + ": " + rep.note;
      return h;
    }
    if (rep.verdict == cq::Verdict::Unknown && h.verdict == cq::Verdict::Holds) {
      h.verdict = cq::Verdict::Unknown;
      h.detail = "follower " + f.id + ": " + rep.note;
    }
  }
  if (h.verdict == cq::Verdict::Holds)
    h.detail = "strictly feasible witnesses found";
  return h;
}

// Product of the per-follower vertex lists, capped.
std::vector<std::vector<std::vector<double>>> vertex_profiles(
    const SlmfgProblem& p, std::span<const double> x, std::span<const double> y,
    const RunConfig& cfg, std::size_t cap = 64) {
  std::vector<std::vector<std::vector<double>>> per_follower;
  for (const auto& f : p.followers) {
    auto poly = multipliers::multiplier_polytope(p, f.id, x, y,
                                                 cfg.activity_tol, cfg.feas_tol);
    per_follower.push_back(multipliers::enumerate_vertices(poly, cfg));
  }
  std::vector<std::vector<std::vector<double>>> profiles;
  std::vector<std::size_t> idx(per_follower.size(), 0);
  while (profiles.size() < cap) {
    std::vector<std::vector<double>> prof;
    for (std::size_t f = 0; f < per_follower.size(); ++f)
      prof.push_back(per_follower[f][idx[f]]);
    profiles.push_back(std::move(prof));
    std::size_t i = per_follower.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++idx[i] < per_follower[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) break;
  }
  return profiles;
}

std::vector<double> flatten_profile(
    const std::vector<std::vector<double>>& prof) {
  std::vector<double> flat;
  for (const auto& l : prof) flat.insert(flat.end(), l.begin(), l.end());
  return flat;
}

void settle(TheoremGateReport& rep) {
  for (const auto& h : rep.hypotheses) {
    if (h.verdict == cq::Verdict::Fails) {
      rep.status = GateStatus::HypothesisFailed;
      rep.status_detail = h.name + ": " + h.detail;
      return;
    }
  }
  for (const auto& h : rep.hypotheses) {
    if (h.verdict == cq::Verdict::Unknown) {
      rep.status = GateStatus::HypothesisFailed;
      rep.status_detail = h.name + " (unverified): " + h.detail;
      return;
    }
  }
  if (rep.conclusion_tested && !rep.conclusion_holds) {
    rep.status = GateStatus::ConclusionRefuted;
    rep.status_detail =
        "all hypotheses hold yet the conclusion fails: " +
        rep.conclusion_detail;
  } else {
    rep.status = GateStatus::Transferred;
    rep.status_detail.clear();
  }
}

}  // namespace

TheoremGateReport gate_t21(const SlmfgProblem& p, std::span<const double> xy,
                           const RunConfig& cfg) {
  TheoremGateReport rep;
  rep.theorem = "T2.1";
  std::vector<double> x(xy.begin(), xy.begin() + p.leader.dim);

  HypothesisCheck local;
  local.name = "slmfg-local";
  try {
    auto v = is_local_min_slmfg(p, xy, cfg.radius, cfg.local_step(), cfg);
    local.verdict = v.better_found ? cq::Verdict::Fails : cq::Verdict::Holds;
    local.detail =
        v.better_found
            ? "better feasible neighbor, objective gap " +
                  format_double(v.objective_gap)
            : "no better neighbor found (" +
                  std::to_string(v.feasible_neighbors_tested) +
                  " feasible neighbors tested)";
  } catch (const InfeasibleBasePointError& e) {
    local.verdict = cq::Verdict::Fails;
    local.detail = e.what();
  }
  rep.hypotheses.push_back(local);
  rep.hypotheses.push_back(convexity_at_x(p, x, cfg));
  rep.hypotheses.push_back(slater_hypothesis(p, x, cfg));

  bool hyps_ok = true;
  for (const auto& h : rep.hypotheses)
    hyps_ok = hyps_ok && h.verdict == cq::Verdict::Holds;
  if (!hyps_ok) {
    settle(rep);
    return rep;
  }

  std::vector<double> y(xy.begin() + p.leader.dim, xy.end());
  std::vector<std::vector<std::vector<double>>> profiles;
  try {
    profiles = vertex_profiles(p, x, y, cfg);
  } catch (const multipliers::EmptyPolytopeError& e) {
    rep.conclusion_tested = true;
    rep.conclusion_holds = false;
    rep.conclusion_detail = std::string("no multiplier exists: ") + e.what();
    settle(rep);
    return rep;
  }

  auto m = mpcc::build_mpcc(p);
  rep.conclusion_tested = true;
  rep.conclusion_holds = true;
  for (const auto& prof : profiles) {
    auto flat = flatten_profile(prof);
    rep.multipliers_tested.push_back(flat);
    std::vector<double> point(xy.begin(), xy.end());
    point.insert(point.end(), flat.begin(), flat.end());
    auto v = is_local_min_mpcc(m, point, cfg.radius, cfg.local_step(), cfg);
    if (v.better_found) {
      rep.conclusion_holds = false;
      rep.failing_multiplier = flat;
      rep.conclusion_detail =
          "MPCC local minimality fails at vertex multiplier (" +
          record_vector(flat) + ")";
      break;
    }
  }
  if (rep.conclusion_holds)
    rep.conclusion_detail = "MPCC-local at every vertex multiplier (" +
                            std::to_string(profiles.size()) + " tested)";
  settle(rep);
  return rep;
}

TheoremGateReport gate_t22(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xyl, double box_lo,
                           double box_hi, double step, const RunConfig& cfg) {
  TheoremGateReport rep;
  rep.theorem = "T2.2";
  const int xydim = p.leader.dim + p.total_follower_dim();
  std::vector<double> xy(xyl.begin(), xyl.begin() + xydim);
  std::vector<double> y(xy.begin() + p.leader.dim, xy.end());

  Evaluator leader_obj(p.leader.objective, p.all_vars());
  const double base_val = leader_obj(xy);
  const bool separable = separable_objectives(p);
  auto xs = leader_box_grid(p, box_lo, box_hi, step);

  // (a) grid-global minimality of the point for the MPCC over the box.
  HypothesisCheck ha;
  ha.name = "mpcc-grid-global";
  if (!mpcc::is_mpcc_feasible(m, xyl, cfg.gap_tol)) {
    ha.verdict = cq::Verdict::Fails;
    ha.detail = "base point is not MPCC-feasible";
  } else if (!separable) {
    ha.verdict = cq::Verdict::Unknown;
    ha.detail = "coupled follower objectives: global grid scan skipped";
  } else {
    ha.verdict = cq::Verdict::Holds;
    ha.detail = "no MPCC-completable grid point improves the objective";
    for (const auto& xp : xs) {
      std::vector<std::vector<MpccCandidate>> lists;
      for (std::size_t fi = 0; fi < p.followers.size(); ++fi) {
        FollowerCtx ctx = make_ctx(p, fi, xp, y);
        auto pts = box_points(p.followers[fi].dim, box_lo, box_hi, step);
        lists.push_back(mpcc_candidates(ctx, pts, std::nullopt, cfg));
      }
      auto outcome = product_scan<MpccCandidate>(
          p, xp, lists, leader_obj, base_val, cfg.strict_improve,
          [](const MpccCandidate& c) -> const std::vector<double>& {
            return c.y;
          },
          [&](std::span<const double> full,
              const std::vector<const MpccCandidate*>&) {
            return std::vector<double>(full.begin(), full.end());
          });
      if (outcome.found) {
        ha.verdict = cq::Verdict::Fails;
        ha.detail = "MPCC-completable grid point (" +
                    record_vector(outcome.point) + ") has smaller objective " +
                    record_double(outcome.objective);
        break;
      }
    }
  }
  rep.hypotheses.push_back(ha);

  // (b) Slater and (c) convexity at every sampled leader-feasible x.
  HypothesisCheck hb;
  hb.name = "slater-on-sampled-x";
  hb.verdict = cq::Verdict::Holds;
  hb.detail = "Slater holds at every sampled x in X^L";
  HypothesisCheck hc;
  hc.name = "follower-convexity-on-sampled-x";
  hc.verdict = cq::Verdict::Holds;
  hc.detail = "convex-certified at every sampled x";
  for (const auto& xp : xs) {
    if (hb.verdict == cq::Verdict::Holds) {
      auto h = slater_hypothesis(p, xp, cfg);
      if (h.verdict != cq::Verdict::Holds) {
        hb.verdict = h.verdict;
        hb.detail = "at x = (" + record_vector(xp) + "): " + h.detail;
      }
    }
    if (hc.verdict == cq::Verdict::Holds) {
      auto h = convexity_at_x(p, xp, cfg);
      if (h.verdict != cq::Verdict::Holds) {
        hc.verdict = h.verdict;
        hc.detail = "at x = (" + record_vector(xp) + "): " + h.detail;
      }
    }
    if (hb.verdict != cq::Verdict::Holds && hc.verdict != cq::Verdict::Holds)
      break;
  }
  rep.hypotheses.push_back(hb);
  rep.hypotheses.push_back(hc);

  // Conclusion: grid-global minimality of (x, y) for the SLMFG over the box.
  rep.conclusion_tested = true;
  rep.conclusion_holds = true;
  rep.conclusion_detail = "no SLMFG-feasible grid point improves the objective";
  {
    SlaterCache cache;
    RunConfig probe = probe_config(cfg);
    for (const auto& xp : xs) {
      if (!rep.conclusion_holds) break;
      if (separable) {
        const auto& slater = slater_at(p, xp, cfg, cache);
        std::vector<std::vector<std::vector<double>>> lists;
        for (std::size_t fi = 0; fi < p.followers.size(); ++fi) {
          FollowerCtx ctx = make_ctx(p, fi, xp, y);
          auto pts = box_points(p.followers[fi].dim, box_lo, box_hi, step);
          lists.push_back(nash_candidates(ctx, pts, slater[fi], cfg));
        }
        auto outcome = product_scan<std::vector<double>>(
            p, xp, lists, leader_obj, base_val, cfg.strict_improve,
            [](const std::vector<double>& c) -> const std::vector<double>& {
              return c;
            },
            [&](std::span<const double> full,
                const std::vector<const std::vector<double>*>&) {
              return std::vector<double>(full.begin(), full.end());
            });
        if (outcome.found) {
          rep.conclusion_holds = false;
          rep.conclusion_detail = "SLMFG-feasible grid point (" +
                                  record_vector(outcome.point) +
                                  ") has smaller objective " +
                                  record_double(outcome.objective);
          break;
        }
      }
      nep::NepResult nr;
      try {
        nr = nep::solve_nep(p, xp, probe);
      } catch (const nep::InfeasibleFollowerError&) {
        continue;
      } catch (const nep::UnboundedError&) {
        continue;
      }
      for (const auto& eq : nr.equilibria) {
        std::vector<double> full(xp.begin(), xp.end());
        full.insert(full.end(), eq.y.begin(), eq.y.end());
        double v = leader_obj(full);
        if (v < base_val - cfg.strict_improve) {
          rep.conclusion_holds = false;
          rep.conclusion_detail = "equilibrium (" + record_vector(full) +
                                  ") has smaller objective " +
                                  record_double(v);
          break;
        }
      }
    }
  }
  settle(rep);
  return rep;
}

namespace {

TheoremGateReport local_transfer_gate(const SlmfgProblem& p,
                                      const mpcc::MpccProblem& m,
                                      std::span<const double> xy, double radius,
                                      int n_multiplier_samples, bool with_crcq,
                                      const RunConfig& cfg) {
  TheoremGateReport rep;
  rep.theorem = with_crcq ? "T2.4" : "T2.3";
  std::vector<double> x(xy.begin(), xy.begin() + p.leader.dim);
  std::vector<double> y(xy.begin() + p.leader.dim, xy.end());

  // Multiplier profiles first: an empty polytope is an error by contract.
  auto profiles = vertex_profiles(p, x, y, cfg);

  rep.hypotheses.push_back(convexity_at_x(p, x, cfg));
  rep.hypotheses.push_back(slater_hypothesis(p, x, cfg));

  if (with_crcq) {
    HypothesisCheck hcr;
    hcr.name = "crcq";
    hcr.verdict = cq::Verdict::Holds;
    hcr.detail =
        "all active-subset ranks constant across the sampled neighborhood";
    int off = p.leader.dim;
    for (const auto& f : p.followers) {
      std::vector<double> yf(xy.begin() + off, xy.begin() + off + f.dim);
      off += f.dim;
      auto cr = cq::check_crcq(p, f.id, x, yf, cfg.crcq_radius, cfg.samples,
                               sub_seed(cfg.seed, "gate-crcq"), cfg);
      if (cr.violation_found) {
        hcr.verdict = cq::Verdict::Fails;
        hcr.detail = "follower " + f.id + ": subset {";
        for (std::size_t i = 0; i < cr.violation.subset.size(); ++i)
          hcr.detail +=
              (i ? "," : "") + std::to_string(cr.violation.subset[i] + 1);
        hcr.detail += "} has rank " + std::to_string(cr.violation.rank1) +
                      " at the point and rank " +
                      std::to_string(cr.violation.rank2) + " nearby";
        break;
      }
    }
    rep.hypotheses.push_back(hcr);
  }

  HypothesisCheck hm;
  hm.name = with_crcq ? "mpcc-local-at-vertex-multipliers"
                      : "mpcc-local-for-all-multipliers";
  hm.verdict = cq::Verdict::Holds;

  std::vector<std::vector<double>> to_test;
  for (const auto& prof : profiles) to_test.push_back(flatten_profile(prof));
  if (!with_crcq && n_multiplier_samples > 0) {
    std::vector<std::vector<std::vector<double>>> sampled;
    for (const auto& f : p.followers) {
      auto poly = multipliers::multiplier_polytope(p, f.id, x, y,
                                                   cfg.activity_tol,
                                                   cfg.feas_tol);
      sampled.push_back(multipliers::sample_multipliers(
          poly, n_multiplier_samples, sub_seed(cfg.seed, "gate-lam-" + f.id),
          cfg));
    }
    for (int k = 0; k < n_multiplier_samples; ++k) {
      std::vector<double> flat;
      for (std::size_t f = 0; f < sampled.size(); ++f)
        flat.insert(flat.end(), sampled[f][k].begin(), sampled[f][k].end());
      to_test.push_back(std::move(flat));
    }
  }

  for (const auto& lam : to_test) {
    rep.multipliers_tested.push_back(lam);
    std::vector<double> point(xy.begin(), xy.end());
    point.insert(point.end(), lam.begin(), lam.end());
    auto v = is_local_min_mpcc(m, point, radius, cfg.local_step(), cfg);
    if (v.better_found) {
      hm.verdict = cq::Verdict::Fails;
      hm.detail = "multiplier (" + record_vector(lam) +
                  ") is not MPCC-locally optimal (better neighbor gap " +
                  format_double(v.objective_gap) + ")";
      rep.failing_multiplier = lam;
      break;
    }
  }
  if (hm.verdict == cq::Verdict::Holds)
    hm.detail = std::to_string(to_test.size()) +
                " multiplier profiles tested (" +
                std::to_string(profiles.size()) + " vertex profiles)";
  rep.hypotheses.push_back(hm);

  // Conclusion: SLMFG local minimality; recorded even when a hypothesis
  // failed, so reports can show both sides of the example.
  rep.conclusion_tested = true;
  try {
    auto v = is_local_min_slmfg(p, xy, radius, cfg.local_step(), cfg);
    rep.conclusion_holds = !v.better_found;
    rep.conclusion_detail =
        v.better_found
            ? "SLMFG better neighbor at (" + record_vector(v.better_point) +
                  "), objective gap " + format_double(v.objective_gap)
            : "no better SLMFG neighbor found";
  } catch (const InfeasibleBasePointError& e) {
    rep.conclusion_holds = false;
    rep.conclusion_detail = std::string("base not SLMFG-feasible: ") + e.what();
  }
  settle(rep);
  return rep;
}

}  // namespace

TheoremGateReport gate_t23(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xy, double radius,
                           int n_multiplier_samples, const RunConfig& cfg) {
  return local_transfer_gate(p, m, xy, radius, n_multiplier_samples, false,
                             cfg);
}

TheoremGateReport gate_t24(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xy, double radius,
                           const RunConfig& cfg) {
  return local_transfer_gate(p, m, xy, radius, 0, true, cfg);
}

std::vector<SequenceProbeStep> sequence_probe(
    const SlmfgProblem& p, const mpcc::MpccProblem& m,
    const std::vector<std::vector<double>>& xs, const RunConfig& cfg) {
  std::vector<SequenceProbeStep> steps;
  Evaluator leader_obj(p.leader.objective, p.all_vars());
  RunConfig probe = probe_config(cfg);
  for (const auto& x : xs) {
    SequenceProbeStep st;
    st.x = x;
    auto nr = nep::solve_nep(p, x, probe);
    if (nr.equilibria.empty())
      throw nep::InfeasibleFollowerError(
          "sequence_probe: no equilibrium found at x = (" + record_vector(x) +
          ")");
    st.y = nr.equilibria.front().y;
    for (const auto& f : p.followers) {
      auto poly = multipliers::multiplier_polytope(
          p, f.id, x, st.y, cfg.activity_tol, cfg.feas_tol);
      auto vertices = multipliers::enumerate_vertices(poly, cfg);
      st.multiplier_unique = st.multiplier_unique && vertices.size() == 1;
      st.lambda.insert(st.lambda.end(), vertices.front().begin(),
                       vertices.front().end());
    }
    std::vector<double> point(x.begin(), x.end());
    point.insert(point.end(), st.y.begin(), st.y.end());
    double obj = leader_obj(point);
    point.insert(point.end(), st.lambda.begin(), st.lambda.end());
    st.kkt_total = mpcc::kkt_residual(m, point).total();
    st.mpcc_feasible = mpcc::is_mpcc_feasible(m, point, cfg.gap_tol);
    st.leader_objective = obj;
    steps.push_back(std::move(st));
  }
  return steps;
}

}  // namespace slmfg::verify
