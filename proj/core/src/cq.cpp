#include "slmfg/cq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "slmfg/linalg.hpp"
#include "slmfg/multipliers.hpp"
#include "search.hpp"

namespace slmfg::cq {

namespace {

constexpr double kStrict = 1e-10;

Assignment leader_assignment(const SlmfgProblem& p, std::span<const double> x) {
  Assignment a;
  auto lv = p.leader.vars();
  for (std::size_t i = 0; i < lv.size(); ++i) a[lv[i]] = x[i];
  return a;
}

std::vector<std::vector<double>> search_starts(std::span<const double> lo,
                                               std::span<const double> hi,
                                               int count, std::uint64_t seed) {
  const std::size_t n = lo.size();
  std::vector<std::vector<double>> starts;
  std::vector<double> center(n), zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
  starts.push_back(center);
  starts.push_back(zero);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < count; ++s) {
    std::vector<double> pt(n);
    for (std::size_t i = 0; i < n; ++i) pt[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    starts.push_back(std::move(pt));
  }
  return starts;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

SlaterReport check_slater(const SlmfgProblem& p, const std::string& follower,
                          std::span<const double> x, double box_lo,
                          double box_hi, int samples, const RunConfig& cfg) {
  const FollowerProblem& f = p.follower(follower);
  SlaterReport rep;
  rep.follower = follower;
  rep.x.assign(x.begin(), x.end());

  auto own = f.vars();
  const std::size_t n = own.size();

  if (f.constraints.empty()) {
    rep.verdict = Verdict::Holds;
    rep.witness.assign(n, 0.0);
    rep.max_constraint_value = -std::numeric_limits<double>::infinity();
    rep.note = "no constraints; Y^f(x) is the whole space";
    return rep;
  }

  // Constraints at this x, as functions of the follower's own block.
  Assignment xa = leader_assignment(p, x);
  std::vector<Expr> gs;
  gs.reserve(f.constraints.size());
  for (const auto& c : f.constraints) gs.push_back(simplify(substitute(c, xa)));

  bool convex_certified = true;
  Box box = Box::uniform(own, box_lo, box_hi);
  for (const auto& g : gs) {
    auto verdict = classify_convexity(g, own, box, std::max(samples, 1),
                                      sub_seed(cfg.seed, "slater-convexity"));
    if (!verdict.certified()) convex_certified = false;
  }

  std::vector<Evaluator> evals;
  evals.reserve(gs.size());
  for (const auto& g : gs) evals.emplace_back(g, own);
  auto maxg = [&](std::span<const double> y) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& e : evals) m = std::max(m, e(y));
    return m;
  };

  std::vector<double> lo(n, box_lo), hi(n, box_hi);
  auto starts =
      search_starts(lo, hi, std::max(samples, 4), sub_seed(cfg.seed, "slater"));
  auto best = detail::compass_minimize(maxg, lo, hi, starts);

  rep.witness = best.point;
  rep.max_constraint_value = best.value;

  if (best.value < -kStrict) {
    rep.verdict = Verdict::Holds;
    rep.note = "strictly feasible witness found";
    return rep;
  }
  if (!convex_certified) {
    rep.verdict = Verdict::Unknown;
    rep.note = "constraints not convex-certified; cannot certify failure";
    return rep;
  }

  // First-order certificate at the located minimax point: zero in the convex
  // hull of the near-active gradients makes the sampled minimum global (the
  // max of convex functions is convex), so min >= 0 rules Slater out.
  double slack = std::max(1e-7, 1e-7 * std::abs(best.value));
  std::vector<int> near_active;
  for (std::size_t j = 0; j < gs.size(); ++j)
    if (evals[j](best.point) >= best.value - slack)
      near_active.push_back(static_cast<int>(j));

  Eigen::MatrixXd cols(n, near_active.size());
  Assignment at;
  for (std::size_t i = 0; i < n; ++i) at[own[i]] = best.point[i];
  for (std::size_t c = 0; c < near_active.size(); ++c) {
    auto gg = grad(gs[near_active[c]], own);
    for (std::size_t r = 0; r < n; ++r)
      cols(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          eval(gg[r], at);
  }
  linalg::Tolerances lt;
  lt.rank_rel = cfg.rank_tol;
  lt.sign = 1e-9;
  lt.residual = 1e-6;
  if (linalg::zero_in_convex_hull(cols, lt)) {
    rep.verdict = Verdict::Fails;
    rep.note = best.value > cfg.feas_tol
                   ? "feasible set is empty (min of max g = " +
                         format_double(best.value) + " > 0)"
                   : "no strictly feasible point (min of max g = " +
                         format_double(best.value) + " >= 0, first-order "
                         "certified)";
    return rep;
  }
  rep.verdict = Verdict::Unknown;
  rep.note = "minimax point lacks a first-order certificate";
  return rep;
}

CrcqReport check_crcq(const SlmfgProblem& p, const std::string& follower,
                      std::span<const double> x, std::span<const double> y_f,
                      double radius, int samples, std::uint64_t seed,
                      const RunConfig& cfg) {
  const FollowerProblem& f = p.follower(follower);
  CrcqReport rep;
  rep.follower = follower;
  rep.x.assign(x.begin(), x.end());
  rep.y.assign(y_f.begin(), y_f.end());
  rep.samples = samples;
  rep.radius = radius;

  auto own = f.vars();
  auto lv = p.leader.vars();
  Assignment base = leader_assignment(p, x);
  for (std::size_t i = 0; i < own.size(); ++i) base[own[i]] = y_f[i];

  for (std::size_t j = 0; j < f.constraints.size(); ++j) {
    double gj = eval(f.constraints[j], base);
    if (gj > cfg.feas_tol)
      throw multipliers::InfeasiblePointError(
          "check_crcq: constraint " + std::to_string(j + 1) + " violated (g=" +
          format_double(gj) + ")");
    if (std::abs(gj) <= cfg.activity_tol)
      rep.active.push_back(static_cast<int>(j));
  }

  // Symbolic gradients of every constraint, evaluated at perturbed points.
  std::vector<std::vector<Expr>> grads;
  for (const auto& c : f.constraints) grads.push_back(grad(c, own));

  auto rank_of_subset = [&](const std::vector<int>& subset,
                            const Assignment& at) {
    Eigen::MatrixXd m(own.size(), subset.size());
    for (std::size_t c = 0; c < subset.size(); ++c)
      for (std::size_t r = 0; r < own.size(); ++r)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            eval(grads[subset[c]][r], at);
    return linalg::numerical_rank(m, cfg.rank_tol);
  };

  // Neighborhood draws in the joint (x, y^f) space.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Assignment> draws;
  std::vector<std::vector<double>> draw_points;
  draws.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    Assignment a = base;
    std::vector<double> pt;
    for (const auto& v : lv) {
      a[v] = base[v] + radius * unit(rng);
      pt.push_back(a[v]);
    }
    for (const auto& v : own) {
      a[v] = base[v] + radius * unit(rng);
      pt.push_back(a[v]);
    }
    draws.push_back(std::move(a));
    draw_points.push_back(std::move(pt));
  }

  // All nonempty subsets of the active set, in mask order.
  const std::size_t na = rep.active.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << na); ++mask) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < na; ++i)
      if (mask & (std::size_t{1} << i)) subset.push_back(rep.active[i]);

    SubsetRank sr;
    sr.subset = subset;
    sr.rank_at_point = rank_of_subset(subset, base);
    sr.sampled_min_rank = sr.rank_at_point;
    sr.sampled_max_rank = sr.rank_at_point;

    for (int s = 0; s < samples; ++s) {
      int rk = rank_of_subset(subset, draws[s]);
      sr.sampled_min_rank = std::min(sr.sampled_min_rank, rk);
      sr.sampled_max_rank = std::max(sr.sampled_max_rank, rk);
      if (rk != sr.rank_at_point && !rep.violation_found) {
        rep.violation_found = true;
        rep.violation.subset = subset;
        rep.violation.rank1 = sr.rank_at_point;
        rep.violation.rank2 = rk;
        rep.violation.point1.assign(x.begin(), x.end());
        rep.violation.point1.insert(rep.violation.point1.end(), y_f.begin(),
                                    y_f.end());
        rep.violation.point2 = draw_points[s];
      }
    }
    rep.subset_ranks.push_back(std::move(sr));
  }
  return rep;
}

SvenssonReport check_svensson(const SlmfgProblem& p, double box_lo,
                              double box_hi, int samples,
                              const RunConfig& cfg) {
  SvenssonReport rep;
  for (const auto& f : p.followers) {
    SvenssonConditions c;
    c.follower = f.id;

    auto own = f.vars();
    Box all_box = Box::uniform(p.all_vars(), box_lo, box_hi);

    // (a) objective convex in the own block.
    auto va = classify_convexity(f.objective, own, all_box, samples,
                                 sub_seed(cfg.seed, "svensson-a-" + f.id));
    c.objective_convex = va.certified() ? Verdict::Holds
                         : va.kind == ConvexityVerdict::Kind::NonconvexWitness
                             ? Verdict::Fails
                             : Verdict::Unknown;

    if (f.constraints.empty()) {
      c.joint_max_convex = Verdict::Holds;
      c.strict_pair_exists = Verdict::Holds;
      c.note = "no constraints; joint conditions hold vacuously";
      rep.followers.push_back(std::move(c));
      continue;
    }

    // Joint variables (x, y^f).
    std::vector<VarId> joint = p.leader.vars();
    joint.insert(joint.end(), own.begin(), own.end());
    Box joint_box = Box::uniform(joint, box_lo, box_hi);

    // (b) joint convexity of max_j g_j: per-piece certification when every
    // piece has a constant PSD Hessian; otherwise a sampled midpoint test on
    // the max itself.
    bool all_pieces_certified = true;
    for (const auto& g : f.constraints) {
      auto vb = classify_convexity(g, joint, joint_box, samples,
                                   sub_seed(cfg.seed, "svensson-b-" + f.id));
      if (!(vb.certified() && vb.exact)) all_pieces_certified = false;
    }
    std::vector<Evaluator> evals;
    for (const auto& g : f.constraints) evals.emplace_back(g, joint);
    auto maxg = [&](std::span<const double> pt) {
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& e : evals) m = std::max(m, e(pt));
      return m;
    };

    if (all_pieces_certified) {
      c.joint_max_convex = Verdict::Holds;
    } else {
      std::mt19937_64 rng(sub_seed(cfg.seed, "svensson-mid-" + f.id));
      std::uniform_real_distribution<double> unit(box_lo, box_hi);
      c.joint_max_convex = Verdict::Unknown;
      std::vector<double> u(joint.size()), v(joint.size()), mid(joint.size());
      for (int s = 0; s < std::max(samples, 1) * 4; ++s) {
        for (std::size_t i = 0; i < joint.size(); ++i) {
          u[i] = unit(rng);
          v[i] = unit(rng);
          mid[i] = 0.5 * (u[i] + v[i]);
        }
        if (maxg(mid) > 0.5 * (maxg(u) + maxg(v)) + kStrict) {
          c.joint_max_convex = Verdict::Fails;
          c.midpoint_u = u;
          c.midpoint_v = v;
          break;
        }
      }
    }

    // (c) a strictly feasible (x, y^f) pair, found by search.
    std::vector<double> lo(joint.size(), box_lo), hi(joint.size(), box_hi);
    auto starts = search_starts(lo, hi, std::max(samples, 4),
                                sub_seed(cfg.seed, "svensson-c-" + f.id));
    auto best = detail::compass_minimize(maxg, lo, hi, starts);
    if (best.value < -kStrict) {
      c.strict_pair_exists = Verdict::Holds;
      c.strict_pair = best.point;
    } else {
      c.strict_pair_exists = Verdict::Unknown;
    }

    rep.followers.push_back(std::move(c));
  }
  return rep;
}

}  // namespace slmfg::cq
