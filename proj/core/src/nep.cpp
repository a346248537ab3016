#include "slmfg/nep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "slmfg/linalg.hpp"
#include "search.hpp"

namespace slmfg::nep {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr double kTieTol = 1e-9;

// A follower's problem specialised at fixed (x, y^{-f}): expressions over the
// follower's own block only, with evaluators and symbolic derivatives.
struct OwnProblem {
  std::vector<VarId> own;
  Expr objective;
  std::vector<Expr> constraints;
  Evaluator obj_ev;
  std::vector<Evaluator> con_ev;
  std::vector<Evaluator> obj_grad_ev;            // n
  std::vector<Evaluator> obj_hess_ev;            // n*n row-major
  std::vector<std::vector<Evaluator>> con_grad_ev;  // [j][n]
  std::vector<std::vector<Evaluator>> con_hess_ev;  // [j][n*n]
  bool objective_constant = false;

  std::size_t n() const { return own.size(); }
  std::size_t p() const { return constraints.size(); }

  double g_max(std::span<const double> y) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& e : con_ev) m = std::max(m, e(y));
    return m;
  }
  bool feasible(std::span<const double> y, double tol) const {
    for (const auto& e : con_ev)
      if (e(y) > tol) return false;
    return true;
  }
  Eigen::VectorXd obj_grad(std::span<const double> y) const {
    Eigen::VectorXd g(n());
    for (std::size_t i = 0; i < n(); ++i) g[i] = obj_grad_ev[i](y);
    return g;
  }
  Eigen::MatrixXd obj_hess(std::span<const double> y) const {
    Eigen::MatrixXd h(n(), n());
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = 0; j < n(); ++j) h(i, j) = obj_hess_ev[i * n() + j](y);
    return h;
  }
  Eigen::VectorXd con_grad(int j, std::span<const double> y) const {
    Eigen::VectorXd g(n());
    for (std::size_t i = 0; i < n(); ++i) g[i] = con_grad_ev[j][i](y);
    return g;
  }
  Eigen::MatrixXd con_hess(int j, std::span<const double> y) const {
    Eigen::MatrixXd h(n(), n());
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t k = 0; k < n(); ++k)
        h(i, k) = con_hess_ev[j][i * n() + k](y);
    return h;
  }
};

OwnProblem make_own_problem(const SlmfgProblem& p, const FollowerProblem& f,
                            std::span<const double> x,
                            std::span<const double> y_full) {
  Assignment fixed;
  auto lv = p.leader.vars();
  for (std::size_t i = 0; i < lv.size(); ++i) fixed[lv[i]] = x[i];
  int off = 0;
  for (const auto& g : p.followers) {
    if (g.id != f.id) {
      for (int i = 0; i < g.dim; ++i) {
        double v = off + i < static_cast<int>(y_full.size()) ? y_full[off + i]
                                                             : 0.0;
        fixed[{g.block(), i}] = v;
      }
    }
    off += g.dim;
  }

  OwnProblem op;
  op.own = f.vars();
  op.objective = simplify(substitute(f.objective, fixed));
  for (const auto& c : f.constraints)
    op.constraints.push_back(simplify(substitute(c, fixed)));

  op.obj_ev = Evaluator(op.objective, op.own);
  for (const auto& c : op.constraints) op.con_ev.emplace_back(c, op.own);

  auto og = grad(op.objective, op.own);
  op.objective_constant = true;
  for (const auto& g : og) {
    double v = 0.0;
    if (!(is_constant(g, &v) && v == 0.0)) op.objective_constant = false;
    op.obj_grad_ev.emplace_back(g, op.own);
  }
  auto oh = hessian(op.objective, op.own);
  for (const auto& row : oh)
    for (const auto& e : row) op.obj_hess_ev.emplace_back(e, op.own);

  for (const auto& c : op.constraints) {
    auto cg = grad(c, op.own);
    std::vector<Evaluator> cge;
    for (const auto& e : cg) cge.emplace_back(e, op.own);
    op.con_grad_ev.push_back(std::move(cge));
    auto ch = hessian(c, op.own);
    std::vector<Evaluator> che;
    for (const auto& row : ch)
      for (const auto& e : row) che.emplace_back(e, op.own);
    op.con_hess_ev.push_back(std::move(che));
  }
  return op;
}

// Damped Newton on the active-set KKT system
//   grad f(y) + sum_{j in S} lam_j grad g_j(y) = 0,   g_j(y) = 0 (j in S).
struct NewtonOut {
  bool ok = false;
  Eigen::VectorXd y;
  Eigen::VectorXd lam;  // aligned with S
};

NewtonOut newton_kkt(const OwnProblem& op, const std::vector<int>& s,
                     std::span<const double> y0) {
  const std::size_t n = op.n(), k = s.size(), m = n + k;
  Eigen::VectorXd z(m);
  for (std::size_t i = 0; i < n; ++i) z[i] = y0[i];
  for (std::size_t i = 0; i < k; ++i) z[n + i] = 1.0;

  std::vector<double> ybuf(n);
  auto residual = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i) ybuf[i] = zz[i];
    Eigen::VectorXd st = op.obj_grad(ybuf);
    for (std::size_t j = 0; j < k; ++j)
      st += zz[n + j] * op.con_grad(s[j], ybuf);
    r.resize(m);
    r.head(n) = st;
    for (std::size_t j = 0; j < k; ++j) r[n + j] = op.con_ev[s[j]](ybuf);
  };

  Eigen::VectorXd r;
  residual(z, r);
  for (int iter = 0; iter < 80; ++iter) {
    double rn = r.cwiseAbs().maxCoeff();
    if (rn <= kNewtonTol) break;

    for (std::size_t i = 0; i < n; ++i) ybuf[i] = z[i];
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd hl = op.obj_hess(ybuf);
    for (std::size_t j = 0; j < k; ++j) hl += z[n + j] * op.con_hess(s[j], ybuf);
    jac.topLeftCorner(n, n) = hl;
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::VectorXd gj = op.con_grad(s[j], ybuf);
      jac.block(0, n + j, n, 1) = gj;
      jac.block(n + j, 0, 1, n) = gj.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rank() < static_cast<Eigen::Index>(m)) return {};
    Eigen::VectorXd dz = lu.solve(-r);
    if (!dz.allFinite()) return {};

    double alpha = 1.0;
    Eigen::VectorXd rtrial;
    bool stepped = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd zt = z + alpha * dz;
      residual(zt, rtrial);
      if (rtrial.cwiseAbs().maxCoeff() < (1.0 - 1e-4 * alpha) * rn) {
        z = zt;
        r = rtrial;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) return {};
  }
  if (r.cwiseAbs().maxCoeff() > 1e-10) return {};
  NewtonOut out;
  out.ok = true;
  out.y = z.head(n);
  out.lam = z.tail(k);
  return out;
}

std::vector<std::vector<double>> multistart_points(std::size_t n, double lo,
                                                   double hi, int count,
                                                   std::uint64_t seed) {
  std::vector<std::vector<double>> pts;
  pts.emplace_back(n, 0.0);
  pts.emplace_back(n, 0.5 * (lo + hi));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    std::vector<double> p(n);
    for (auto& v : p) v = lo + (hi - lo) * unit(rng);
    pts.push_back(std::move(p));
  }
  return pts;
}

double dist_inf(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Feasible grid points of the own block; empty result means none.
std::vector<std::vector<double>> feasible_grid(const OwnProblem& op, double lo,
                                               double hi, double step,
                                               double feas_tol) {
  std::vector<std::vector<double>> out;
  std::vector<double> los(op.n(), lo), his(op.n(), hi);
  detail::for_each_grid_point(los, his, step, [&](std::span<const double> y) {
    if (op.feasible(y, feas_tol))
      out.emplace_back(y.begin(), y.end());
  });
  return out;
}

double nnls_kkt_residual(const OwnProblem& op, std::span<const double> y,
                         const RunConfig& cfg) {
  std::vector<int> active;
  for (std::size_t j = 0; j < op.p(); ++j)
    if (std::abs(op.con_ev[j](y)) <= cfg.activity_tol)
      active.push_back(static_cast<int>(j));
  Eigen::MatrixXd a(op.n(), active.size());
  for (std::size_t c = 0; c < active.size(); ++c)
    a.col(c) = op.con_grad(active[c], y);
  linalg::Tolerances t;
  t.rank_rel = cfg.rank_tol;
  t.sign = cfg.sign_tol;
  return linalg::nonneg_min_residual_inf(a, op.obj_grad(y), t);
}

}  // namespace

std::vector<BrCandidate> best_response(const SlmfgProblem& p,
                                       const std::string& follower,
                                       std::span<const double> x,
                                       std::span<const double> y_minus,
                                       const RunConfig& cfg) {
  const FollowerProblem& f = p.follower(follower);
  OwnProblem op = make_own_problem(p, f, x, y_minus);
  const std::size_t n = op.n();
  const double lo = cfg.box_lo, hi = cfg.box_hi;
  // Backstop grid; coarse is enough, it only seeds and sanity-checks.
  const double coarse = std::max(cfg.grid_step, (hi - lo) / 60.0);

  auto fgrid = feasible_grid(op, lo, hi, coarse, cfg.feas_tol);

  std::vector<double> feas_point;
  if (!fgrid.empty()) {
    feas_point = fgrid.front();
  } else {
    // No feasible grid point: search for one before declaring infeasibility.
    std::vector<double> los(n, lo), his(n, hi);
    auto starts = multistart_points(n, lo, hi, cfg.multistart,
                                    sub_seed(cfg.seed, "br-feas"));
    auto r = detail::compass_minimize(
        [&](std::span<const double> y) { return op.g_max(y); }, los, his,
        starts);
    if (r.value > cfg.feas_tol)
      throw InfeasibleFollowerError("follower " + follower +
                                    ": no feasible point found in the search "
                                    "box (min of max g = " +
                                    format_double(r.value) + ")");
    feas_point = r.point;
  }

  if (op.objective_constant) {
    // Every feasible point is optimal; return spread representatives.
    std::vector<std::vector<double>> reps;
    if (fgrid.empty()) {
      reps.push_back(feas_point);
    } else {
      std::size_t stride = std::max<std::size_t>(
          1, fgrid.size() / std::max(1, cfg.multistart));
      for (std::size_t i = 0; i < fgrid.size(); i += stride)
        reps.push_back(fgrid[i]);
    }
    std::vector<BrCandidate> out;
    for (auto& r : reps) {
      BrCandidate c;
      c.objective = op.obj_ev(r);
      c.y = std::move(r);
      c.kkt_residual = 0.0;
      out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return lex_less(a.y, b.y); });
    return out;
  }

  // Grid argmin as the backstop reference.
  double grid_best = std::numeric_limits<double>::infinity();
  std::vector<double> grid_argmin = feas_point;
  for (const auto& y : fgrid) {
    double v = op.obj_ev(y);
    if (v < grid_best) {
      grid_best = v;
      grid_argmin = y;
    }
  }
  if (fgrid.empty()) grid_best = op.obj_ev(feas_point);

  // KKT route: every active subset, multistart damped Newton.
  std::vector<BrCandidate> kkt;
  auto starts = multistart_points(n, lo, hi, cfg.multistart,
                                  sub_seed(cfg.seed, "br-newton"));
  starts.push_back(grid_argmin);
  std::vector<std::vector<int>> subsets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << op.p()); ++mask) {
    std::vector<int> s;
    for (std::size_t j = 0; j < op.p(); ++j)
      if (mask & (std::size_t{1} << j)) s.push_back(static_cast<int>(j));
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  for (const auto& s : subsets) {
    for (const auto& y0 : starts) {
      auto r = newton_kkt(op, s, y0);
      if (!r.ok) continue;
      if (r.lam.size() && r.lam.minCoeff() < -cfg.sign_tol) continue;
      std::vector<double> y(r.y.data(), r.y.data() + n);
      bool inactive_ok = true;
      for (std::size_t j = 0; j < op.p(); ++j) {
        bool in_s = std::find(s.begin(), s.end(), static_cast<int>(j)) != s.end();
        if (!in_s && op.con_ev[j](y) > cfg.feas_tol) inactive_ok = false;
      }
      if (!inactive_ok) continue;
      bool in_box = true;
      for (double v : y) in_box = in_box && v >= 2 * lo && v <= 2 * hi;
      if (!in_box || !r.y.allFinite()) continue;

      bool dup = false;
      for (const auto& c : kkt) dup = dup || dist_inf(c.y, y) <= cfg.cluster_eps;
      if (dup) continue;
      BrCandidate c;
      c.y = std::move(y);
      c.objective = op.obj_ev(c.y);
      c.kkt_residual = nnls_kkt_residual(op, c.y, cfg);
      kkt.push_back(std::move(c));
    }
  }

  double kkt_best = std::numeric_limits<double>::infinity();
  for (const auto& c : kkt) kkt_best = std::min(kkt_best, c.objective);

  const double scale = 1.0 + std::abs(grid_best);
  const bool kkt_trustworthy = !kkt.empty() && kkt_best <= grid_best + 1e-7 * scale;

  // Unboundedness probe: descending off the box edge without any constraint
  // holding the iterate back.
  if (!kkt_trustworthy) {
    bool on_edge = false;
    for (std::size_t i = 0; i < n; ++i)
      on_edge = on_edge || std::abs(grid_argmin[i] - lo) < coarse / 2 ||
                std::abs(grid_argmin[i] - hi) < coarse / 2;
    bool any_active = false;
    for (std::size_t j = 0; j < op.p(); ++j)
      any_active =
          any_active || op.con_ev[j](grid_argmin) > -cfg.activity_tol;
    if (on_edge && !any_active && !fgrid.empty()) {
      double ext_best = grid_best;
      std::vector<double> los(n, 2 * lo), his(n, 2 * hi);
      detail::for_each_grid_point(los, his, coarse,
                                  [&](std::span<const double> y) {
                                    if (op.feasible(y, cfg.feas_tol))
                                      ext_best = std::min(ext_best, op.obj_ev(y));
                                  });
      if (ext_best < grid_best - cfg.unbounded_margin)
        throw UnboundedError(
            "follower " + follower +
            ": objective keeps decreasing beyond the search box with no "
            "active constraint (heuristic verdict)");
    }
  }

  std::vector<BrCandidate> out;
  if (kkt_trustworthy) {
    for (auto& c : kkt)
      if (c.objective <= kkt_best + kTieTol) out.push_back(std::move(c));
  } else {
    // Grid-certified route (covers KKT-free optima, e.g. Slater failures):
    // exact-penalty refinement of the grid argmin.
    const double w = 1e9;
    auto penalised = [&](std::span<const double> y) {
      return op.obj_ev(y) + w * std::max(0.0, op.g_max(y));
    };
    std::vector<double> los(n, lo), his(n, hi);
    auto r = detail::compass_minimize(penalised, los, his, {grid_argmin});
    BrCandidate c;
    c.y = op.feasible(r.point, cfg.feas_tol) ? r.point : grid_argmin;
    c.objective = op.obj_ev(c.y);
    c.kkt_residual = nnls_kkt_residual(op, c.y, cfg);
    c.grid_certified = true;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return lex_less(a.y, b.y); });
  return out;
}

NashVerdict is_nash_equilibrium_with_slater(
    const SlmfgProblem& p, std::span<const double> x, std::span<const double> y,
    double tol, const RunConfig& cfg, std::span<const cq::Verdict> slater) {
  NashVerdict v;
  v.certificate.y.assign(y.begin(), y.end());

  int off = 0;
  double max_resid = 0.0;
  for (std::size_t fi = 0; fi < p.followers.size(); ++fi) {
    const auto& f = p.followers[fi];
    OwnProblem op = make_own_problem(p, f, x, y);
    std::vector<double> own(y.begin() + off, y.begin() + off + f.dim);
    off += f.dim;

    if (!op.feasible(own, cfg.feas_tol)) {
      v.feasible = false;
      v.is_equilibrium = false;
      v.note = "follower " + f.id + " infeasible at the point";
      return v;
    }

    // Best-response gap against the verification grid.
    double own_val = op.obj_ev(own);
    double grid_min = own_val;
    std::vector<double> los(op.n(), cfg.box_lo), his(op.n(), cfg.box_hi);
    detail::for_each_grid_point(los, his, cfg.grid_step,
                                [&](std::span<const double> yy) {
                                  if (op.feasible(yy, cfg.feas_tol))
                                    grid_min = std::min(grid_min, op.obj_ev(yy));
                                });
    double gap = std::max(0.0, own_val - grid_min);
    v.certificate.br_gaps.push_back(gap);

    double resid = nnls_kkt_residual(op, own, cfg);
    max_resid = std::max(max_resid, resid);

    bool gap_ok = gap <= tol;
    bool kkt_ok = slater[fi] != cq::Verdict::Holds || resid <= tol;
    if (!(gap_ok && kkt_ok)) {
      v.feasible = true;
      v.is_equilibrium = false;
      v.certificate.kkt_residual = max_resid;
      v.note = "follower " + f.id +
               (gap_ok ? " fails the KKT residual test" : " has a positive "
                                                          "best-response gap");
      return v;
    }
  }
  v.feasible = true;
  v.is_equilibrium = true;
  v.certificate.kkt_residual = max_resid;
  return v;
}

NashVerdict is_nash_equilibrium(const SlmfgProblem& p, std::span<const double> x,
                                std::span<const double> y, double tol,
                                const RunConfig& cfg) {
  std::vector<cq::Verdict> slater;
  for (const auto& f : p.followers)
    slater.push_back(cq::check_slater(p, f.id, x, cfg.box_lo, cfg.box_hi,
                                      cfg.samples, cfg)
                         .verdict);
  return is_nash_equilibrium_with_slater(p, x, y, tol, cfg, slater);
}

NepResult solve_nep(const SlmfgProblem& p, std::span<const double> x,
                    const RunConfig& cfg) {
  NepResult res;
  const int total = p.total_follower_dim();

  std::vector<cq::Verdict> slater;
  for (const auto& f : p.followers)
    slater.push_back(cq::check_slater(p, f.id, x, cfg.box_lo, cfg.box_hi,
                                      cfg.samples, cfg)
                         .verdict);

  auto starts = multistart_points(total, cfg.box_lo, cfg.box_hi,
                                  cfg.multistart, sub_seed(cfg.seed, "nep"));
  std::vector<std::vector<double>> converged;

  for (const auto& start : starts) {
    std::vector<double> y = start;
    bool ok = false;
    for (int iter = 0; iter < cfg.max_br_iterations; ++iter) {
      std::vector<double> next = y;
      int off = 0;
      for (const auto& f : p.followers) {
        auto cands = best_response(p, f.id, x, y, cfg);
        // Nearest candidate keeps the iteration stable on solution continua.
        const BrCandidate* pick = &cands.front();
        double bestd = std::numeric_limits<double>::infinity();
        for (const auto& c : cands) {
          double d = dist_inf(c.y, std::span<const double>(y).subspan(off, f.dim));
          if (d < bestd) {
            bestd = d;
            pick = &c;
          }
        }
        std::copy(pick->y.begin(), pick->y.end(), next.begin() + off);
        off += f.dim;
      }
      double delta = dist_inf(next, y);
      y = std::move(next);
      if (delta <= 1e-10) {
        ok = true;
        break;
      }
    }
    if (ok) converged.push_back(std::move(y));
  }

  std::vector<EquilibriumCertificate> kept;
  for (const auto& y : converged) {
    auto verdict =
        is_nash_equilibrium_with_slater(p, x, y, cfg.gap_tol, cfg, slater);
    if (verdict.is_equilibrium) kept.push_back(verdict.certificate);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return lex_less(a.y, b.y); });
  for (const auto& c : kept) {
    bool dup = false;
    for (const auto& e : res.equilibria)
      dup = dup || dist_inf(e.y, c.y) <= cfg.cluster_eps;
    if (!dup) res.equilibria.push_back(c);
  }
  res.continuum_suspected =
      static_cast<int>(res.equilibria.size()) >= cfg.continuum_count;
  res.no_equilibrium_found = res.equilibria.empty();
  return res;
}

namespace {

// True when no cross-follower variable enters f's objective nonlinearly,
// i.e. the own-block argmin is independent of the opponents.
bool objective_separable(const SlmfgProblem& p, const FollowerProblem& f) {
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

}  // namespace

std::vector<GridEquilibrium> brute_force_nep(const SlmfgProblem& p,
                                             std::span<const double> x,
                                             const GridSpec& grid,
                                             const RunConfig& cfg) {
  std::vector<GridEquilibrium> out;
  bool separable = true;
  for (const auto& f : p.followers)
    separable = separable && objective_separable(p, f);

  std::vector<double> zeros(p.total_follower_dim(), 0.0);

  if (separable) {
    // Per-follower argmin sets; the equilibrium set is their product.
    std::vector<std::vector<std::vector<double>>> argmins;
    std::vector<std::vector<bool>> artifacts;
    for (const auto& f : p.followers) {
      OwnProblem op = make_own_problem(p, f, x, zeros);
      auto fg = feasible_grid(op, grid.lo, grid.hi, grid.step, cfg.feas_tol);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : fg) best = std::min(best, op.obj_ev(y));
      std::vector<std::vector<double>> am;
      std::vector<bool> art;
      for (const auto& y : fg) {
        if (op.obj_ev(y) > best + kTieTol) continue;
        bool edge = false;
        for (double v : y)
          edge = edge || std::abs(v - grid.lo) < grid.step / 2 ||
                 std::abs(v - grid.hi) < grid.step / 2;
        bool active = false;
        for (std::size_t j = 0; j < op.p(); ++j)
          active = active || op.con_ev[j](y) > -cfg.activity_tol;
        bool varies = false;
        for (std::size_t i = 0; i < op.n(); ++i) {
          std::vector<double> probe = y;
          probe[i] += grid.step;
          varies = varies || std::abs(op.obj_ev(probe) - op.obj_ev(y)) > 1e-12;
        }
        art.push_back(edge && !active && varies);
        am.push_back(y);
      }
      argmins.push_back(std::move(am));
      artifacts.push_back(std::move(art));
    }
    std::size_t count = 1;
    for (const auto& am : argmins) {
      if (am.empty()) return {};
      count *= am.size();
      if (count > 200000)
        throw ValidationError("brute_force_nep: grid equilibrium set too large");
    }
    std::vector<std::size_t> idx(argmins.size(), 0);
    while (true) {
      GridEquilibrium ge;
      for (std::size_t f = 0; f < argmins.size(); ++f) {
        const auto& y = argmins[f][idx[f]];
        ge.y.insert(ge.y.end(), y.begin(), y.end());
        ge.boundary_artifact = ge.boundary_artifact || artifacts[f][idx[f]];
      }
      out.push_back(std::move(ge));
      std::size_t i = argmins.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < argmins[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  } else {
    // Coupled objectives: enumerate full profiles under a size guard.
    std::vector<std::vector<std::vector<double>>> grids;
    std::size_t count = 1;
    for (const auto& f : p.followers) {
      OwnProblem op = make_own_problem(p, f, x, zeros);
      auto fg = feasible_grid(op, grid.lo, grid.hi, grid.step, cfg.feas_tol);
      if (fg.empty()) return {};
      count *= fg.size();
      if (count > 2000000)
        throw ValidationError("brute_force_nep: coupled profile grid too large");
      grids.push_back(std::move(fg));
    }
    std::vector<std::size_t> idx(grids.size(), 0);
    while (true) {
      std::vector<double> profile;
      for (std::size_t f = 0; f < grids.size(); ++f)
        profile.insert(profile.end(), grids[f][idx[f]].begin(),
                       grids[f][idx[f]].end());
      bool eq = true;
      int off = 0;
      for (std::size_t f = 0; f < p.followers.size() && eq; ++f) {
        OwnProblem op = make_own_problem(p, p.followers[f], x, profile);
        std::vector<double> own(profile.begin() + off,
                                profile.begin() + off + p.followers[f].dim);
        double own_val = op.obj_ev(own);
        for (const auto& cand : grids[f])
          if (op.obj_ev(cand) < own_val - kTieTol) {
            eq = false;
            break;
          }
        off += p.followers[f].dim;
      }
      if (eq) out.push_back({profile, false});
      std::size_t i = grids.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < grids[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return lex_less(a.y, b.y); });
  return out;
}

bool ExistenceReport::all_hold() const {
  for (const auto& f : followers) {
    if (f.feasible_set_nonempty != cq::Verdict::Holds) return false;
    if (f.feasible_set_convex != cq::Verdict::Holds) return false;
    if (f.feasible_set_compact != cq::Verdict::Holds) return false;
    if (f.objective_continuous != cq::Verdict::Holds) return false;
    if (f.objective_convex_in_own != cq::Verdict::Holds) return false;
  }
  return true;
}

ExistenceReport check_existence_hypotheses(const SlmfgProblem& p,
                                           std::span<const double> x,
                                           double box_lo, double box_hi,
                                           const RunConfig& cfg) {
  ExistenceReport rep;
  std::vector<double> zeros(p.total_follower_dim(), 0.0);

  for (const auto& f : p.followers) {
    ExistenceBullets eb;
    eb.follower = f.id;
    OwnProblem op = make_own_problem(p, f, x, zeros);
    const std::size_t n = op.n();

    // Nonemptiness by feasible sample.
    auto fg = feasible_grid(op, box_lo, box_hi,
                            std::max(cfg.grid_step, (box_hi - box_lo) / 60.0),
                            cfg.feas_tol);
    if (!fg.empty()) {
      eb.feasible_set_nonempty = cq::Verdict::Holds;
      eb.feasible_point = fg.front();
    } else {
      std::vector<double> los(n, box_lo), his(n, box_hi);
      auto r = detail::compass_minimize(
          [&](std::span<const double> y) { return op.g_max(y); }, los, his,
          multistart_points(n, box_lo, box_hi, cfg.multistart,
                            sub_seed(cfg.seed, "exists")));
      if (r.value <= cfg.feas_tol) {
        eb.feasible_set_nonempty = cq::Verdict::Holds;
        eb.feasible_point = r.point;
      } else {
        eb.feasible_set_nonempty = cq::Verdict::Unknown;
        eb.note += "no feasible point found in the box; ";
      }
    }

    // Convexity of Y^f(x): every constraint convex in the own block.
    Box own_box = Box::uniform(op.own, box_lo, box_hi);
    eb.feasible_set_convex = cq::Verdict::Holds;
    bool all_certified = true;
    if (op.constraints.empty()) {
      // Whole space: convex, noncompact.
    } else {
      for (const auto& g : op.constraints) {
        auto v = classify_convexity(g, op.own, own_box, cfg.samples,
                                    sub_seed(cfg.seed, "exists-conv"));
        if (v.kind == ConvexityVerdict::Kind::NonconvexWitness) {
          eb.feasible_set_convex = cq::Verdict::Fails;
          all_certified = false;
        } else if (!v.certified()) {
          if (eb.feasible_set_convex == cq::Verdict::Holds)
            eb.feasible_set_convex = cq::Verdict::Unknown;
          all_certified = false;
        }
      }
    }

    // Objective convexity in the own block (opponents range over the box).
    Box all_box = Box::uniform(p.all_vars(), box_lo, box_hi);
    auto vo = classify_convexity(f.objective, f.vars(), all_box, cfg.samples,
                                 sub_seed(cfg.seed, "exists-obj"));
    eb.objective_convex_in_own =
        vo.certified() ? cq::Verdict::Holds
        : vo.kind == ConvexityVerdict::Kind::NonconvexWitness
            ? cq::Verdict::Fails
            : cq::Verdict::Unknown;

    // Compactness: certified bounded via box faces for convex sets, or a ray
    // probe exhibiting unboundedness.
    eb.feasible_set_compact = cq::Verdict::Unknown;
    if (op.constraints.empty()) {
      eb.feasible_set_compact = cq::Verdict::Fails;
      eb.note += "no constraints: feasible set is the whole space; ";
    } else if (eb.feasible_set_nonempty == cq::Verdict::Holds) {
      const auto& y0 = eb.feasible_point;
      // Ray probe along axis directions.
      bool unbounded = false;
      for (std::size_t i = 0; i < n && !unbounded; ++i) {
        for (double sgn : {1.0, -1.0}) {
          bool all_feas = true;
          for (double t = 1.0; t <= 1.1e6; t *= 4.0) {
            std::vector<double> y = y0;
            y[i] += sgn * t;
            if (!op.feasible(y, cfg.feas_tol)) {
              all_feas = false;
              break;
            }
          }
          if (all_feas) {
            unbounded = true;
            break;
          }
        }
      }
      if (unbounded) {
        eb.feasible_set_compact = cq::Verdict::Fails;
        eb.note += "feasible ray probe to scale 1e6; ";
      } else if (all_certified) {
        // Convex set avoiding every face of the box, with an interior point:
        // certified inside the box, hence bounded (and closed).
        bool faces_infeasible = true;
        for (std::size_t i = 0; i < n && faces_infeasible; ++i) {
          for (double side : {box_lo, box_hi}) {
            std::vector<double> los(n, box_lo), his(n, box_hi);
            los[i] = side;
            his[i] = side;
            auto r = detail::compass_minimize(
                [&](std::span<const double> y) { return op.g_max(y); }, los,
                his,
                multistart_points(n, box_lo, box_hi, cfg.multistart,
                                  sub_seed(cfg.seed, "exists-face")));
            if (r.value <= cfg.feas_tol) {
              faces_infeasible = false;
              break;
            }
          }
        }
        if (faces_infeasible) eb.feasible_set_compact = cq::Verdict::Holds;
      }
    }

    rep.followers.push_back(std::move(eb));
  }
  return rep;
}

}  // namespace slmfg::nep
