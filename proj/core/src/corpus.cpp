#include "slmfg/corpus.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "slmfg/cq.hpp"
#include "slmfg/gnep.hpp"
#include "slmfg/linalg.hpp"
#include "slmfg/mpcc.hpp"
#include "slmfg/multipliers.hpp"
#include "slmfg/nep.hpp"
#include "slmfg/verify.hpp"

namespace slmfg::corpus {

namespace {

Expr parse_with(const std::set<VarId>& vars, const std::string& text) {
  return parse_expr(text, vars);
}

std::set<VarId> declared(int leader_dim,
                         const std::vector<std::pair<std::string, int>>& fs) {
  std::set<VarId> v;
  for (int i = 0; i < leader_dim; ++i) v.insert({"x", i});
  for (const auto& [id, dim] : fs)
    for (int i = 0; i < dim; ++i) v.insert({"y." + id, i});
  return v;
}

SlmfgProblem make_ex1() {
  auto vars = declared(1, {{"f1", 2}, {"f2", 2}});
  SlmfgProblem p;
  p.leader.dim = 1;
  p.leader.objective = parse_with(vars, "x.0");
  p.leader.box = {{0.0, 4.0}};
  for (const std::string id : {"f1", "f2"}) {
    const std::string other = id == "f1" ? "f2" : "f1";
    FollowerProblem f;
    f.id = id;
    f.dim = 2;
    // Symmetric reading: each follower minimises its own first coordinate
    // plus the other follower's second coordinate, which is the form the
    // stated closed-form solution and multipliers satisfy.
    f.objective = parse_with(vars, "(+ y." + id + ".0 y." + other + ".1)");
    f.constraints.push_back(parse_with(
        vars, "(+ (^ y." + id + ".0 2) (* -1 y." + id + ".1) (* -1 x.0))"));
    f.constraints.push_back(
        parse_with(vars, "(+ (^ y." + id + ".0 2) y." + id + ".1)"));
    p.followers.push_back(std::move(f));
  }
  return p;
}

SlmfgProblem make_ex2() {
  auto vars = declared(1, {{"f1", 1}, {"f2", 1}});
  SlmfgProblem p;
  p.leader.dim = 1;
  p.leader.objective =
      parse_with(vars, "(+ (^ (+ x.0 -1) 2) (^ y.f1.0 2) (^ y.f2.0 2))");
  for (const std::string id : {"f1", "f2"}) {
    FollowerProblem f;
    f.id = id;
    f.dim = 1;
    f.objective = parse_with(vars, "(* x.0 (+ y.f1.0 y.f2.0))");
    f.constraints.push_back(
        parse_with(vars, "(* x.0 (^ y." + id + ".0 2))"));
    p.followers.push_back(std::move(f));
  }
  return p;
}

SlmfgProblem make_ex3() {
  auto vars = declared(1, {{"f1", 1}, {"f2", 1}});
  SlmfgProblem p;
  p.leader.dim = 1;
  p.leader.objective = parse_with(
      vars, "(+ (^ (+ x.0 -1) 2) (^ (+ y.f1.0 -1) 2) (^ (+ y.f2.0 -1) 2))");
  for (const std::string id : {"f1", "f2"}) {
    FollowerProblem f;
    f.id = id;
    f.dim = 1;
    f.objective = parse_with(vars, "(+ (* -1 y.f1.0) (* -1 y.f2.0))");
    f.constraints.push_back(parse_with(vars, "(+ -1 x.0 y." + id + ".0)"));
    f.constraints.push_back(
        parse_with(vars, "(+ -1 (* -1 x.0) y." + id + ".0)"));
    p.followers.push_back(std::move(f));
  }
  return p;
}

SlmfgProblem make_ex4() {
  auto vars = declared(1, {{"f1", 2}, {"f2", 2}});
  SlmfgProblem p;
  p.leader.dim = 1;
  p.leader.objective = parse_with(vars, "(+ (* -1 y.f1.1) (* -1 y.f2.1))");
  p.leader.box = {{0.0, 0.5}};
  for (const std::string id : {"f1", "f2"}) {
    FollowerProblem f;
    f.id = id;
    f.dim = 2;
    f.objective = parse_with(vars,
                             "(+ (^ y.f1.0 2) (^ (+ y.f1.1 1) 2) "
                             "(^ y.f2.0 2) (^ (+ y.f2.1 1) 2))");
    f.constraints.push_back(parse_with(
        vars, "(+ (^ (+ y." + id + ".0 (* -1 x.0)) 2) (^ (+ y." + id +
                  ".1 (* -1 x.0) -1) 2) -1)"));
    f.constraints.push_back(parse_with(
        vars, "(+ (^ (+ y." + id + ".0 x.0) 2) (^ (+ y." + id +
                  ".1 (* -1 x.0) -1) 2) -1)"));
    p.followers.push_back(std::move(f));
  }
  return p;
}

GnepProblem make_gnep1() {
  auto vars = declared(1, {{"a1", 1}, {"a2", 1}, {"b1", 1}, {"b2", 1}});
  GnepProblem g;
  g.leader.dim = 1;
  g.leader.objective = parse_with(vars, "(^ x.0 2)");
  g.leader.box = {{-1.0, 1.0}};
  for (const std::string id : {"a1", "a2", "b1", "b2"}) {
    FollowerProblem f;
    f.id = id;
    f.dim = 1;
    f.objective = parse_with(vars, "(^ (+ y." + id + ".0 (* -1 x.0)) 2)");
    g.followers.push_back(std::move(f));
  }
  SharedGroup ga;
  ga.name = "ga";
  ga.members = {"a1", "a2"};
  ga.shared_constraints.push_back(parse_with(vars, "(+ -1 y.a1.0 y.a2.0)"));
  SharedGroup gb;
  gb.name = "gb";
  gb.members = {"b1", "b2"};
  gb.shared_constraints.push_back(parse_with(vars, "(+ -1 y.b1.0 y.b2.0)"));
  g.groups = {std::move(ga), std::move(gb)};
  return g;
}

}  // namespace

std::vector<std::string> ids() { return {"ex1", "ex2", "ex3", "ex4", "gnep1"}; }

CorpusEntry builtin(const std::string& id) {
  CorpusEntry e;
  e.id = id;
  if (id == "ex1") {
    e.problem = make_ex1();
    e.note =
        "two followers over lens-shaped sets; the follower objectives use "
        "the symmetric reading (own first coordinate plus the other "
        "follower's second), the form the stated closed-form responses and "
        "multipliers satisfy; leader box [0,4] added since equilibria need "
        "x >= 0";
  } else if (id == "ex2") {
    e.problem = make_ex2();
    e.note =
        "scalar followers with the sign-flipping constraint x*y^2 <= 0; "
        "global SLMFG and MPCC solutions differ";
  } else if (id == "ex3") {
    e.problem = make_ex3();
    e.note =
        "scalar followers with two linear constraints; local MPCC solutions "
        "depend on the chosen multiplier";
  } else if (id == "ex4") {
    e.problem = make_ex4();
    e.note =
        "two-circle followers; the active gradient matrix drops rank at "
        "x = 0 and the constant-rank condition fails there";
  } else if (id == "gnep1") {
    e.problem = make_gnep1();
    e.note =
        "synthetic grouped instance (not from the source examples): four "
        "scalar followers in two groups with linear budget constraints; "
        "every reduction hypothesis is certifiable";
  } else {
    throw ValidationError("unknown corpus id '" + id + "'");
  }
  return e;
}

// ---------------------------------------------------------------------------
// Expected facts
// ---------------------------------------------------------------------------

namespace {

using Fact = std::function<bool(std::string&)>;

struct FactSpec {
  std::string name;
  std::string checker;
  std::string provenance;
  Fact run;
};

bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<FactSpec> facts_ex1(const RunConfig& cfg) {
  std::vector<FactSpec> out;
  auto p = std::get<SlmfgProblem>(builtin("ex1").problem);

  out.push_back(
      {"nep-closed-form", "nep.solve_nep", "closed-form",
       [p, cfg](std::string& detail) {
         for (double x : {0.5, 1.0, 2.0}) {
           auto r = nep::solve_nep(p, std::vector<double>{x}, cfg);
           if (r.equilibria.size() != 1) {
             detail = "expected a unique equilibrium at x=" + record_double(x);
             return false;
           }
           double y1 = -std::sqrt(x / 2), y2 = -x / 2;
           const auto& y = r.equilibria.front().y;
           for (int k = 0; k < 2; ++k) {
             if (!approx(y[2 * k], y1, 1e-6) || !approx(y[2 * k + 1], y2, 1e-6)) {
               detail = "equilibrium at x=" + record_double(x) +
                        " is (" + record_vector(y) + ")";
               return false;
             }
           }
         }
         detail = "matches (-sqrt(x/2), -x/2) per follower at x in {0.5,1,2}";
         return true;
       }});

  out.push_back(
      {"multiplier-closed-form", "multipliers.enumerate_vertices",
       "closed-form", [p, cfg](std::string& detail) {
         for (double x : {0.5, 1.0, 2.0}) {
           double mu = 1.0 / (4.0 * std::sqrt(x / 2));
           std::vector<double> y = {-std::sqrt(x / 2), -x / 2,
                                    -std::sqrt(x / 2), -x / 2};
           for (const auto& f : p.followers) {
             auto poly = multipliers::multiplier_polytope(
                 p, f.id, std::vector<double>{x}, y, cfg.activity_tol,
                 cfg.feas_tol);
             auto vs = multipliers::enumerate_vertices(poly, cfg);
             if (vs.size() != 1 || !approx(vs[0][0], mu, 1e-6) ||
                 !approx(vs[0][1], mu, 1e-6)) {
               detail = "multiplier at x=" + record_double(x) + " follower " +
                        f.id + " not the singleton (mu,mu)";
               return false;
             }
           }
         }
         detail = "singleton multiplier 1/(4 sqrt(x/2)) per follower";
         return true;
       }});

  out.push_back(
      {"slater-flip-at-zero", "cq.check_slater", "closed-form",
       [p, cfg](std::string& detail) {
         struct Probe {
           double x;
           cq::Verdict want;
         };
         for (const Probe pr : {Probe{-0.5, cq::Verdict::Fails},
                                Probe{0.0, cq::Verdict::Fails},
                                Probe{0.25, cq::Verdict::Holds},
                                Probe{1.0, cq::Verdict::Holds}}) {
           auto rep = cq::check_slater(p, "f1", std::vector<double>{pr.x},
                                       cfg.box_lo, cfg.box_hi, cfg.samples,
                                       cfg);
           if (rep.verdict != pr.want) {
             detail = "x=" + record_double(pr.x) + " gave " +
                      cq::verdict_name(rep.verdict);
             return false;
           }
         }
         detail = "verdicts flip exactly at x=0 over {-0.5, 0, 0.25, 1}";
         return true;
       }});

  out.push_back(
      {"empty-multiplier-set-at-zero", "multipliers.is_empty", "closed-form",
       [p, cfg](std::string& detail) {
         std::vector<double> y(4, 0.0);
         for (const auto& f : p.followers) {
           auto poly = multipliers::multiplier_polytope(
               p, f.id, std::vector<double>{0.0}, y, cfg.activity_tol,
               cfg.feas_tol);
           if (!multipliers::is_empty(poly, cfg)) {
             detail = "polytope unexpectedly nonempty for " + f.id;
             return false;
           }
         }
         detail = "KKT multipliers do not exist at (0,(0,0))";
         return true;
       }});

  out.push_back(
      {"equilibrium-without-kkt-at-zero", "nep.is_nash_equilibrium",
       "closed-form", [p, cfg](std::string& detail) {
         std::vector<double> y(4, 0.0);
         auto v = nep::is_nash_equilibrium(p, std::vector<double>{0.0}, y,
                                           cfg.gap_tol, cfg);
         if (!v.is_equilibrium) {
           detail = "(0,0,0,0) not recognised as an equilibrium at x=0";
           return false;
         }
         if (v.certificate.kkt_residual <= cfg.gap_tol) {
           detail = "KKT residual unexpectedly small: " +
                    record_double(v.certificate.kkt_residual);
           return false;
         }
         detail = "gap 0 while the KKT residual stays bounded away from 0";
         return true;
       }});

  out.push_back(
      {"kkt-residual-closed-form-point", "mpcc.kkt_residual", "closed-form",
       [p, cfg](std::string& detail) {
         auto m = mpcc::build_mpcc(p);
         double mu = 0.25;  // 1/(4 sqrt(2/2)) at x = 2
         std::vector<double> pt = {2.0, -1.0, -1.0, -1.0, -1.0,
                                   mu,  mu,   mu,   mu};
         double total = mpcc::kkt_residual(m, pt).total();
         detail = "total residual " + record_double(total);
         return total <= 1e-9;
       }});

  out.push_back(
      {"mpcc-infeasible-at-zero", "mpcc.is_mpcc_feasible", "closed-form",
       [p, cfg](std::string& detail) {
         auto m = mpcc::build_mpcc(p);
         for (double l : {0.0, 1.0}) {
           std::vector<double> pt = {0, 0, 0, 0, 0, l, l, l, l};
           if (mpcc::is_mpcc_feasible(m, pt, cfg.gap_tol)) {
             detail = "feasible at lambda=" + record_double(l);
             return false;
           }
         }
         detail = "no multiplier completes (0,(0,0),(0,0))";
         return true;
       }});

  out.push_back(
      {"nep-at-zero", "nep.solve_nep", "derived-oracle",
       [p, cfg](std::string& detail) {
         auto r = nep::solve_nep(p, std::vector<double>{0.0}, cfg);
         if (r.equilibria.size() != 1) {
           detail = "expected the unique pinched equilibrium";
           return false;
         }
         for (double v : r.equilibria.front().y)
           if (std::abs(v) > 1e-6) {
             detail = "equilibrium (" + record_vector(r.equilibria.front().y) +
                      ")";
             return false;
           }
         detail = "feasible set pinches to the origin";
         return true;
       }});
  return out;
}

std::vector<FactSpec> facts_ex2(const RunConfig& cfg) {
  std::vector<FactSpec> out;
  auto p = std::get<SlmfgProblem>(builtin("ex2").problem);

  out.push_back({"nep-at-one", "nep.solve_nep", "derived-oracle",
                 [p, cfg](std::string& detail) {
                   auto r = nep::solve_nep(p, std::vector<double>{1.0}, cfg);
                   if (r.equilibria.size() != 1 ||
                       std::abs(r.equilibria.front().y[0]) > 1e-8 ||
                       std::abs(r.equilibria.front().y[1]) > 1e-8) {
                     detail = "expected the forced equilibrium (0,0)";
                     return false;
                   }
                   detail = "constraint y^2 <= 0 forces (0,0)";
                   return true;
                 }});

  out.push_back({"best-response-unbounded", "nep.best_response",
                 "derived-oracle", [p, cfg](std::string& detail) {
                   try {
                     nep::best_response(p, "f1", std::vector<double>{-1.0},
                                        std::vector<double>{0.0, 0.0}, cfg);
                   } catch (const nep::UnboundedError&) {
                     detail = "descent leaves every box at x=-1";
                     return true;
                   }
                   detail = "no unboundedness detected at x=-1";
                   return false;
                 }});

  out.push_back(
      {"mpcc-feasible-means-x-zero", "multipliers.is_empty", "closed-form",
       [p, cfg](std::string& detail) {
         for (int i = 0; i <= 20; ++i) {
           double x = -2.0 + 0.2 * i;
           for (int j = 0; j <= 20; ++j) {
             for (int k = 0; k <= 20; ++k) {
               std::vector<double> y = {-2.0 + 0.2 * j, -2.0 + 0.2 * k};
               bool completable = true;
               for (const auto& f : p.followers) {
                 try {
                   auto poly = multipliers::multiplier_polytope(
                       p, f.id, std::vector<double>{x}, y, cfg.activity_tol,
                       cfg.feas_tol);
                   completable =
                       completable && !multipliers::is_empty(poly, cfg);
                 } catch (const multipliers::InfeasiblePointError&) {
                   completable = false;
                 }
                 if (!completable) break;
               }
               if (completable && std::abs(x) > 1e-8) {
                 detail = "completable point with x=" + record_double(x);
                 return false;
               }
             }
           }
         }
         detail = "every sampled MPCC-feasible point has x = 0";
         return true;
       }});

  out.push_back(
      {"slmfg-grid-global", "nep.brute_force_nep", "closed-form",
       [p, cfg](std::string& detail) {
         Evaluator obj(p.leader.objective, p.all_vars());
         double best = std::numeric_limits<double>::infinity();
         std::vector<double> arg;
         for (int i = 0; i <= 80; ++i) {
           double x = -2.0 + 0.05 * i;
           nep::GridSpec gs{-2.0, 2.0, 0.05};
           std::vector<nep::GridEquilibrium> eqs;
           try {
             eqs = nep::brute_force_nep(p, std::vector<double>{x}, gs, cfg);
           } catch (const ValidationError&) {
             continue;  // continuum at x=0 overflows the product cap
           }
           for (const auto& e : eqs) {
             if (e.boundary_artifact) continue;
             std::vector<double> full = {x, e.y[0], e.y[1]};
             double v = obj(full);
             if (v < best) {
               best = v;
               arg = full;
             }
           }
         }
         if (arg.empty() || !approx(arg[0], 1.0, 1e-9) ||
             !approx(arg[1], 0.0, 1e-9) || !approx(arg[2], 0.0, 1e-9)) {
           detail = "grid-global at (" + record_vector(arg) + ")";
           return false;
         }
         detail = "grid-global solution (1,0,0), objective 0";
         return true;
       }});

  out.push_back(
      {"gate-t22-hypothesis-failed", "verify.gate_t22", "closed-form",
       [p, cfg](std::string& detail) {
         auto m = mpcc::build_mpcc(p);
         std::vector<double> pt = {0, 0, 0, 1, 1};
         auto rep = verify::gate_t22(p, m, pt, -2.0, 2.0, 0.25, cfg);
         detail = verify::gate_status_name(rep.status) + ": " +
                  rep.status_detail;
         return rep.status == verify::GateStatus::HypothesisFailed;
       }});

  out.push_back(
      {"mpcc-local-at-origin", "verify.is_local_min_mpcc", "closed-form",
       [p, cfg](std::string& detail) {
         auto m = mpcc::build_mpcc(p);
         std::vector<double> pt = {0, 0, 0, 1, 1};
         auto v = verify::is_local_min_mpcc(m, pt, 0.15, 0.15 / 15, cfg);
         detail = v.better_found ? "unexpected better neighbor"
                                 : "no better neighbor found";
         return !v.better_found;
       }});

  out.push_back(
      {"svensson-conditions", "cq.check_svensson", "closed-form",
       [p, cfg](std::string& detail) {
         auto rep = cq::check_svensson(p, -2.0, 2.0, cfg.samples, cfg);
         for (const auto& f : rep.followers) {
           if (f.strict_pair_exists != cq::Verdict::Holds) {
             detail = "strict pair not found for " + f.follower;
             return false;
           }
           if (f.joint_max_convex != cq::Verdict::Fails) {
             detail = "joint convexity not refuted for " + f.follower;
             return false;
           }
         }
         detail = "strict pair exists; joint convexity fails by midpoint test";
         return true;
       }});

  out.push_back({"continuum-at-zero", "nep.solve_nep", "derived-oracle",
                 [p, cfg](std::string& detail) {
                   auto r = nep::solve_nep(p, std::vector<double>{0.0}, cfg);
                   detail = std::to_string(r.equilibria.size()) +
                            " clustered representatives";
                   return r.continuum_suspected;
                 }});
  return out;
}

std::vector<FactSpec> facts_ex3(const RunConfig& cfg) {
  std::vector<FactSpec> out;
  auto p = std::get<SlmfgProblem>(builtin("ex3").problem);
  auto m = mpcc::build_mpcc(p);

  out.push_back(
      {"nep-case-formula", "nep.solve_nep", "closed-form",
       [p, cfg](std::string& detail) {
         for (double x : {0.0, 1.0 / 3.0, -0.5}) {
           auto r = nep::solve_nep(p, std::vector<double>{x}, cfg);
           double want = 1.0 - std::abs(x);
           if (r.equilibria.size() != 1 ||
               !approx(r.equilibria.front().y[0], want, 1e-6) ||
               !approx(r.equilibria.front().y[1], want, 1e-6)) {
             detail = "equilibrium at x=" + record_double(x) + " wrong";
             return false;
           }
         }
         detail = "y = 1 - |x| per follower";
         return true;
       }});

  out.push_back(
      {"multiplier-cases", "multipliers.enumerate_vertices", "closed-form",
       [p, cfg](std::string& detail) {
         auto verts = [&](double x) {
           double yv = 1.0 - std::abs(x);
           std::vector<double> y = {yv, yv};
           auto poly = multipliers::multiplier_polytope(
               p, "f1", std::vector<double>{x}, y, cfg.activity_tol,
               cfg.feas_tol);
           return multipliers::enumerate_vertices(poly, cfg);
         };
         auto v1 = verts(0.5);
         if (v1.size() != 1 || !approx(v1[0][0], 1, 1e-9) ||
             !approx(v1[0][1], 0, 1e-9)) {
           detail = "x>0 multiplier is not (1,0)";
           return false;
         }
         auto v2 = verts(-0.5);
         if (v2.size() != 1 || !approx(v2[0][0], 0, 1e-9) ||
             !approx(v2[0][1], 1, 1e-9)) {
           detail = "x<0 multiplier is not (0,1)";
           return false;
         }
         auto v3 = verts(0.0);
         if (v3.size() != 2) {
           detail = "x=0 polytope does not have two vertices";
           return false;
         }
         detail = "(1,0) for x>0, (0,1) for x<0, both extremes at x=0";
         return true;
       }});

  out.push_back(
      {"kkt-residual-at-flagged-point", "mpcc.kkt_residual", "closed-form",
       [p, m, cfg](std::string& detail) {
         std::vector<double> pt = {0, 1, 1, 0, 1, 0, 1};
         double total = mpcc::kkt_residual(m, pt).total();
         detail = "total " + record_double(total);
         return total <= 1e-12;
       }});

  out.push_back(
      {"mpcc-local-split", "verify.is_local_min_mpcc", "closed-form",
       [p, m, cfg](std::string& detail) {
         std::vector<double> keep = {0, 1, 1, 0, 1, 0, 1};
         std::vector<double> drop = {0, 1, 1, 1, 0, 1, 0};
         auto vk = verify::is_local_min_mpcc(m, keep, 0.15, 0.01, cfg);
         auto vd = verify::is_local_min_mpcc(m, drop, 0.15, 0.01, cfg);
         if (vk.better_found) {
           detail = "(0,1)-multiplier point lost local minimality";
           return false;
         }
         if (!vd.better_found) {
           detail = "(1,0)-multiplier point kept local minimality";
           return false;
         }
         detail = "local with multipliers (0,1), not local with (1,0)";
         return true;
       }});

  out.push_back(
      {"slmfg-local-fails-at-flagged-point", "verify.is_local_min_slmfg",
       "closed-form", [p, cfg](std::string& detail) {
         std::vector<double> pt = {0, 1, 1};
         auto v = verify::is_local_min_slmfg(p, pt, 0.15, 0.01, cfg);
         detail = v.better_found
                      ? "better neighbor at (" + record_vector(v.better_point) +
                            ")"
                      : "no better neighbor";
         return v.better_found;
       }});

  out.push_back(
      {"slmfg-local-holds-at-global", "verify.is_local_min_slmfg",
       "closed-form", [p, cfg](std::string& detail) {
         std::vector<double> pt = {1.0 / 3, 2.0 / 3, 2.0 / 3};
         auto v = verify::is_local_min_slmfg(p, pt, 0.15, 0.01, cfg);
         detail = v.better_found ? "unexpected better neighbor"
                                 : "no better neighbor";
         return !v.better_found;
       }});

  out.push_back(
      {"gate-t23-failing-multiplier", "verify.gate_t23", "closed-form",
       [p, m, cfg](std::string& detail) {
         std::vector<double> pt = {0, 1, 1};
         auto rep = verify::gate_t23(p, m, pt, 0.15, 3, cfg);
         if (rep.status != verify::GateStatus::HypothesisFailed) {
           detail = "status " + verify::gate_status_name(rep.status);
           return false;
         }
         if (rep.failing_multiplier.empty()) {
           detail = "no failing multiplier reported";
           return false;
         }
         detail = "failing multiplier (" +
                  record_vector(rep.failing_multiplier) + ")";
         return true;
       }});

  out.push_back({"gate-t24-transfers-at-global", "verify.gate_t24",
                 "derived-oracle", [p, m, cfg](std::string& detail) {
                   std::vector<double> pt = {1.0 / 3, 2.0 / 3, 2.0 / 3};
                   auto rep = verify::gate_t24(p, m, pt, 0.15, cfg);
                   detail = verify::gate_status_name(rep.status) +
                            (rep.status_detail.empty() ? ""
                                                       : ": " +
                                                             rep.status_detail);
                   return rep.status == verify::GateStatus::Transferred;
                 }});
  return out;
}

std::vector<FactSpec> facts_ex4(const RunConfig& cfg) {
  std::vector<FactSpec> out;
  auto p = std::get<SlmfgProblem>(builtin("ex4").problem);
  auto m = mpcc::build_mpcc(p);

  out.push_back(
      {"multiplier-polytope-at-flagged-point", "multipliers.multiplier_polytope",
       "closed-form", [p, cfg](std::string& detail) {
         std::vector<double> y = {0, 0, 0, 0};
         auto poly = multipliers::multiplier_polytope(
             p, "f1", std::vector<double>{0.0}, y, cfg.activity_tol,
             cfg.feas_tol);
         if (poly.active.indices != std::vector<int>{0, 1}) {
           detail = "active set is not {1,2}";
           return false;
         }
         // A = [[0,0],[-2,-2]], b = -grad F = (0,-2): solutions lam1+lam2=1.
         if (!approx(poly.a(0, 0), 0, 1e-12) || !approx(poly.a(0, 1), 0, 1e-12) ||
             !approx(poly.a(1, 0), -2, 1e-12) ||
             !approx(poly.a(1, 1), -2, 1e-12) || !approx(poly.b[0], 0, 1e-12) ||
             !approx(poly.b[1], -2, 1e-12)) {
           detail = "A or b mismatch";
           return false;
         }
         auto vs = multipliers::enumerate_vertices(poly, cfg);
         if (vs.size() != 2) {
           detail = "expected two vertices";
           return false;
         }
         bool has10 = false, has01 = false;
         for (const auto& v : vs) {
           has10 = has10 || (approx(v[0], 1, 1e-9) && approx(v[1], 0, 1e-9));
           has01 = has01 || (approx(v[0], 0, 1e-9) && approx(v[1], 1, 1e-9));
         }
         detail = "vertices (1,0) and (0,1) of {lam >= 0 : lam1+lam2 = 1}";
         return has10 && has01;
       }});

  out.push_back(
      {"crcq-violation", "cq.check_crcq", "closed-form",
       [p, cfg](std::string& detail) {
         auto rep = cq::check_crcq(p, "f1", std::vector<double>{0.0},
                                   std::vector<double>{0.0, 0.0},
                                   cfg.crcq_radius, cfg.samples,
                                   sub_seed(cfg.seed, "corpus-crcq"), cfg);
         if (!rep.violation_found) {
           detail = "no rank discrepancy found";
           return false;
         }
         detail = "rank " + std::to_string(rep.violation.rank1) +
                  " at the point vs " + std::to_string(rep.violation.rank2) +
                  " nearby";
         return rep.violation.rank1 == 1 && rep.violation.rank2 == 2;
       }});

  out.push_back(
      {"rank-flip-along-feasible-points", "linalg.numerical_rank",
       "closed-form", [p, cfg](std::string& detail) {
         const auto& f = p.follower("f1");
         auto own = f.vars();
         auto g1 = grad(f.constraints[0], own);
         auto g2 = grad(f.constraints[1], own);
         auto rank_at = [&](double x, double y1, double y2) {
           Assignment a{{{"x", 0}, x},
                        {{"y.f1", 0}, y1},
                        {{"y.f1", 1}, y2}};
           Eigen::MatrixXd mat(2, 2);
           mat(0, 0) = eval(g1[0], a);
           mat(1, 0) = eval(g1[1], a);
           mat(0, 1) = eval(g2[0], a);
           mat(1, 1) = eval(g2[1], a);
           return linalg::numerical_rank(mat, cfg.rank_tol);
         };
         if (rank_at(0, 0, 0) != 1) {
           detail = "rank at the flagged point is not 1";
           return false;
         }
         for (int k = 1; k <= 10; ++k) {
           double x = 0.01 * k;
           double y2 = x + 1 - std::sqrt(1 - x * x);  // feasible lens tip
           if (rank_at(x, 0.0, y2) != 2) {
             detail = "rank at x=" + record_double(x) + " is not 2";
             return false;
           }
         }
         detail = "rank 1 at the point, rank 2 at 10 feasible x in (0, 0.1]";
         return true;
       }});

  out.push_back(
      {"multiplier-sequence-limit", "verify.sequence_probe", "closed-form",
       [p, m, cfg](std::string& detail) {
         std::vector<std::vector<double>> xs;
         for (double x : {0.25, 0.1, 0.01, 1e-3, 1e-4}) xs.push_back({x});
         auto steps = verify::sequence_probe(p, m, xs, cfg);
         for (const auto& st : steps) {
           if (!st.mpcc_feasible) {
             detail = "sequence point at x=" + record_vector(st.x) +
                      " not MPCC-feasible";
             return false;
           }
           if (st.leader_objective >= 0.0) {
             detail = "objective not strictly below the flagged point";
             return false;
           }
         }
         const auto& lam = steps.back().lambda;
         for (double l : lam)
           if (!approx(l, 0.5, 1e-4)) {
             detail = "limit multiplier (" + record_vector(lam) + ")";
             return false;
           }
         detail = "multipliers converge to (1/2,1/2); objectives strictly "
                  "below the flagged point";
         return true;
       }});

  out.push_back(
      {"gate-t24-crcq-failure", "verify.gate_t24", "closed-form",
       [p, m, cfg](std::string& detail) {
         std::vector<double> pt = {0, 0, 0, 0, 0};
         auto rep = verify::gate_t24(p, m, pt, 0.15, cfg);
         if (rep.status != verify::GateStatus::HypothesisFailed) {
           detail = "status " + verify::gate_status_name(rep.status);
           return false;
         }
         bool crcq_failed = false;
         for (const auto& h : rep.hypotheses)
           crcq_failed = crcq_failed || (h.name == "crcq" &&
                                         h.verdict == cq::Verdict::Fails);
         if (!crcq_failed) {
           detail = "CRCQ did not fail: " + rep.status_detail;
           return false;
         }
         if (rep.conclusion_holds) {
           detail = "conclusion unexpectedly holds";
           return false;
         }
         detail = "CRCQ fails and the point is indeed not locally optimal";
         return true;
       }});

  out.push_back({"nep-at-zero", "nep.solve_nep", "derived-oracle",
                 [p, cfg](std::string& detail) {
                   auto r = nep::solve_nep(p, std::vector<double>{0.0}, cfg);
                   if (r.equilibria.size() != 1) {
                     detail = "expected a unique equilibrium";
                     return false;
                   }
                   for (double v : r.equilibria.front().y)
                     if (std::abs(v) > 1e-6) {
                       detail = "equilibrium (" +
                                record_vector(r.equilibria.front().y) + ")";
                       return false;
                     }
                   detail = "both followers sit at the lens tip (0,0)";
                   return true;
                 }});
  return out;
}

std::vector<FactSpec> facts_gnep1(const RunConfig& cfg) {
  std::vector<FactSpec> out;
  auto g = std::get<GnepProblem>(builtin("gnep1").problem);

  out.push_back({"validates", "model.validate", "definition",
                 [g](std::string& detail) {
                   auto v = validate(g);
                   detail = std::to_string(v.size()) + " violations";
                   return v.empty();
                 }});

  out.push_back(
      {"reduction-structure", "gnep.reduce_grouped_to_nep", "derived-oracle",
       [g, cfg](std::string& detail) {
         auto reduced = gnep::reduce_grouped_to_nep(g, cfg);
         if (reduced.followers.size() != 2 || reduced.followers[0].dim != 2 ||
             reduced.followers[1].dim != 2) {
           detail = "unexpected pseudo-follower layout";
           return false;
         }
         if (!structurally_equal(reduced.leader.objective,
                                 g.leader.objective) ||
             reduced.leader.box != g.leader.box) {
           detail = "leader problem changed";
           return false;
         }
         auto violations = validate(reduced);
         detail = "2 pseudo-followers of dimension 2, " +
                  std::to_string(violations.size()) + " violations";
         return violations.empty();
       }});

  out.push_back(
      {"reduction-equivalence", "gnep.check_reduction_equivalence",
       "derived-oracle", [g, cfg](std::string& detail) {
         for (double x : {0.0, 0.25, 0.5}) {
           nep::GridSpec grid{-2.0, 2.0, 0.05};
           auto rep = gnep::check_reduction_equivalence(
               g, std::vector<double>{x}, grid, cfg);
           if (!rep.sets_coincide()) {
             detail = "sets differ at x=" + record_double(x) + " (" +
                      std::to_string(rep.rgnep_only.size()) + "/" +
                      std::to_string(rep.reduced_only.size()) + " unmatched)";
             return false;
           }
         }
         detail = "grid-RGNEP and reduced solutions coincide at the probes";
         return true;
       }});

  out.push_back({"joint-convexity-certified", "expr.classify_convexity",
                 "derived-oracle", [g, cfg](std::string& detail) {
                   try {
                     (void)gnep::reduce_grouped_to_nep(g, cfg);
                   } catch (const gnep::CertificationError&) {
                     detail = "certification unexpectedly failed";
                     return false;
                   }
                   detail = "linear budget constraints certify exactly";
                   return true;
                 }});
  return out;
}

}  // namespace

CorpusReport run_corpus(const std::string& filter, const RunConfig& cfg) {
  CorpusReport rep;
  auto run_entry = [&](const std::string& id,
                       const std::vector<FactSpec>& facts) {
    if (filter != "all" && filter != id) return;
    for (const auto& f : facts) {
      FactResult r;
      r.entry = id;
      r.name = f.name;
      r.checker = f.checker;
      r.provenance = f.provenance;
      try {
        r.pass = f.run(r.detail);
      } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
      }
      rep.results.push_back(std::move(r));
    }
  };
  run_entry("ex1", facts_ex1(cfg));
  run_entry("ex2", facts_ex2(cfg));
  run_entry("ex3", facts_ex3(cfg));
  run_entry("ex4", facts_ex4(cfg));
  run_entry("gnep1", facts_gnep1(cfg));
  return rep;
}

}  // namespace slmfg::corpus
