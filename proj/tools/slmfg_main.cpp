// slmfg — command-line front end for the SLMFG/MPCC toolkit.
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slmfg/config.hpp"
#include "slmfg/corpus.hpp"
#include "slmfg/cq.hpp"
#include "slmfg/gnep.hpp"
#include "slmfg/model.hpp"
#include "slmfg/mpcc.hpp"
#include "slmfg/multipliers.hpp"
#include "slmfg/nep.hpp"
#include "slmfg/verify.hpp"

namespace {

using namespace slmfg;

std::vector<double> parse_vector(const std::string& s) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(s);
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  return out;
}

Problem resolve_problem(const std::string& spec) {
  namespace fs = std::filesystem;
  if (fs::exists(spec)) return load_problem(spec);
  if (fs::exists(spec + ".slmfg")) return load_problem(spec + ".slmfg");
  std::string base = fs::path(spec).stem().string();
  for (const auto& id : corpus::ids())
    if (id == base) return corpus::builtin(id).problem;
  throw ParseError("cannot resolve problem '" + spec +
                       "': no such file and no such corpus id",
                   0);
}

SlmfgProblem resolve_slmfg(const std::string& spec) {
  Problem p = resolve_problem(spec);
  if (!std::holds_alternative<SlmfgProblem>(p))
    throw ValidationError("'" + spec +
                          "' is a grouped problem; reduce it first");
  return std::get<SlmfgProblem>(p);
}

GnepProblem resolve_gnep(const std::string& spec) {
  Problem p = resolve_problem(spec);
  if (!std::holds_alternative<GnepProblem>(p))
    throw ValidationError("'" + spec + "' has no group sections");
  return std::get<GnepProblem>(p);
}

bool records(const RunConfig& cfg) {
  return cfg.format == RunConfig::Format::Records;
}

void emit_config(const RunConfig& cfg) {
  if (records(cfg))
    std::cout << "record=config " << render_config(cfg) << "\n";
  else
    std::cout << "config: " << render_config(cfg) << "\n";
}

std::string verdict_str(cq::Verdict v) { return cq::verdict_name(v); }

int cmd_solve_nep(const std::string& problem, const std::string& xs,
                  const RunConfig& cfg) {
  auto p = resolve_slmfg(problem);
  auto x = parse_vector(xs);
  emit_config(cfg);
  try {
    auto r = nep::solve_nep(p, x, cfg);
    if (records(cfg)) {
      std::cout << "record=nepsolve x=" << record_vector(x)
                << " count=" << r.equilibria.size()
                << " continuum_suspected=" << (r.continuum_suspected ? 1 : 0)
                << "\n";
      for (const auto& e : r.equilibria)
        std::cout << "record=equilibrium y=" << record_vector(e.y)
                  << " gap="
                  << record_double(*std::max_element(e.br_gaps.begin(),
                                                     e.br_gaps.end()))
                  << " kkt=" << record_double(e.kkt_residual) << "\n";
    } else {
      if (r.equilibria.empty())
        std::cout << "NoEquilibriumFound (not proof of nonexistence)\n";
      for (const auto& e : r.equilibria) {
        std::cout << "equilibrium y = (" << record_vector(e.y)
                  << ")  max gap "
                  << record_double(*std::max_element(e.br_gaps.begin(),
                                                     e.br_gaps.end()))
                  << "  kkt residual " << record_double(e.kkt_residual)
                  << "\n";
      }
      if (r.continuum_suspected)
        std::cout << "continuum suspected: " << r.equilibria.size()
                  << " distinct representatives survived clustering\n";
    }
  } catch (const nep::UnboundedError& e) {
    if (records(cfg))
      std::cout << "record=error kind=unbounded detail=\"" << e.what()
                << "\"\n";
    else
      std::cout << "unbounded follower problem: " << e.what() << "\n";
  } catch (const nep::InfeasibleFollowerError& e) {
    if (records(cfg))
      std::cout << "record=error kind=infeasible detail=\"" << e.what()
                << "\"\n";
    else
      std::cout << "infeasible follower problem: " << e.what() << "\n";
  }
  return 0;
}

int cmd_reformulate(const std::string& problem, const std::string& out,
                    const RunConfig&) {
  auto p = resolve_slmfg(problem);
  auto m = mpcc::build_mpcc(p);
  mpcc::save_mpcc(m, out);
  std::cout << "wrote MPCC reformulation to " << out << "\n";
  return 0;
}

int cmd_check_point(const std::string& mpcc_file, const std::string& point,
                    const RunConfig& cfg) {
  auto m = mpcc::load_mpcc(mpcc_file);
  auto pt = parse_vector(point);
  auto r = mpcc::kkt_residual(m, pt);
  emit_config(cfg);
  bool feas = mpcc::is_mpcc_feasible(m, pt, cfg.gap_tol);
  if (records(cfg)) {
    std::cout << "record=kkt stationarity="
              << record_double(r.stationarity_norm)
              << " feasibility=" << record_double(r.feasibility_violation)
              << " sign=" << record_double(r.sign_violation)
              << " complementarity=" << record_double(r.complementarity_gap)
              << " total=" << record_double(r.total())
              << " feasible=" << (feas ? 1 : 0) << "\n";
  } else {
    std::cout << "stationarity_norm      "
              << record_double(r.stationarity_norm)
              << "\nfeasibility_violation  "
              << record_double(r.feasibility_violation)
              << "\nsign_violation         "
              << record_double(r.sign_violation)
              << "\ncomplementarity_gap    "
              << record_double(r.complementarity_gap)
              << "\ntotal                  " << record_double(r.total())
              << "\nmpcc_feasible          " << (feas ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_vertices(const std::string& problem, const std::string& follower,
                 const std::string& xs, const std::string& ys,
                 const RunConfig& cfg) {
  auto p = resolve_slmfg(problem);
  auto x = parse_vector(xs);
  auto y = parse_vector(ys);
  auto poly = multipliers::multiplier_polytope(p, follower, x, y,
                                               cfg.activity_tol, cfg.feas_tol);
  emit_config(cfg);
  bool empty = multipliers::is_empty(poly, cfg);
  std::ostringstream arow;
  for (Eigen::Index r = 0; r < poly.a.rows(); ++r) {
    if (r) arow << ";";
    for (Eigen::Index c = 0; c < poly.a.cols(); ++c)
      arow << (c ? "," : "") << record_double(poly.a(r, c));
  }
  std::vector<double> bvec(poly.b.data(), poly.b.data() + poly.b.size());
  if (records(cfg)) {
    std::cout << "record=polytope follower=" << follower << " active=";
    for (std::size_t i = 0; i < poly.active.indices.size(); ++i)
      std::cout << (i ? "," : "") << poly.active.indices[i] + 1;
    std::cout << " A=" << arow.str() << " b=" << record_vector(bvec)
              << " empty=" << (empty ? 1 : 0) << "\n";
    if (!empty)
      for (const auto& v : multipliers::enumerate_vertices(poly, cfg))
        std::cout << "record=vertex lambda=" << record_vector(v) << "\n";
  } else {
    std::cout << "active set: {";
    for (std::size_t i = 0; i < poly.active.indices.size(); ++i)
      std::cout << (i ? "," : "") << poly.active.indices[i] + 1;
    std::cout << "}\nA = [" << arow.str() << "]\nb = (" << record_vector(bvec)
              << ")\nempty: " << (empty ? "yes" : "no") << "\n";
    if (!empty)
      for (const auto& v : multipliers::enumerate_vertices(poly, cfg))
        std::cout << "vertex (" << record_vector(v) << ")\n";
  }
  return 0;
}

int cmd_check_cq(const std::string& problem, const std::string& which,
                 const std::string& follower, const std::string& xs,
                 const std::string& ys, double radius, const RunConfig& cfg) {
  auto p = resolve_slmfg(problem);
  auto x = parse_vector(xs);
  emit_config(cfg);
  if (which == "slater") {
    auto r = cq::check_slater(p, follower, x, cfg.box_lo, cfg.box_hi,
                              cfg.samples, cfg);
    if (records(cfg)) {
      std::cout << "record=slater follower=" << follower
                << " verdict=" << verdict_str(r.verdict)
                << " witness=" << record_vector(r.witness)
                << " max_g=" << record_double(r.max_constraint_value)
                << " note=\"" << r.note << "\"\n";
    } else {
      std::cout << "Slater at x = (" << record_vector(r.x)
                << "): " << verdict_str(r.verdict) << "\n  witness  ("
                << record_vector(r.witness) << ")\n  max g    "
                << record_double(r.max_constraint_value) << "\n  note     "
                << r.note << "\n";
    }
  } else if (which == "crcq") {
    auto y = parse_vector(ys);
    auto r =
        cq::check_crcq(p, follower, x, y, radius, cfg.samples, cfg.seed, cfg);
    if (records(cfg)) {
      std::cout << "record=crcq follower=" << follower << " verdict="
                << (r.violation_found ? "ViolationWitness"
                                      : "ConsistentWithCRCQ");
      if (r.violation_found)
        std::cout << " rank1=" << r.violation.rank1
                  << " rank2=" << r.violation.rank2
                  << " point2=" << record_vector(r.violation.point2);
      std::cout << "\n";
    } else {
      std::cout << "CRCQ at (x; y) = (" << record_vector(r.x) << "; "
                << record_vector(r.y) << "): "
                << (r.violation_found ? "ViolationWitness"
                                      : "ConsistentWithCRCQ")
                << "\n";
      for (const auto& sr : r.subset_ranks) {
        std::cout << "  subset {";
        for (std::size_t i = 0; i < sr.subset.size(); ++i)
          std::cout << (i ? "," : "") << sr.subset[i] + 1;
        std::cout << "}: rank " << sr.rank_at_point
                  << " at the point, sampled " << sr.sampled_min_rank << ".."
                  << sr.sampled_max_rank << "\n";
      }
      if (r.violation_found)
        std::cout << "  witness: rank " << r.violation.rank1 << " vs "
                  << r.violation.rank2 << " at ("
                  << record_vector(r.violation.point2) << ")\n";
    }
  } else if (which == "svensson") {
    auto r = cq::check_svensson(p, cfg.box_lo, cfg.box_hi, cfg.samples, cfg);
    for (const auto& f : r.followers) {
      if (records(cfg)) {
        std::cout << "record=svensson follower=" << f.follower
                  << " objective_convex=" << verdict_str(f.objective_convex)
                  << " joint_max_convex=" << verdict_str(f.joint_max_convex)
                  << " strict_pair=" << verdict_str(f.strict_pair_exists)
                  << "\n";
      } else {
        std::cout << "follower " << f.follower
                  << ":\n  (a) objective convex   "
                  << verdict_str(f.objective_convex)
                  << "\n  (b) joint max convex   "
                  << verdict_str(f.joint_max_convex)
                  << "\n  (c) strict pair exists "
                  << verdict_str(f.strict_pair_exists) << "\n";
        if (!f.strict_pair.empty())
          std::cout << "      witness (" << record_vector(f.strict_pair)
                    << ")\n";
      }
    }
  } else {
    throw ValidationError("--which must be slater, crcq or svensson");
  }
  return 0;
}

int cmd_verify_local(const std::string& problem, bool as_mpcc,
                     const std::string& point, double radius, double step,
                     const RunConfig& cfg) {
  auto p = resolve_slmfg(problem);
  auto pt = parse_vector(point);
  emit_config(cfg);
  verify::LocalMinVerdict v;
  if (as_mpcc) {
    auto m = mpcc::build_mpcc(p);
    v = verify::is_local_min_mpcc(m, pt, radius, step, cfg);
  } else {
    v = verify::is_local_min_slmfg(p, pt, radius, step, cfg);
  }
  if (records(cfg)) {
    std::cout << "record=local verdict="
              << (v.better_found ? "BetterNeighbor" : "NoBetterNeighborFound")
              << " tested=" << v.feasible_neighbors_tested;
    if (v.better_found)
      std::cout << " better=" << record_vector(v.better_point)
                << " gap=" << record_double(v.objective_gap);
    std::cout << "\n";
  } else {
    if (v.better_found)
      std::cout << "BetterNeighbor at (" << record_vector(v.better_point)
                << "), objective gap " << record_double(v.objective_gap)
                << "\n";
    else
      std::cout << "NoBetterNeighborFound (" << v.feasible_neighbors_tested
                << " feasible neighbors tested, radius "
                << record_double(radius) << ", step " << record_double(step)
                << ")\n";
  }
  return 0;
}

int cmd_gate(const std::string& problem, const std::string& theorem,
             const std::string& point, const RunConfig& cfg) {
  auto p = resolve_slmfg(problem);
  auto pt = parse_vector(point);
  auto m = mpcc::build_mpcc(p);
  verify::TheoremGateReport rep;
  if (theorem == "t2.1") {
    rep = verify::gate_t21(p, pt, cfg);
  } else if (theorem == "t2.2") {
    rep = verify::gate_t22(p, m, pt, cfg.box_lo, cfg.box_hi, cfg.grid_step,
                           cfg);
  } else if (theorem == "t2.3") {
    rep = verify::gate_t23(p, m, pt, cfg.radius, 4, cfg);
  } else if (theorem == "t2.4") {
    rep = verify::gate_t24(p, m, pt, cfg.radius, cfg);
  } else {
    throw ValidationError("--theorem must be one of t2.1, t2.2, t2.3, t2.4");
  }
  emit_config(cfg);
  if (records(cfg)) {
    std::cout << "record=gate theorem=" << rep.theorem
              << " status=" << verify::gate_status_name(rep.status)
              << " detail=\"" << rep.status_detail << "\"\n";
    for (const auto& h : rep.hypotheses)
      std::cout << "record=hypothesis name=" << h.name
                << " verdict=" << verdict_str(h.verdict) << " detail=\""
                << h.detail << "\"\n";
    if (rep.conclusion_tested)
      std::cout << "record=conclusion holds=" << (rep.conclusion_holds ? 1 : 0)
                << " detail=\"" << rep.conclusion_detail << "\"\n";
  } else {
    std::cout << rep.theorem
              << " gate: " << verify::gate_status_name(rep.status)
              << (rep.status_detail.empty() ? ""
                                            : " [" + rep.status_detail + "]")
              << "\n";
    for (const auto& h : rep.hypotheses)
      std::cout << "  [" << verdict_str(h.verdict) << "] " << h.name << ": "
                << h.detail << "\n";
    if (rep.conclusion_tested)
      std::cout << "  conclusion: "
                << (rep.conclusion_holds ? "holds" : "fails") << " ("
                << rep.conclusion_detail << ")\n";
  }
  return 0;
}

int cmd_reduce_gnep(const std::string& problem, const std::string& out,
                    bool assume, const RunConfig& cfg) {
  auto g = resolve_gnep(problem);
  auto reduced = gnep::reduce_grouped_to_nep(g, cfg, assume);
  save_problem(Problem(reduced), out);
  std::cout << "wrote reduced problem (" << reduced.followers.size()
            << " pseudo-followers) to " << out << "\n";
  return 0;
}

int cmd_check_gnep_equiv(const std::string& problem, const std::string& xs,
                         double grid_step, bool assume, const RunConfig& cfg) {
  auto g = resolve_gnep(problem);
  auto x = parse_vector(xs);
  nep::GridSpec grid{cfg.box_lo, cfg.box_hi, grid_step};
  auto rep = gnep::check_reduction_equivalence(g, x, grid, cfg, assume);
  emit_config(cfg);
  if (records(cfg)) {
    std::cout << "record=gnep_equiv x=" << record_vector(x)
              << " rgnep=" << rep.rgnep_count
              << " reduced=" << rep.reduced_count
              << " rgnep_only=" << rep.rgnep_only.size()
              << " reduced_only=" << rep.reduced_only.size()
              << " certified=" << (rep.joint_convexity_certified ? 1 : 0)
              << " hypothesis_violated=" << (rep.hypothesis_violated ? 1 : 0)
              << "\n";
  } else {
    std::cout << "grid-RGNEP solutions: " << rep.rgnep_count
              << "\nreduced solutions:    " << rep.reduced_count
              << "\nunmatched (RGNEP-only / reduced-only): "
              << rep.rgnep_only.size() << " / " << rep.reduced_only.size()
              << "\njoint convexity certified: "
              << (rep.joint_convexity_certified ? "yes" : "no") << "\n";
    if (rep.hypothesis_violated)
      std::cout << "note: ran under the joint-convexity override; the "
                   "reduction theorem's hypothesis is violated\n";
    if (rep.sets_coincide())
      std::cout << "sets coincide within one grid step\n";
  }
  return 0;
}

int cmd_corpus(const std::string& action, const std::string& id,
               const RunConfig& cfg) {
  if (action == "list") {
    for (const auto& i : corpus::ids()) std::cout << i << "\n";
    return 0;
  }
  if (action == "show") {
    auto e = corpus::builtin(id);
    std::cout << "# " << e.note << "\n" << render_problem(e.problem);
    return 0;
  }
  if (action == "run") {
    auto rep = corpus::run_corpus(id.empty() ? "all" : id, cfg);
    emit_config(cfg);
    int passed = 0;
    for (const auto& r : rep.results) {
      if (records(cfg)) {
        std::cout << "record=fact entry=" << r.entry << " name=" << r.name
                  << " checker=" << r.checker
                  << " provenance=" << r.provenance
                  << " status=" << (r.pass ? "pass" : "fail") << " detail=\""
                  << r.detail << "\"\n";
      } else {
        std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.entry << "."
                  << r.name << " (" << r.checker << "): " << r.detail << "\n";
      }
      passed += r.pass ? 1 : 0;
    }
    if (records(cfg))
      std::cout << "record=summary passed=" << passed
                << " total=" << rep.results.size() << "\n";
    else
      std::cout << passed << "/" << rep.results.size() << " facts pass\n";
    return rep.all_pass() ? 0 : 1;
  }
  throw ValidationError("corpus action must be list, show or run");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "slmfg - single-leader multi-follower games, their KKT/MPCC "
      "reformulations, multiplier polytopes and theorem gates"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "human";
  std::string box;
  app.add_option("--seed", cfg.seed,
                 "RNG seed (all randomness derives from it)");
  app.add_option("--tol", cfg.gap_tol, "equilibrium gap / KKT tolerance");
  app.add_option("--grid-step", cfg.grid_step, "verification grid step");
  app.add_option("--box", box, "search box as lo,hi");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"human", "records"}));
  app.set_config("--config");

  std::string problem, xs, ys, point, out, follower, which, theorem, mpcc_file;
  std::string corpus_action, corpus_id;
  bool as_mpcc = false, assume = false;
  double radius = cfg.radius, step = cfg.radius / cfg.radius_divisions;
  double crcq_radius = cfg.crcq_radius;

  auto* solve =
      app.add_subcommand("solve-nep", "solve the followers' game at x");
  solve->add_option("--problem", problem)->required();
  solve->add_option("--x", xs)->required();

  auto* reform =
      app.add_subcommand("reformulate", "write the KKT/MPCC reformulation");
  reform->add_option("--problem", problem)->required();
  reform->add_option("--out", out)->required();

  auto* checkpt = app.add_subcommand("check-point", "KKT residual of a point");
  checkpt->add_option("--mpcc", mpcc_file)->required();
  checkpt->add_option("--point", point)->required();

  auto* verts =
      app.add_subcommand("vertices", "multiplier polytope and its vertices");
  verts->add_option("--problem", problem)->required();
  verts->add_option("--follower", follower)->required();
  verts->add_option("--x", xs)->required();
  verts->add_option("--y", ys)->required();

  auto* checkcq =
      app.add_subcommand("check-cq", "constraint qualification checks");
  checkcq->add_option("--problem", problem)->required();
  checkcq->add_option("--which", which)->required();
  checkcq->add_option("--follower", follower);
  checkcq->add_option("--x", xs);
  checkcq->add_option("--y", ys);
  checkcq->add_option("--radius", crcq_radius);
  checkcq->add_option("--samples", cfg.samples);

  auto* local =
      app.add_subcommand("verify-local", "grid-scan local minimality");
  local->add_option("--problem", problem)->required();
  local->add_flag("--mpcc", as_mpcc, "treat the point as (x, y, lambda)");
  local->add_option("--point", point)->required();
  local->add_option("--radius", radius);
  local->add_option("--step", step);

  auto* gate = app.add_subcommand("gate", "run a theorem gate at a point");
  gate->add_option("--problem", problem)->required();
  gate->add_option("--theorem", theorem)->required();
  gate->add_option("--point", point)->required();

  auto* reduce =
      app.add_subcommand("reduce-gnep", "grouped GNEP to NEP reduction");
  reduce->add_option("--problem", problem)->required();
  reduce->add_option("--out", out)->required();
  reduce->add_flag("--assume-jointly-convex", assume);

  auto* equiv =
      app.add_subcommand("check-gnep-equiv", "grid equivalence oracle");
  equiv->add_option("--problem", problem)->required();
  equiv->add_option("--x", xs)->required();
  equiv->add_option("--grid-step", cfg.grid_step);
  equiv->add_flag("--assume-jointly-convex", assume);

  auto* corp = app.add_subcommand("corpus", "built-in example corpus");
  corp->add_option("action", corpus_action)->required();
  corp->add_option("id", corpus_id);

  // Global flags may appear after the subcommand name.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.format = format == "records" ? RunConfig::Format::Records
                                   : RunConfig::Format::Human;
  if (!box.empty()) {
    auto v = parse_vector(box);
    if (v.size() != 2) {
      std::cerr << "--box expects lo,hi\n";
      return 2;
    }
    cfg.box_lo = v[0];
    cfg.box_hi = v[1];
  }
  cfg.crcq_radius = crcq_radius;

  try {
    if (*solve) return cmd_solve_nep(problem, xs, cfg);
    if (*reform) return cmd_reformulate(problem, out, cfg);
    if (*checkpt) return cmd_check_point(mpcc_file, point, cfg);
    if (*verts) return cmd_vertices(problem, follower, xs, ys, cfg);
    if (*checkcq)
      return cmd_check_cq(problem, which, follower, xs, ys, crcq_radius, cfg);
    if (*local)
      return cmd_verify_local(problem, as_mpcc, point, radius, step, cfg);
    if (*gate) return cmd_gate(problem, theorem, point, cfg);
    if (*reduce) return cmd_reduce_gnep(problem, out, assume, cfg);
    if (*equiv)
      return cmd_check_gnep_equiv(problem, xs, cfg.grid_step, assume, cfg);
    if (*corp) return cmd_corpus(corpus_action, corpus_id, cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gnep::CertificationError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
