#include "slmfg/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "slmfg/linalg.hpp"

namespace slmfg::multipliers {

namespace {

linalg::Tolerances tols(const RunConfig& cfg) {
  linalg::Tolerances t;
  t.rank_rel = cfg.rank_tol;
  t.sign = cfg.sign_tol;
  t.residual = 1e-9;
  return t;
}

}  // namespace

std::vector<double> MultiplierPolytope::expand(
    const Eigen::VectorXd& lam_active) const {
  std::vector<double> full(num_constraints, 0.0);
  for (std::size_t i = 0; i < active.indices.size(); ++i)
    full[active.indices[i]] = lam_active[static_cast<Eigen::Index>(i)];
  return full;
}

bool MultiplierPolytope::contains(std::span<const double> lam,
                                  double tol) const {
  if (static_cast<int>(lam.size()) != num_constraints) return false;
  Eigen::VectorXd la(active.indices.size());
  std::vector<bool> is_active(num_constraints, false);
  for (std::size_t i = 0; i < active.indices.size(); ++i) {
    la[static_cast<Eigen::Index>(i)] = lam[active.indices[i]];
    is_active[active.indices[i]] = true;
  }
  for (int j = 0; j < num_constraints; ++j) {
    if (lam[j] < -tol) return false;
    if (!is_active[j] && std::abs(lam[j]) > tol) return false;
  }
  if (active.indices.empty()) return b.cwiseAbs().maxCoeff() <= tol;
  return (a * la - b).cwiseAbs().maxCoeff() <= tol;
}

MultiplierPolytope multiplier_polytope(const SlmfgProblem& p,
                                       const std::string& follower,
                                       std::span<const double> x,
                                       std::span<const double> y_full,
                                       double activity_tol, double feas_tol) {
  const FollowerProblem& f = p.follower(follower);
  Assignment a;
  {
    auto lv = p.leader.vars();
    if (x.size() < lv.size())
      throw ValidationError("multiplier_polytope: leader point too short");
    for (std::size_t i = 0; i < lv.size(); ++i) a[lv[i]] = x[i];
    int off = 0;
    for (const auto& g : p.followers) {
      for (int i = 0; i < g.dim; ++i) {
        if (off + i >= static_cast<int>(y_full.size()))
          throw ValidationError("multiplier_polytope: follower point too short");
        a[{g.block(), i}] = y_full[off + i];
      }
      off += g.dim;
    }
  }

  MultiplierPolytope poly;
  poly.follower = follower;
  poly.num_constraints = static_cast<int>(f.constraints.size());
  poly.active.follower = follower;
  poly.active.activity_tol = activity_tol;

  for (int j = 0; j < poly.num_constraints; ++j) {
    double gj = eval(f.constraints[j], a);
    if (gj > std::max(activity_tol, feas_tol))
      throw InfeasiblePointError("follower " + follower + " constraint " +
                                 std::to_string(j + 1) + " is violated (g=" +
                                 format_double(gj) + ")");
    if (std::abs(gj) <= activity_tol) poly.active.indices.push_back(j);
  }

  auto own = f.vars();
  poly.a.resize(static_cast<Eigen::Index>(own.size()),
                static_cast<Eigen::Index>(poly.active.indices.size()));
  for (std::size_t c = 0; c < poly.active.indices.size(); ++c) {
    auto gcol = grad(f.constraints[poly.active.indices[c]], own);
    for (std::size_t r = 0; r < own.size(); ++r)
      poly.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          eval(gcol[r], a);
  }
  poly.b.resize(static_cast<Eigen::Index>(own.size()));
  auto gobj = grad(f.objective, own);
  for (std::size_t r = 0; r < own.size(); ++r)
    poly.b[static_cast<Eigen::Index>(r)] = -eval(gobj[r], a);
  return poly;
}

bool is_empty(const MultiplierPolytope& poly, const RunConfig& cfg) {
  return !linalg::standard_form_feasible(poly.a, poly.b, tols(cfg));
}

std::vector<std::vector<double>> enumerate_vertices(
    const MultiplierPolytope& poly, const RunConfig& cfg) {
  auto bfs = linalg::basic_feasible_solutions(poly.a, poly.b, tols(cfg));
  if (bfs.empty())
    throw EmptyPolytopeError("multiplier polytope of follower " +
                             poly.follower + " is empty");
  std::vector<std::vector<double>> vertices;
  const double dedup = 1e-7;
  for (const auto& s : bfs) {
    std::vector<double> full = poly.expand(s.point);
    bool dup = false;
    for (const auto& v : vertices) {
      double d = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        d = std::max(d, std::abs(v[i] - full[i]));
      if (d <= dedup) {
        dup = true;
        break;
      }
    }
    if (!dup) vertices.push_back(std::move(full));
  }
  return vertices;
}

std::vector<std::vector<double>> sample_multipliers(
    const MultiplierPolytope& poly, int n, std::uint64_t seed,
    const RunConfig& cfg) {
  auto vertices = enumerate_vertices(poly, cfg);
  std::vector<std::vector<double>> out;
  if (n <= 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.reserve(n);
  for (int s = 0; s < n; ++s) {
    // Dirichlet(1) weights over the vertices.
    std::vector<double> w(vertices.size());
    double total = 0.0;
    for (auto& wi : w) {
      wi = -std::log(std::max(unit(rng), 1e-300));
      total += wi;
    }
    std::vector<double> pt(poly.num_constraints, 0.0);
    for (std::size_t v = 0; v < vertices.size(); ++v)
      for (int j = 0; j < poly.num_constraints; ++j)
        pt[j] += (w[v] / total) * vertices[v][j];
    out.push_back(std::move(pt));
  }
  return out;
}

std::optional<std::vector<double>> point_in_box(const MultiplierPolytope& poly,
                                                std::span<const double> lb,
                                                std::span<const double> ub,
                                                const RunConfig& cfg) {
  if (static_cast<int>(lb.size()) != poly.num_constraints ||
      static_cast<int>(ub.size()) != poly.num_constraints)
    throw ValidationError("point_in_box: bound length mismatch");

  // Inactive coordinates are pinned to zero; zero must lie in their box.
  std::vector<bool> is_active(poly.num_constraints, false);
  for (int j : poly.active.indices) is_active[j] = true;
  for (int j = 0; j < poly.num_constraints; ++j)
    if (!is_active[j] && (lb[j] > cfg.sign_tol || ub[j] < -cfg.sign_tol))
      return std::nullopt;

  const int k = static_cast<int>(poly.active.indices.size());
  Eigen::VectorXd alb(k), aub(k);
  for (int i = 0; i < k; ++i) {
    alb[i] = std::max(lb[poly.active.indices[i]], 0.0);
    aub[i] = ub[poly.active.indices[i]];
  }
  auto sol = linalg::box_equality_feasible(poly.a, poly.b, alb, aub, tols(cfg));
  if (!sol) return std::nullopt;
  return poly.expand(*sol);
}

}  // namespace slmfg::multipliers
