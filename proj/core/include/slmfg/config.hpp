#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slmfg {

/// Tolerances, grid geometry and sampling knobs shared by every operation.
/// All randomness in the toolkit flows from `seed`; reports embed the full
/// config so runs are reproducible byte-for-byte.
struct RunConfig {
  // Tolerances.
  double feas_tol = 1e-8;       // constraint feasibility
  double gap_tol = 1e-6;        // equilibrium gap / KKT residual
  double activity_tol = 1e-6;   // |g| <= activity_tol declares a constraint active
  double rank_tol = 1e-9;       // relative pivot threshold for numerical rank
  double sign_tol = 1e-9;       // slack on multiplier nonnegativity
  double cluster_eps = 1e-4;    // equilibrium deduplication radius
  double strict_improve = 1e-9; // required strict objective improvement

  // Grid geometry.
  double box_lo = -3.0;
  double box_hi = 3.0;
  double grid_step = 0.05;
  double radius = 0.15;         // local-minimality scan radius
  int radius_divisions = 15;    // local scan step = radius / radius_divisions

  // Sampling.
  std::uint64_t seed = 0;
  int multistart = 16;
  int max_br_iterations = 500;
  int samples = 64;             // CQ / convexity sampling
  int continuum_count = 5;      // distinct representatives that flag a continuum
  double unbounded_margin = 1e-3;
  double crcq_radius = 1e-2;

  enum class Format { Human, Records };
  Format format = Format::Human;

  double local_step() const { return radius / radius_divisions; }
};

/// Derive an independent deterministic stream for a named use of the seed.
std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag);

/// "k1=v1 k2=v2 ..." rendering of the config, fixed key order.
std::string render_config(const RunConfig& cfg);

/// Deterministic compact formatting used by records output.
std::string record_double(double v);
std::string record_vector(const std::vector<double>& v);

}  // namespace slmfg
