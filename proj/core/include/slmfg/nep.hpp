#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/cq.hpp"
#include "slmfg/model.hpp"

namespace slmfg::nep {

class InfeasibleFollowerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Declared heuristically: the search left the box with decreasing objective
/// and no constraint activity.
class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double lo = -3.0;
  double hi = 3.0;
  double step = 0.05;
};

/// One best-response minimiser with its optimality evidence.
struct BrCandidate {
  std::vector<double> y;      // follower's own block
  double objective = 0.0;
  double kkt_residual = 0.0;
  bool grid_certified = false;  // found by grid+refinement rather than KKT
};

/// Minimisers of F^f(x, ., y^{-f}) over Y^f(x): active-set KKT systems are
/// solved by damped multistart Newton and polished; when no KKT point exists
/// (e.g. Slater fails) the grid backstop returns a grid-certified minimiser.
std::vector<BrCandidate> best_response(const SlmfgProblem& p,
                                       const std::string& follower,
                                       std::span<const double> x,
                                       std::span<const double> y_minus,
                                       const RunConfig& cfg);

struct EquilibriumCertificate {
  std::vector<double> y;              // full follower profile
  std::vector<double> br_gaps;        // per follower, >= 0
  double kkt_residual = 0.0;          // max over followers
};

struct NepResult {
  std::vector<EquilibriumCertificate> equilibria;  // clustered, sorted
  bool continuum_suspected = false;
  bool no_equilibrium_found = false;
};

/// Synchronous best-response iteration from multistart; results verified by
/// is_nash_equilibrium, deduplicated by cluster radius, deterministic order.
/// Emptiness is reported, not proof of nonexistence.
NepResult solve_nep(const SlmfgProblem& p, std::span<const double> x,
                    const RunConfig& cfg);

struct NashVerdict {
  bool feasible = false;
  bool is_equilibrium = false;
  EquilibriumCertificate certificate;
  std::string note;
};

/// Equilibrium test: per-follower best-response gap over the verification
/// grid within tol, plus (when Slater holds at x) a KKT residual within tol.
NashVerdict is_nash_equilibrium(const SlmfgProblem& p, std::span<const double> x,
                                std::span<const double> y, double tol,
                                const RunConfig& cfg);

/// As above with precomputed per-follower Slater verdicts (index-aligned with
/// p.followers); used by grid scans that probe many y at the same x.
NashVerdict is_nash_equilibrium_with_slater(
    const SlmfgProblem& p, std::span<const double> x, std::span<const double> y,
    double tol, const RunConfig& cfg, std::span<const cq::Verdict> slater);

struct GridEquilibrium {
  std::vector<double> y;
  bool boundary_artifact = false;  // box-edge argmin with no active constraint
};

/// Exhaustive per-follower argmin comparison on the grid (the independent
/// oracle).  Separable objectives decompose into per-follower scans; the
/// coupled case enumerates full profiles under a size guard.
std::vector<GridEquilibrium> brute_force_nep(const SlmfgProblem& p,
                                             std::span<const double> x,
                                             const GridSpec& grid,
                                             const RunConfig& cfg);

struct ExistenceBullets {
  std::string follower;
  cq::Verdict feasible_set_nonempty = cq::Verdict::Unknown;
  cq::Verdict feasible_set_convex = cq::Verdict::Unknown;
  cq::Verdict feasible_set_compact = cq::Verdict::Unknown;
  cq::Verdict objective_continuous = cq::Verdict::Holds;  // polynomial
  cq::Verdict objective_convex_in_own = cq::Verdict::Unknown;
  std::vector<double> feasible_point;
  std::string note;
};

struct ExistenceReport {
  std::vector<ExistenceBullets> followers;
  bool all_hold() const;
};

/// Checks the equilibrium-existence hypotheses (compact, convex, nonempty
/// feasible sets; continuous objectives convex in the own block) follower by
/// follower; reported independently of whether equilibria are found.
ExistenceReport check_existence_hypotheses(const SlmfgProblem& p,
                                           std::span<const double> x,
                                           double box_lo, double box_hi,
                                           const RunConfig& cfg);

}  // namespace slmfg::nep
