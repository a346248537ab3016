#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slmfg/config.hpp"
#include "slmfg/model.hpp"

namespace slmfg::multipliers {

class InfeasiblePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmptyPolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Indices of the constraints active at a point, |g^f_j| <= activity_tol.
struct ActiveSet {
  std::string follower;
  std::vector<int> indices;  // 0-based, ascending
  double activity_tol = 0.0;
};

/// The multiplier set of one follower at (x, y) in active/inactive split
/// form: { lam >= 0, A lam_active = b, lam_inactive = 0 }, where the columns
/// of A are the active constraint gradients in the follower's own variables
/// and b is the negated objective gradient.
struct MultiplierPolytope {
  std::string follower;
  int num_constraints = 0;  // p^f
  ActiveSet active;
  Eigen::MatrixXd a;        // n_f x |active|
  Eigen::VectorXd b;        // n_f

  /// Expand an active-coordinate vector to the full p^f-length multiplier.
  std::vector<double> expand(const Eigen::VectorXd& lam_active) const;
  /// Membership at tolerance: equality residual, sign, inactive zeros.
  bool contains(std::span<const double> lam, double tol) const;
};

/// Assemble the polytope by evaluating the symbolic gradients at the point.
/// `y_full` is the whole follower profile (the objective may reference other
/// followers); throws InfeasiblePointError if the point violates Y^f(x).
MultiplierPolytope multiplier_polytope(const SlmfgProblem& p,
                                       const std::string& follower,
                                       std::span<const double> x,
                                       std::span<const double> y_full,
                                       double activity_tol, double feas_tol);

/// Exact emptiness at desk scale (exhaustive basic-solution search).
bool is_empty(const MultiplierPolytope& poly, const RunConfig& cfg);

/// All vertices, via the basic/nonbasic column decomposition: for every
/// column subset B with |B| = rank(A) and A_B of full column rank, solve
/// A_B lam_B = b, keep nonnegative solutions, zero-fill, deduplicate.
/// Deterministic (lexicographic by basis).  Throws EmptyPolytopeError.
std::vector<std::vector<double>> enumerate_vertices(
    const MultiplierPolytope& poly, const RunConfig& cfg);

/// n random convex combinations of the vertices, deterministic per seed.
std::vector<std::vector<double>> sample_multipliers(
    const MultiplierPolytope& poly, int n, std::uint64_t seed,
    const RunConfig& cfg);

/// A point of the polytope within the coordinate box [lb, ub], if any
/// (exact small-LP feasibility).  Used by the MPCC local-minimality scan to
/// complete a neighbor with a multiplier from the scan ball.
std::optional<std::vector<double>> point_in_box(const MultiplierPolytope& poly,
                                                std::span<const double> lb,
                                                std::span<const double> ub,
                                                const RunConfig& cfg);

}  // namespace slmfg::multipliers
