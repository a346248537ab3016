#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace slmfg::linalg {

/// Rank by pivoted elimination with a threshold relative to the largest pivot.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol);

/// Orthonormal basis of the null space of `m` (columns), empty when trivial.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol);

/// Minimum-norm least-squares solution of a x = b.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b);

struct Tolerances {
  double rank_rel = 1e-9;   // relative pivot threshold
  double sign = 1e-9;       // slack on nonnegativity
  double residual = 1e-9;   // consistency of candidate solutions
};

struct BasicSolution {
  std::vector<int> basis;   // column indices, ascending
  Eigen::VectorXd point;    // full-length, zero outside the basis
};

/// All basic feasible solutions of {v >= 0 : a v = b}, enumerated over
/// column subsets of size rank(a) in lexicographic basis order.  For a
/// pointed standard-form polyhedron these are exactly its vertices (with
/// degenerate bases yielding duplicate points; callers deduplicate).
std::vector<BasicSolution> basic_feasible_solutions(const Eigen::MatrixXd& a,
                                                    const Eigen::VectorXd& b,
                                                    const Tolerances& tol);

/// Feasibility of {v >= 0 : a v = b}; exact at desk scale via the basic
/// solution search (a nonempty pointed polyhedron always has one).
bool standard_form_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                            const Tolerances& tol);

/// A point of {lb <= v <= ub : a v = b} if one exists, via slack variables
/// and the basic-solution search.
std::optional<Eigen::VectorXd> box_equality_feasible(const Eigen::MatrixXd& a,
                                                     const Eigen::VectorXd& b,
                                                     const Eigen::VectorXd& lb,
                                                     const Eigen::VectorXd& ub,
                                                     const Tolerances& tol);

/// min over {v >= 0} of ||a v + g||_inf, by exhaustive support enumeration.
/// Exact for the small column counts in scope.
double nonneg_min_residual_inf(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& g,
                               const Tolerances& tol);

/// Weights th >= 0, sum th = 1 with cols*th ~ 0, if they exist.
std::optional<Eigen::VectorXd> zero_in_convex_hull(const Eigen::MatrixXd& cols,
                                                   const Tolerances& tol);

}  // namespace slmfg::linalg
