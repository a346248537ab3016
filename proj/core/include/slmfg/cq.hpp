#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/model.hpp"

namespace slmfg::cq {

enum class Verdict { Holds, Fails, Unknown };
std::string verdict_name(Verdict v);

/// Slater's CQ for one follower at a fixed leader decision: existence of a
/// strictly feasible point of Y^f(x).
struct SlaterReport {
  std::string follower;
  std::vector<double> x;
  Verdict verdict = Verdict::Unknown;
  std::vector<double> witness;              // strictly feasible point (Holds)
  double max_constraint_value = 0.0;        // max_j g_j at the witness/minimax
  std::string note;
};

/// Minimise max_j g^f_j(x, .) by multistart pattern search over the box.
/// A value < -1e-10 is a Holds witness.  Failure is only certified when all
/// constraints are convex-certified and the located minimax point carries a
/// first-order certificate (0 in the convex hull of the near-active
/// gradients), so the sampled minimum is the global one; otherwise Unknown.
SlaterReport check_slater(const SlmfgProblem& p, const std::string& follower,
                          std::span<const double> x, double box_lo,
                          double box_hi, int samples, const RunConfig& cfg);

struct SubsetRank {
  std::vector<int> subset;   // active-set indices
  int rank_at_point = 0;
  int sampled_min_rank = 0;
  int sampled_max_rank = 0;
};

struct CrcqViolation {
  std::vector<int> subset;
  std::vector<double> point1, point2;  // (x, y^f) pairs
  int rank1 = 0, rank2 = 0;
};

struct CrcqReport {
  std::string follower;
  std::vector<double> x, y;
  std::vector<int> active;
  std::vector<SubsetRank> subset_ranks;
  bool violation_found = false;   // ViolationWitness vs ConsistentWithCRCQ
  CrcqViolation violation;
  int samples = 0;
  double radius = 0.0;
};

/// Enumerate all active-set subsets and compare the numerical rank of the
/// gradient matrix at the point against `samples` draws from the radius
/// neighborhood of (x, y^f).  A discrepancy is a CRCQ violation witness;
/// none is "consistent with CRCQ" (sampling cannot certify the universal
/// neighborhood claim).
CrcqReport check_crcq(const SlmfgProblem& p, const std::string& follower,
                      std::span<const double> x, std::span<const double> y_f,
                      double radius, int samples, std::uint64_t seed,
                      const RunConfig& cfg);

/// The alternative global-equivalence conditions discussed alongside the
/// Slater route: per follower, (a) objective convexity in the own block,
/// (b) joint convexity of max_j g_j in (x, y^f), (c) existence of a strictly
/// feasible (x, y^f) pair.
struct SvenssonConditions {
  std::string follower;
  Verdict objective_convex = Verdict::Unknown;
  Verdict joint_max_convex = Verdict::Unknown;
  Verdict strict_pair_exists = Verdict::Unknown;
  std::vector<double> strict_pair;           // (x, y^f) witness for (c)
  std::vector<double> midpoint_u, midpoint_v;  // joint-convexity violation pair
  std::string note;
};

struct SvenssonReport {
  std::vector<SvenssonConditions> followers;
};

SvenssonReport check_svensson(const SlmfgProblem& p, double box_lo,
                              double box_hi, int samples, const RunConfig& cfg);

}  // namespace slmfg::cq
