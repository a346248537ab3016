#pragma once

#include <span>
#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/model.hpp"
#include "slmfg/nep.hpp"

namespace slmfg::gnep {

/// Raised when a reduction's joint-convexity certification does not go
/// through and the caller did not override it.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A plain x-parametrised optimisation problem (leader value substituted).
struct OptProblem {
  std::vector<VarId> vars;
  Expr objective;
  std::vector<Expr> constraints;
};

/// Rosen GNEP with one shared-constraint group, reduced to a single
/// optimisation problem at a fixed leader value: sum-of-objectives subject to
/// all private plus shared constraints.  Requires the objectives to be
/// independent of the other followers and the shared constraints to be
/// jointly convex (certified, unless `assume_jointly_convex`).
OptProblem reduce_rosen_to_opt(const GnepProblem& g, std::span<const double> x,
                               const RunConfig& cfg,
                               bool assume_jointly_convex = false);

/// Grouped shared constraints reduced to a classical NEP over pseudo-
/// followers (one per group): summed objectives, concatenated constraint
/// sets, variables renamed into the group block.  The leader problem is
/// carried over unchanged.
SlmfgProblem reduce_grouped_to_nep(const GnepProblem& g, const RunConfig& cfg,
                                   bool assume_jointly_convex = false);

struct EquivalenceReport {
  std::size_t rgnep_count = 0;
  std::size_t reduced_count = 0;
  std::vector<std::vector<double>> rgnep_only;    // unmatched, original order
  std::vector<std::vector<double>> reduced_only;  // unmatched, original order
  bool joint_convexity_certified = false;
  bool hypothesis_violated = false;  // ran under the override
  double grid_step = 0.0;

  bool sets_coincide() const {
    return rgnep_only.empty() && reduced_only.empty();
  }
};

/// Grid oracle for the reduction theorems: grid-RGNEP membership (per-
/// follower conditional argmin under private + shared feasibility) against
/// the reduced problem's grid solutions, matched within one grid step.
EquivalenceReport check_reduction_equivalence(const GnepProblem& g,
                                              std::span<const double> x,
                                              const nep::GridSpec& grid,
                                              const RunConfig& cfg,
                                              bool assume_jointly_convex = false);

}  // namespace slmfg::gnep
