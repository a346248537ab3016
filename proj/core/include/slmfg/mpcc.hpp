#pragma once

#include <span>
#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/model.hpp"

namespace slmfg::mpcc {

class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-level reformulation of an SLMFG: the leader objective subject to,
/// per follower, stationarity of the Lagrangian in the follower's own block,
/// feasibility g^f <= 0, sign lam^f >= 0 and the aggregated complementarity
/// <lam^f, g^f> = 0.  Multiplier blocks are named "lam.<follower id>".
struct MpccProblem {
  SlmfgProblem game;
  std::vector<std::vector<Expr>> stationarity;  // [follower][own coordinate]
  std::vector<Expr> complementarity;            // one scalar per follower

  std::vector<VarId> multiplier_vars(int follower_index) const;
  /// Point layout: x block, follower blocks, then multiplier blocks.
  std::vector<VarId> point_vars() const;
  int point_dim() const;
  const Expr& objective() const { return game.leader.objective; }
};

/// Symbolic construction of the reformulation (stationarity built via grad).
MpccProblem build_mpcc(const SlmfgProblem& p);

/// Componentwise violations of the reformulation's constraint system at a
/// point; `total()` is the max of the components.
struct KktResidual {
  double stationarity_norm = 0.0;
  double feasibility_violation = 0.0;
  double sign_violation = 0.0;
  double complementarity_gap = 0.0;
  double total() const;
};

KktResidual kkt_residual(const MpccProblem& m, std::span<const double> point);

/// kkt_residual total <= tol and the leader constraints hold at x.
bool is_mpcc_feasible(const MpccProblem& m, std::span<const double> point,
                      double tol);

/// Problem-format file with an appended `mpcc` section listing the
/// stationarity and complementarity expressions verbatim.
std::string render_mpcc(const MpccProblem& m);
void save_mpcc(const MpccProblem& m, const std::string& path);

/// Load a reformulation file; the listed expressions are checked against a
/// rebuild from the embedded problem and a mismatch is a validation error.
MpccProblem load_mpcc(const std::string& path);

}  // namespace slmfg::mpcc
