#pragma once

#include <span>
#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/cq.hpp"
#include "slmfg/model.hpp"
#include "slmfg/mpcc.hpp"
#include "slmfg/nep.hpp"

namespace slmfg::verify {

class InfeasibleBasePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid-scan verdict on local minimality.  "No better neighbor found" is a
/// sampling statement, never a certificate.
struct LocalMinVerdict {
  bool better_found = false;
  std::vector<double> better_point;  // (x, y) or (x, y, lam)
  double objective_gap = 0.0;        // base objective minus witness objective
  long feasible_neighbors_tested = 0;
  double radius = 0.0;
  double step = 0.0;
};

/// Scan the radius-ball grid around (x, y); a neighbor counts only if its x
/// is leader-feasible and it passes the Nash-equilibrium test.  The grid is
/// backstopped by an equilibrium-manifold probe: exact best responses at each
/// scanned x, so equilibria that fall between grid points are not missed.
/// Witnesses re-verify; scan order is lexicographic.
LocalMinVerdict is_local_min_slmfg(const SlmfgProblem& p,
                                   std::span<const double> point, double radius,
                                   double step, const RunConfig& cfg);

/// Same scan in (x, y, lam) space for the reformulation.  The leader
/// objective does not involve lam, so neighbors are grid points in (x, y)
/// completed by an exact multiplier search inside the per-coordinate box
/// [max(0, lam_j - radius), lam_j + radius].
LocalMinVerdict is_local_min_mpcc(const mpcc::MpccProblem& m,
                                  std::span<const double> point, double radius,
                                  double step, const RunConfig& cfg);

enum class GateStatus { Transferred, HypothesisFailed, ConclusionRefuted };
std::string gate_status_name(GateStatus s);

struct HypothesisCheck {
  std::string name;
  cq::Verdict verdict = cq::Verdict::Unknown;
  std::string detail;
};

/// Executable theorem check: hypotheses are tested numerically, then the
/// conclusion.  ConclusionRefuted can only appear when every checkable
/// hypothesis holds; on this corpus it would flag a toolkit defect.
struct TheoremGateReport {
  std::string theorem;
  std::vector<HypothesisCheck> hypotheses;
  bool conclusion_tested = false;
  bool conclusion_holds = false;
  std::string conclusion_detail;
  GateStatus status = GateStatus::HypothesisFailed;
  std::string status_detail;
  std::vector<std::vector<double>> multipliers_tested;  // flat per profile
  std::vector<double> failing_multiplier;
};

/// Local SLMFG solution + convexity + Slater at x imply some multiplier makes
/// the point a local MPCC solution; tested at one multiplier per vertex.
TheoremGateReport gate_t21(const SlmfgProblem& p, std::span<const double> xy,
                           const RunConfig& cfg);

/// Global MPCC solution + convexity + Slater at every sampled leader-feasible
/// x imply a global SLMFG solution (grid-global over the box).
TheoremGateReport gate_t22(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xyl, double box_lo,
                           double box_hi, double step, const RunConfig& cfg);

/// Local MPCC minimality for every multiplier (vertices plus sampled interior
/// points) transfers local minimality to the SLMFG.
TheoremGateReport gate_t23(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xy, double radius,
                           int n_multiplier_samples, const RunConfig& cfg);

/// Vertex multipliers plus CRCQ transfer local minimality to the SLMFG.
TheoremGateReport gate_t24(const SlmfgProblem& p, const mpcc::MpccProblem& m,
                           std::span<const double> xy, double radius,
                           const RunConfig& cfg);

/// One step of a feasible-sequence probe: the equilibrium and multipliers
/// forced at a given leader value, with residuals and the leader objective.
struct SequenceProbeStep {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lambda;      // concatenated per follower
  double kkt_total = 0.0;
  double leader_objective = 0.0;
  bool mpcc_feasible = false;
  bool multiplier_unique = true;
};

/// Follow a sequence of leader values: solve the NEP, pick the multiplier
/// vertex (flagging ambiguity), and record MPCC feasibility and objective.
/// Used to exhibit sequences that converge to a flagged point from strictly
/// better feasible points.
std::vector<SequenceProbeStep> sequence_probe(
    const SlmfgProblem& p, const mpcc::MpccProblem& m,
    const std::vector<std::vector<double>>& xs, const RunConfig& cfg);

}  // namespace slmfg::verify
