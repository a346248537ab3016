#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slmfg/expr.hpp"

namespace slmfg {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One follower of the game: objective over (x, y^f, y^{-f}) and private
/// constraints g^f_j(x, y^f) <= 0 that reference only the leader's block and
/// the follower's own block.
struct FollowerProblem {
  std::string id;
  int dim = 1;
  Expr objective;
  std::vector<Expr> constraints;

  std::string block() const { return "y." + id; }
  std::vector<VarId> vars() const;
};

/// Leader decision block, objective over (x, y^F) and feasible set given as
/// g(x) <= 0 expressions plus an optional coordinatewise box.
struct LeaderSpec {
  int dim = 1;
  Expr objective;
  std::vector<Expr> constraints;
  std::optional<std::pair<double, double>> box;

  std::vector<VarId> vars() const;
};

struct SlmfgProblem {
  LeaderSpec leader;
  std::vector<FollowerProblem> followers;

  const FollowerProblem& follower(const std::string& id) const;
  int follower_index(const std::string& id) const;
  /// x block first, then follower blocks in declaration order.
  std::vector<VarId> all_vars() const;
  int follower_offset(int index) const;  // offset of follower block in all_vars
  int total_follower_dim() const;
};

/// A group of followers sharing constraints over (x, y^{F_i}).
struct SharedGroup {
  std::string name;
  std::vector<std::string> members;
  std::vector<Expr> shared_constraints;
};

struct GnepProblem {
  LeaderSpec leader;
  std::vector<FollowerProblem> followers;
  std::vector<SharedGroup> groups;

  const FollowerProblem& follower(const std::string& id) const;
  const SharedGroup& group_of(const std::string& follower_id) const;
  std::vector<VarId> all_vars() const;
};

using Problem = std::variant<SlmfgProblem, GnepProblem>;

/// Structural invariant audit; empty result means the problem is well-formed.
std::vector<std::string> validate(const SlmfgProblem& p);
std::vector<std::string> validate(const GnepProblem& p);
std::vector<std::string> validate(const Problem& p);

/// Throwing wrapper around validate().
void require_valid(const Problem& p, const std::string& origin);

/// Parse / render the on-disk problem format (see the format notes in the
/// repository README).  load_problem throws ParseError with a location or
/// ValidationError naming the violated invariant.
Problem load_problem(const std::string& path);
Problem parse_problem_text(const std::string& text, const std::string& origin);
std::string render_problem(const Problem& p);
void save_problem(const Problem& p, const std::string& path);

bool structurally_equal(const Problem& a, const Problem& b);

/// Helpers for flat point vectors laid out as (x, y^F) or (x, y^F, lam^F).
Assignment assignment_from_point(const SlmfgProblem& p,
                                 std::span<const double> xy);
std::vector<double> leader_part(const SlmfgProblem& p,
                                std::span<const double> xy);
std::vector<double> follower_part(const SlmfgProblem& p, int follower_index,
                                  std::span<const double> xy);

/// Leader feasibility: functional constraints and box within tol.
bool leader_feasible(const SlmfgProblem& p, std::span<const double> x,
                     double tol);

}  // namespace slmfg
