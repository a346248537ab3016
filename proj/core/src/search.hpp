// Internal derivative-free search helpers shared by the CQ checkers and the
// equilibrium solvers.  Not installed.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace slmfg::detail {

using ScalarFn = std::function<double(std::span<const double>)>;

struct CompassResult {
  std::vector<double> point;
  double value = 0.0;
  bool on_boundary = false;  // stopped within one final step of the box edge
};

/// Pattern search over a box with sign-pattern directions (axis directions
/// plus diagonals for small dimensions).  Handles nonsmooth convex targets
/// like max-of-smooth; first-improvement moves keep it deterministic.
CompassResult compass_minimize(const ScalarFn& f, std::span<const double> lo,
                               std::span<const double> hi,
                               const std::vector<std::vector<double>>& starts,
                               double min_step = 1e-9);

/// Visit every point of the grid {lo_i, lo_i+step, ..., <= hi_i + step/2}.
void for_each_grid_point(std::span<const double> lo, std::span<const double> hi,
                         double step,
                         const std::function<void(std::span<const double>)>& f);

/// Grid coordinates along one axis, inclusive of both ends.
std::vector<double> grid_axis(double lo, double hi, double step);

}  // namespace slmfg::detail
