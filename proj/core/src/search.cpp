#include "search.hpp"

#include <algorithm>
#include <cmath>

namespace slmfg::detail {

namespace {

std::vector<std::vector<double>> sign_directions(std::size_t n) {
  std::vector<std::vector<double>> dirs;
  if (n <= 4) {
    // All nonzero sign patterns; copes with minimax kinks where axis moves
    // alone stall.
    std::vector<int> d(n, -1);
    while (true) {
      bool nonzero = false;
      for (int v : d) nonzero = nonzero || v != 0;
      if (nonzero) {
        std::vector<double> dir(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          dir[i] = d[i];
          norm += dir[i] * dir[i];
        }
        norm = std::sqrt(norm);
        for (auto& v : dir) v /= norm;
        dirs.push_back(std::move(dir));
      }
      std::size_t i = 0;
      while (i < n && d[i] == 1) d[i++] = -1;
      if (i == n) break;
      ++d[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> plus(n, 0.0), minus(n, 0.0);
      plus[i] = 1.0;
      minus[i] = -1.0;
      dirs.push_back(plus);
      dirs.push_back(minus);
    }
  }
  return dirs;
}

}  // namespace

CompassResult compass_minimize(const ScalarFn& f, std::span<const double> lo,
                               std::span<const double> hi,
                               const std::vector<std::vector<double>>& starts,
                               double min_step) {
  const std::size_t n = lo.size();
  const auto dirs = sign_directions(n);

  double extent = 0.0;
  for (std::size_t i = 0; i < n; ++i) extent = std::max(extent, hi[i] - lo[i]);
  if (extent <= 0.0) extent = 1.0;

  CompassResult best;
  best.value = std::numeric_limits<double>::infinity();

  for (const auto& start : starts) {
    std::vector<double> x(start.begin(), start.end());
    for (std::size_t i = 0; i < n; ++i)
      x[i] = std::clamp(x[i], lo[i], hi[i]);
    double fx = f(x);

    double step = extent / 4.0;
    std::vector<double> cand(n);
    while (step >= min_step) {
      bool improved = false;
      for (const auto& d : dirs) {
        for (std::size_t i = 0; i < n; ++i)
          cand[i] = std::clamp(x[i] + step * d[i], lo[i], hi[i]);
        double fc = f(cand);
        if (fc < fx - 1e-15 * (1.0 + std::abs(fx))) {
          x = cand;
          fx = fc;
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx < best.value) {
      best.value = fx;
      best.point = x;
    }
  }

  best.on_boundary = false;
  for (std::size_t i = 0; i < n; ++i) {
    double margin = 1e-6 * (1.0 + hi[i] - lo[i]);
    if (best.point[i] <= lo[i] + margin || best.point[i] >= hi[i] - margin)
      best.on_boundary = true;
  }
  return best;
}

std::vector<double> grid_axis(double lo, double hi, double step) {
  std::vector<double> out;
  long count = std::lround((hi - lo) / step);
  for (long i = 0; i <= count; ++i) {
    double v = lo + static_cast<double>(i) * step;
    if (v > hi + step / 2) break;
    out.push_back(v);
  }
  if (out.empty()) out.push_back(lo);
  return out;
}

void for_each_grid_point(std::span<const double> lo, std::span<const double> hi,
                         double step,
                         const std::function<void(std::span<const double>)>& f) {
  const std::size_t n = lo.size();
  std::vector<std::vector<double>> axes(n);
  for (std::size_t i = 0; i < n; ++i) axes[i] = grid_axis(lo[i], hi[i], step);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> pt(n);
  if (n == 0) {
    f(pt);
    return;
  }
  while (true) {
    for (std::size_t i = 0; i < n; ++i) pt[i] = axes[i][idx[i]];
    f(pt);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace slmfg::detail
