#include "slmfg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slmfg::linalg {

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(rel_tol);
  return static_cast<int>(lu.rank());
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(rel_tol);
  Eigen::MatrixXd k = lu.kernel();
  if (static_cast<int>(lu.rank()) == m.cols()) {
    return Eigen::MatrixXd(m.cols(), 0);
  }
  // Orthonormalise for stable direction sampling.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(k.rows(), k.cols());
  return q;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b) {
  if (a.cols() == 0) return Eigen::VectorXd(0);
  return a.completeOrthogonalDecomposition().solve(b);
}

namespace {

// Visit all k-subsets of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& a,
                               const std::vector<int>& cols) {
  Eigen::MatrixXd s(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) s.col(i) = a.col(cols[i]);
  return s;
}

}  // namespace

std::vector<BasicSolution> basic_feasible_solutions(const Eigen::MatrixXd& a,
                                                    const Eigen::VectorXd& b,
                                                    const Tolerances& tol) {
  std::vector<BasicSolution> out;
  const int n = static_cast<int>(a.cols());
  const int r = numerical_rank(a, tol.rank_rel);
  const double bscale =
      1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);

  if (r == 0) {
    if (b.size() == 0 || b.cwiseAbs().maxCoeff() <= tol.residual * bscale) {
      out.push_back({{}, Eigen::VectorXd::Zero(n)});
    }
    return out;
  }

  for_each_subset(n, r, [&](const std::vector<int>& basis) {
    Eigen::MatrixXd ab = select_columns(a, basis);
    if (numerical_rank(ab, tol.rank_rel) != r) return;
    Eigen::VectorXd vb = least_squares(ab, b);
    if ((ab * vb - b).cwiseAbs().maxCoeff() > tol.residual * bscale) return;
    if (vb.minCoeff() < -tol.sign) return;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < basis.size(); ++i) full[basis[i]] = vb[i];
    out.push_back({basis, std::move(full)});
  });
  return out;
}

bool standard_form_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                            const Tolerances& tol) {
  // Shortcut: b outside the column space means no solution at all.
  Eigen::MatrixXd ab(a.rows(), a.cols() + 1);
  ab.leftCols(a.cols()) = a;
  ab.col(a.cols()) = b;
  if (numerical_rank(ab, tol.rank_rel) > numerical_rank(a, tol.rank_rel))
    return false;
  return !basic_feasible_solutions(a, b, tol).empty();
}

std::optional<Eigen::VectorXd> box_equality_feasible(const Eigen::MatrixXd& a,
                                                     const Eigen::VectorXd& b,
                                                     const Eigen::VectorXd& lb,
                                                     const Eigen::VectorXd& ub,
                                                     const Tolerances& tol) {
  const int n = static_cast<int>(a.cols());
  for (int j = 0; j < n; ++j)
    if (lb[j] > ub[j] + tol.sign) return std::nullopt;

  // Shift to w = v - lb >= 0 and add slacks s for w + s = ub - lb:
  //   [a 0; I I] [w; s] = [b - a lb; ub - lb].
  const int m = static_cast<int>(a.rows());
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(m + n, 2 * n);
  big.topLeftCorner(m, n) = a;
  big.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  big.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(m + n);
  rhs.head(m) = b - a * lb;
  rhs.tail(n) = ub - lb;

  auto bfs = basic_feasible_solutions(big, rhs, tol);
  if (bfs.empty()) return std::nullopt;
  Eigen::VectorXd v = bfs.front().point.head(n) + lb;
  return v;
}

double nonneg_min_residual_inf(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& g,
                               const Tolerances& tol) {
  double best = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  const int n = static_cast<int>(a.cols());
  for (int k = 1; k <= n; ++k) {
    for_each_subset(n, k, [&](const std::vector<int>& support) {
      Eigen::MatrixXd as = select_columns(a, support);
      Eigen::VectorXd v = least_squares(as, -g);
      if (v.size() && v.minCoeff() < -tol.sign) return;
      double resid = (as * v + g).cwiseAbs().maxCoeff();
      best = std::min(best, resid);
    });
  }
  return best;
}

std::optional<Eigen::VectorXd> zero_in_convex_hull(const Eigen::MatrixXd& cols,
                                                   const Tolerances& tol) {
  // th >= 0 with [cols; 1...1] th = [0; 1].
  const int n = static_cast<int>(cols.cols());
  if (n == 0) return std::nullopt;
  Eigen::MatrixXd a(cols.rows() + 1, n);
  a.topRows(cols.rows()) = cols;
  a.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(cols.rows() + 1);
  b[cols.rows()] = 1.0;
  auto bfs = basic_feasible_solutions(a, b, tol);
  if (bfs.empty()) return std::nullopt;
  return bfs.front().point;
}

}  // namespace slmfg::linalg
