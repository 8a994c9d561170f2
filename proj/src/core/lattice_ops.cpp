#include "lattice_ops.hpp"

#include <algorithm>
#include <cmath>

namespace wellround {

int dim_delta(const Lattice& x, double delta, const EnumOptions& opts) {
  const int n = x.dim();
  require(delta >= 0.0 && delta <= n + 1.0, ErrorCode::invalid_argument,
          "delta must lie in [0, n+1]");
  return short_vectors(x, delta, opts).dim_at(delta);
}

CoverMembership cover_membership(const Lattice& x, const DiagonalElement& a, double eps,
                                 const EnumOptions& opts) {
  const int n = x.dim();
  require(eps > 0.0 && eps < 1.0 / n, ErrorCode::invalid_argument,
          "eps must lie in (0, 1/n)");
  const Lattice ax = apply(a, x);
  // Breakpoints up to n*eps plus margin decide every candidate j.
  const ShortVectorReport rep = short_vectors(ax, n * eps + 1e-6, opts);

  CoverMembership out;
  out.breakpoints = rep.breakpoints;
  for (int j = 1; j <= n; ++j) {
    const double delta = j * eps;
    bool on_breakpoint = false;
    for (double b : rep.breakpoints)
      if (std::abs(delta - b) <= kBreakpointMargin) on_breakpoint = true;
    if (on_breakpoint) continue;
    if (rep.dim_at(delta) == j) out.all.push_back(j);
  }
  if (!out.all.empty()) out.j = out.all.front();
  return out;
}

bool is_well_rounded(const Lattice& x, double tol, const EnumOptions& opts) {
  require(tol >= 0.0, ErrorCode::invalid_argument, "tol must be nonnegative");
  const ShortVectorReport rep = short_vectors(x, std::min(tol + 1e-6, x.dim() + 1.0), opts);
  const auto mins = rep.minimal_vectors(tol);
  Eigen::MatrixXd rows(static_cast<int>(mins.size()), x.dim());
  for (int i = 0; i < static_cast<int>(mins.size()); ++i) rows.row(i) = mins[i];
  return numeric_rank(rows) == x.dim();
}

namespace {

std::vector<Eigen::VectorXd> minimal_pairs_checked(const Lattice& x, double tol,
                                                   const EnumOptions& opts) {
  require(tol >= 0.0, ErrorCode::invalid_argument, "tol must be nonnegative");
  const ShortVectorReport rep = short_vectors(x, std::min(tol + 1e-6, x.dim() + 1.0), opts);
  auto mins = rep.minimal_vectors(tol);
  Eigen::MatrixXd rows(static_cast<int>(mins.size()), x.dim());
  for (int i = 0; i < static_cast<int>(mins.size()); ++i) rows.row(i) = mins[i];
  require(numeric_rank(rows) == x.dim(), ErrorCode::not_well_rounded,
          "lattice is not well-rounded at this tolerance");
  return mins;
}

}  // namespace

bool is_generic_well_rounded(const Lattice& x, double tol, const EnumOptions& opts) {
  const auto mins = minimal_pairs_checked(x, tol, opts);
  return static_cast<int>(mins.size()) == x.dim();
}

int wr_transversality_rank(const Lattice& x, const EnumOptions& opts) {
  const int n = x.dim();
  const auto mins = minimal_pairs_checked(x, 0.0, opts);
  require(static_cast<int>(mins.size()) == n, ErrorCode::not_generic_well_rounded,
          "lattice is not generic well-rounded");
  // Row i: squared coordinates of v_i minus those of v_n; rank taken on the
  // trace-zero hyperplane.
  Eigen::MatrixXd m(n - 1, n);
  for (int i = 0; i < n - 1; ++i)
    m.row(i) = mins[i].array().square() - mins[n - 1].array().square();
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  return numeric_rank(m * proj);
}

double minkowski_alpha_lower_bound(int n) {
  require(n >= kMinDim && n <= kMaxDim, ErrorCode::invalid_argument, "n out of range");
  return std::pow(n + 1.0, -(n - 1.0));
}

}  // namespace wellround
