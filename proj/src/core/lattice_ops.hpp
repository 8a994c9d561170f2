#pragma once

// Delta-graded invariants of a lattice and the diagonal-group cover built
// from them: dim_delta, membership in U_j, well-roundedness tests, and the
// transversality rank used by the generic well-rounded analysis.

#include <optional>
#include <vector>

#include "enumeration.hpp"
#include "lattice.hpp"

namespace wellround {

// Margin below which j*eps counts as sitting on a breakpoint.
inline constexpr double kBreakpointMargin = 1e-9;

// Rank of span{v : ||v|| < (1+delta)*alpha(x)}. Pre: 0 <= delta <= n+1.
int dim_delta(const Lattice& x, double delta, const EnumOptions& opts = {});

struct CoverMembership {
  std::optional<int> j;       // smallest qualifying index, if any
  std::vector<int> all;       // every qualifying index, ascending
  std::vector<double> breakpoints;
};

// Indices j with dim_{j*eps}(a x) = j and j*eps further than the margin from
// every breakpoint of delta -> dim_delta(a x). Pre: 0 < eps < 1/n.
CoverMembership cover_membership(const Lattice& x, const DiagonalElement& a, double eps,
                                 const EnumOptions& opts = {});

// True iff {v : ||v|| <= (1+tol)*alpha(x)} spans R^n.
bool is_well_rounded(const Lattice& x, double tol, const EnumOptions& opts = {});

// True iff exactly n +/- pairs attain length <= (1+tol)*alpha(x) and they are
// linearly independent. Pre: is_well_rounded(x, tol); else not_well_rounded.
bool is_generic_well_rounded(const Lattice& x, double tol, const EnumOptions& opts = {});

// Rank of the n-1 functionals t -> sum_j t_j (v_i)_j^2 - sum_j t_j (v_n)_j^2
// on the trace-zero hyperplane, for the minimal vectors v_1..v_n of a generic
// well-rounded lattice. Throws not_generic_well_rounded otherwise.
int wr_transversality_rank(const Lattice& x, const EnumOptions& opts = {});

// Certified positive lower bound for alpha on U_n^(eps), eps < 1: a lattice
// with n independent vectors of length at most (n+1)*alpha and covolume 1
// satisfies, via Hadamard's inequality applied to the sublattice they span,
// 1 <= |det| <= alpha * ((n+1) alpha)^{n-1}, hence
// alpha >= (n+1)^{-(n-1)/n} >= (n+1)^{-(n-1)}. The latter, weaker constant is
// the one certified here.
double minkowski_alpha_lower_bound(int n);

}  // namespace wellround
