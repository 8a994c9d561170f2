#pragma once

// Shortest-vector machinery: LLL preprocessing, Fincke-Pohst style
// branch-and-bound enumeration, and the delta-graded short-vector report.

#include <cstdint>
#include <vector>

#include "lattice.hpp"

namespace wellround {

inline constexpr std::uint64_t kDefaultEnumBudget = 1'000'000;

struct EnumOptions {
  std::uint64_t node_budget = kDefaultEnumBudget;
};

// LLL-reduced copy of `basis` together with the unimodular transform U
// (reduced = U * basis). No reduction-quality guarantee is claimed; this is
// a preprocessing step that keeps enumeration trees small.
struct ReducedBasis {
  Eigen::MatrixXd basis;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> transform;
};
ReducedBasis lll_reduce(const Eigen::MatrixXd& basis, double delta = 0.99);

// All nonzero lattice vectors with ||v|| < radius, one per +/- pair, as
// integer coefficient vectors w.r.t. `basis` rows. Canonical rep: last
// nonzero coefficient positive. Throws enumeration_budget_exceeded.
std::vector<Eigen::VectorXi> enumerate_below(const Eigen::MatrixXd& basis, double radius,
                                             const EnumOptions& opts = {});

struct ShortVectorReport {
  double alpha = 0.0;                    // length of a shortest nonzero vector
  double delta_max = 0.0;                // enumeration range used
  std::vector<Eigen::VectorXd> vectors;  // one per +/- pair, ||v|| < (1+delta_max)*alpha
  std::vector<Eigen::VectorXi> coords;   // integer coordinates w.r.t. the lattice basis
  std::vector<double> breakpoints;       // distinct ||v||/alpha - 1, ascending, starts at 0

  // Rank of {v : ||v|| < (1+delta)*alpha}; requires delta <= delta_max.
  int dim_at(double delta) const;
  // Vectors with ||v|| <= (1+tol)*alpha*(1+1e-9) (equality tolerated up to float noise).
  std::vector<Eigen::VectorXd> minimal_vectors(double tol) const;
};

// Enumerates one representative per +/- pair of every nonzero v with
// ||v|| < (1+delta_max)*alpha(x). Pre: 0 <= delta_max <= n+1.
ShortVectorReport short_vectors(const Lattice& x, double delta_max, const EnumOptions& opts = {});

// Length of a shortest nonzero vector.
double shortest_length(const Lattice& x, const EnumOptions& opts = {});

// Same, for a raw (ideally pre-reduced) basis.
double shortest_length_of_basis(const Eigen::MatrixXd& basis, const EnumOptions& opts = {});

}  // namespace wellround
