#pragma once

// Closed A-orbits: block decompositions with the T1 (homothety, divergent) /
// T2 (per-block determinant one, compact orbit) split, compact orbits from
// real quadratic orders, and the well-rounded search over an orbit.

#include <cstdint>
#include <utility>
#include <vector>

#include "enumeration.hpp"
#include "lattice.hpp"

namespace wellround {

struct ClosedOrbitStructure {
  std::vector<std::vector<int>> blocks;          // ordered partition of 1..n, 1-based
  std::vector<Eigen::VectorXd> t2_stabilizer_gens;  // log coordinates, one per 2-dim block

  int n() const;
  int t1_dim() const { return static_cast<int>(blocks.size()) - 1; }
  int t2_dim() const { return n() - static_cast<int>(blocks.size()); }

  // Checks the partition, that generators lie in T2, and that each generator
  // stabilizes x up to an integer unimodular basis change.
  void validate(const Lattice& x) const;
};

// x^2 - D y^2 = norm with norm in {+1,-1}, the fundamental solution.
struct PellUnit {
  std::int64_t x = 0, y = 0;
  int norm = 1;
};
PellUnit pell_fundamental_unit(std::int64_t d);

// Building block of a closed-orbit lattice: a covolume-1 basis plus its local
// block partition and stabilizer generators.
struct OrbitPart {
  Eigen::MatrixXd basis;
  std::vector<std::vector<int>> blocks;
  std::vector<Eigen::VectorXd> gens;

  static OrbitPart unit();                    // Z^1
  static OrbitPart quadratic(std::int64_t d);  // embeddings of Z[sqrt(D)]
  static OrbitPart from(const Lattice& x, const ClosedOrbitStructure& s);
};

// Direct sum with shifted coordinates; the result has covolume 1 because the
// parts do. Pre: at least one part, total dimension in [2,8].
std::pair<Lattice, ClosedOrbitStructure> block_sum(const std::vector<OrbitPart>& parts);

// Compact T2-orbit for the order Z[sqrt(D)]; single block, n = 2. The
// generator is log of the fundamental unit, squared when its norm is -1 (so
// both embeddings are positive). Throws not_squarefree.
std::pair<Lattice, ClosedOrbitStructure> compact_orbit_from_quadratic(std::int64_t d);

// Greedy independent-minima ratio ||v_n|| / ||v_1||; 1 iff well-rounded.
double spread(const Lattice& x, const EnumOptions& opts = {});

// spread, except that enumeration stops once the ratio provably exceeds
// `cap`; returns a value >= cap in that case. Exact whenever the true spread
// is below the cap.
double spread_bounded(const Lattice& x, double cap, const EnumOptions& opts = {});

struct SearchResult {
  DiagonalElement a_star;
  Lattice lattice;            // a_star * x
  double spread_value = 1.0;  // recomputed from `lattice`
  std::uint64_t evaluations = 0;
  bool converged = false;     // spread - 1 <= target_tol within budget
  std::vector<std::pair<Eigen::VectorXd, double>> trace;  // (log coords, spread)
};

struct SearchOptions {
  std::uint64_t budget = 10000;  // objective evaluations, >= 100
  std::uint64_t seed = 0;
  double target_tol = 1e-9;
  bool record_trace = false;
  // Spread evaluations during the search are capped here (cells this far
  // from well-rounded only need a coarse value); the reported result is
  // always the exact spread at the returned point.
  double objective_cap = 32.0;
};

// Coarse grid over Delta_rho x (T2 fundamental parallelepiped), then
// Nelder-Mead refinement of log(spread) from the best cells with restarts.
// Deterministic given the seed. Budget exhaustion is reported through
// `converged`, never as an error; the best-so-far result is returned.
SearchResult search_well_rounded(const Lattice& x, const ClosedOrbitStructure& s,
                                 const SearchOptions& opts);

}  // namespace wellround
