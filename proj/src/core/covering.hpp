#pragma once

// Grid-scale cover analysis over simplex-times-box domains: multiplicity
// (order), mesh, Lebesgue number, nerve, component separation, the
// Coxeter-Freudenthal-Kuhn folding map, cover unfolding, and the empirical
// certification of the covering-multiplicity theorem and its KKM-type
// product variant. All topological answers are grid-certified.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace wellround {

struct SimplexFactor {
  int start = 0;   // first axis of the factor
  int count = 0;   // number of axes
  double scale = 1.0;  // simplex is {0 <= x_1 <= ... <= x_count <= scale}
};

class GridDomain {
public:
  // Delta_rho x [-L, L]^t with `resolution` points per unit length.
  static GridDomain simplex_box(int s, int t, double rho, double t_extent, int resolution);
  // Product of two unit CFK simplices (KKM setting).
  static GridDomain kkm(int s1, int s2, int resolution);
  // Plain box window (used by unfold).
  static GridDomain window(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int resolution);

  int dim() const { return static_cast<int>(lo_.size()); }
  int resolution() const { return resolution_; }
  double step() const { return 1.0 / resolution_; }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }
  const std::vector<SimplexFactor>& simplices() const { return simplices_; }
  int simplex_axes() const;  // total axes covered by simplex factors
  int box_axes() const { return dim() - simplex_axes(); }

  std::size_t num_points() const { return points_.size(); }
  Eigen::VectorXd point(std::size_t ordinal) const;
  // Ordinal of the grid point with the given per-axis indices, or -1 when
  // outside the simplex region.
  std::int64_t ordinal_at(const std::vector<int>& axis_idx) const;
  std::vector<int> axis_indices(std::size_t ordinal) const;
  const std::vector<int>& axis_sizes() const { return sizes_; }

  // Axis-adjacent in-domain neighbors of a domain point.
  std::vector<std::size_t> neighbors(std::size_t ordinal) const;

  // Barycentric coordinates of a point w.r.t. one simplex factor
  // (factor coordinates must satisfy the sorted condition).
  std::vector<double> barycentric(int factor, const Eigen::VectorXd& p) const;

private:
  GridDomain() = default;
  void build();
  bool inside(const std::vector<int>& axis_idx) const;

  Eigen::VectorXd lo_, hi_;
  int resolution_ = 32;
  std::vector<SimplexFactor> simplices_;
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint32_t> points_;      // flat indices of in-domain points
  std::vector<std::int32_t> flat_to_ord_;  // -1 outside
};

struct Box {
  Eigen::VectorXd lo, hi;  // open box; +/-1e30 and beyond counts as unbounded
  bool contains(const Eigen::VectorXd& p) const;
  bool bounded() const;
};

struct CoverElement {
  std::string label;
  std::vector<Box> boxes;
  bool contains(const Eigen::VectorXd& p) const;
};

struct Cover {
  std::vector<CoverElement> elements;
};

// Cover evaluated on a grid domain; element sets are kept as membership masks
// over the domain ordinals.
struct GridCover {
  GridDomain domain;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint8_t>> masks;  // [element][ordinal]

  int multiplicity(std::size_t ordinal) const;
};

GridCover materialize(const Cover& cover, const GridDomain& domain);

struct OrderReport {
  int order = 0;
  Eigen::VectorXd witness;
};

// Max multiplicity over the grid; throws not_a_cover when a point is bare.
OrderReport cover_order(const GridCover& gc);

// Supremum of element diameters (unions measured across their boxes).
// Throws unbounded_element.
double cover_mesh(const Cover& cover);

// Largest r such that every induced-metric ball of radius r around a grid
// point is contained in some element, computed on the grid: the containment
// radius of x in E is the distance to the nearest domain point outside E,
// saturating at the domain radius around x when E covers everything.
double cover_lebesgue(const GridCover& gc);

struct SimplicialComplex {
  std::set<std::vector<int>> faces;  // sorted index sets, downward closed
  int order() const;                 // 1 + max face dimension
};

SimplicialComplex nerve(const GridCover& gc);

// Disjoint open E_i with G_i \ Z <= E_i <= G_i, via the separation rule
// E_i = {x in G_i : d(x, F_i) < d(x, F \ F_i)}, F_i = G_i \ Z on the grid.
// Throws hypothesis_violated when some G_i and G_j intersect outside Z.
std::vector<std::vector<std::uint8_t>> separate_components(
    const std::vector<CoverElement>& groups, const CoverElement& z, const GridDomain& domain);

// Triangle-wave fold of each coordinate into [0,1], then ascending sort;
// lands in the unit CFK simplex and is invariant under the facet-reflection
// group actions.
Eigen::VectorXd fold_to_cfk(const Eigen::VectorXd& x);

// Pullback of a cover of (unit CFK simplex)^s x R^t through the folding map,
// materialized on a window grid. The window must span at least one full
// reflection tile (extent 2) in every folded axis.
GridCover unfold_cover(const Cover& cover, const GridDomain& source, const GridDomain& window);

struct ComponentFit {
  std::vector<int> elements;  // nerve face defining the k-fold intersection
  int k = 0;
  int component_size = 0;
  int fitted_dim = 0;
  double max_residual = 0.0;
};

struct CertifyReport {
  int order = 0;
  Eigen::VectorXd witness;
  int s = 0, t = 0;
  bool hypotheses_checked = false;
  bool hyp_i_ok = true;
  std::vector<int> hyp_i_failures;       // element indices with a bad component
  std::vector<ComponentFit> hyp_ii;      // per-component empirical almost-affine fit
  bool violated = false;                 // order <= s+t although hypotheses hold
};

CertifyReport certify_multiplicity(const GridCover& gc, bool check_hypotheses);

struct KkmReport {
  int order = 0;
  Eigen::VectorXd witness;
  int required = 0;  // dim Delta_1 + dim Delta_2 + 1
  bool satisfied = false;
};

// face_misses[e][f] = declared missed face of factor f for element e
// (-1 where the factor is a point). Declarations are verified on the grid;
// a false one raises declaration_false.
KkmReport kkm_check(const GridCover& gc, const std::vector<std::array<int, 2>>& face_misses);

}  // namespace wellround
