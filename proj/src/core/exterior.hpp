#pragma once

// Sign-quotiented exterior-power vectors (Plucker coordinates), the diagonal
// characters chi_J, stabilizer subspaces of wedge classes and flags, and the
// nested multi-index construction behind the flag codimension bound.

#include <map>
#include <optional>
#include <vector>

#include "lattice.hpp"

namespace wellround {

// Support threshold, relative to the wedge norm.
inline constexpr double kSupportTol = 1e-10;

class MultiIndex {
public:
  // 1-based, strictly increasing, nonempty.
  explicit MultiIndex(std::vector<int> indices);
  static MultiIndex full(int n);

  int order() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& indices() const { return idx_; }
  int max_index() const { return idx_.back(); }
  bool contains(int i) const;
  bool subset_of(const MultiIndex& other) const;

  bool operator<(const MultiIndex& other) const { return idx_ < other.idx_; }
  bool operator==(const MultiIndex& other) const { return idx_ == other.idx_; }

private:
  std::vector<int> idx_;
};

// All multi-indices of order d in 1..n, lexicographic.
std::vector<MultiIndex> all_multiindices(int n, int d);

// chi_J(a) = det(a restricted to R^J) = exp(sum_{i in J} t_i).
double chi(const MultiIndex& j, const DiagonalElement& a);

// Element of the d-th exterior power of R^n modulo w ~ -w. Canonical sign:
// the lexicographically first coefficient above the support threshold is
// positive.
class WedgeClass {
public:
  WedgeClass(int n, int d, std::map<MultiIndex, double> coeffs);

  // Plucker vector of span{rows}: coeffs[J] = det of the d x d minor with
  // columns J. Throws rank_deficient when the rows are dependent.
  static WedgeClass wedge_of_group(const Eigen::MatrixXd& rows);

  int n() const { return n_; }
  int d() const { return d_; }
  double coeff(const MultiIndex& j) const;
  const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }
  double norm() const;
  std::vector<MultiIndex> support() const;
  // Coefficient J scaled by chi_J(a); support is preserved.
  WedgeClass acted_by(const DiagonalElement& a) const;

private:
  int n_, d_;
  std::map<MultiIndex, double> coeffs_;
};

// Norm of the wedge of the rows = covolume of the subgroup they generate.
double covolume(const Eigen::MatrixXd& rows);

struct StabilizerSubspace {
  int dimension = 0;
  Eigen::MatrixXd basis;  // dimension x n, orthonormal rows, trace-zero
};

// Kernel of {sum_i t_i = 0} together with {sum_{i in J} t_i = 0 : J in supports}.
StabilizerSubspace stabilizer_subspace(int n, const std::vector<MultiIndex>& supports);

// Nested subspaces 0 < L_1 < ... < L_k < R^n, each level a row-basis matrix.
class Flag {
public:
  static Flag from_levels(int n, std::vector<Eigen::MatrixXd> levels);
  // Complete flag from n independent rows: L_d = span of the first d rows.
  static Flag from_chain(const Eigen::MatrixXd& rows);

  int n() const { return n_; }
  int length() const { return static_cast<int>(levels_.size()); }
  const std::vector<Eigen::MatrixXd>& levels() const { return levels_; }
  bool is_complete() const;
  // The generating rows when built via from_chain.
  const std::optional<Eigen::MatrixXd>& chain() const { return chain_; }

private:
  Flag(int n, std::vector<Eigen::MatrixXd> levels, std::optional<Eigen::MatrixXd> chain)
      : n_(n), levels_(std::move(levels)), chain_(std::move(chain)) {}
  int n_ = 0;
  std::vector<Eigen::MatrixXd> levels_;
  std::optional<Eigen::MatrixXd> chain_;
};

enum class MinorArithmetic {
  exact,     // rationals built from the exact binary value of each entry
  floating,  // doubles with the 1e-10 minor-magnitude threshold
};

// Reverse-inductive construction: J_n = (1..n) and J_d is the lex-first
// size-d sub-multi-index of J_{d+1} whose chain minor is nonzero; every
// returned J_d lies in supp(w_{L_d}). Requires a complete chain flag.
// Floating mode throws numerically_singular_minor when all candidate minors
// fall below the threshold.
std::vector<MultiIndex> nested_multiindices(const Flag& flag,
                                            MinorArithmetic mode = MinorArithmetic::exact);

struct FlagCodimReport {
  int codim = 0;
  bool satisfies = false;  // codim >= flag length
  int stabilizer_dim = 0;
};

FlagCodimReport flag_codim_check(const Flag& flag);

// Sampling axis for a subgroup of A in log coordinates.
struct GridAxis {
  Eigen::VectorXd direction;  // trace-zero log direction
  double lo = 0.0, hi = 1.0;
  int samples = 8;
};

struct SublevelCheckResult {
  enum class Status { satisfied, exceeded, empty_sublevel };
  Status status = Status::empty_sublevel;
  double max_distance = 0.0;
  int members = 0;
  Eigen::VectorXd coset_offset;
};

// Samples a over the grid, collects S = {a : for all i, ||a w_{Lambda_i}|| <= C},
// fits the coset (centroid) + stabilizer directions of the joint support, and
// compares the worst distance against R.
SublevelCheckResult sublevel_almost_affine_check(const Lattice& x,
                                                 const std::vector<Eigen::MatrixXd>& groups,
                                                 double C, const std::vector<GridAxis>& grid,
                                                 double R);

}  // namespace wellround
