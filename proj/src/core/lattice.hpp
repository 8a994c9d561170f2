#pragma once

// Unimodular lattices in R^n (2 <= n <= 8) and the positive diagonal group A
// in trace-zero log coordinates. Basis vectors are matrix rows throughout.

#include <Eigen/Dense>

#include "errors.hpp"

namespace wellround {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;
inline constexpr double kUnimodularTol = 1e-9;
inline constexpr double kTraceZeroTol = 1e-12;
// Singular values below kRankTol * sigma_max count as zero.
inline constexpr double kRankTol = 1e-7;

class Lattice {
public:
  // Rescales raw_basis to covolume 1. Throws singular_basis if |det| <= 1e-12.
  static Lattice normalize(const Eigen::MatrixXd& raw_basis);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

private:
  explicit Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}
  Eigen::MatrixXd basis_;
};

class DiagonalElement {
public:
  // log_coords must sum to zero within 1e-12.
  explicit DiagonalElement(Eigen::VectorXd log_coords);
  static DiagonalElement identity(int n) { return DiagonalElement(Eigen::VectorXd::Zero(n)); }

  int dim() const { return static_cast<int>(log_.size()); }
  const Eigen::VectorXd& log_coords() const { return log_; }
  Eigen::VectorXd scales() const { return log_.array().exp(); }

  DiagonalElement compose(const DiagonalElement& other) const;
  DiagonalElement inverse() const { return DiagonalElement(-log_); }

private:
  Eigen::VectorXd log_;
};

// a * x: column j of the basis scaled by e^{t_j}.
Lattice apply(const DiagonalElement& a, const Lattice& x);

// Same Z-span test: y = U x with U integer and |det U| = 1, entrywise within tol.
bool same_lattice(const Lattice& x, const Lattice& y, double tol = 1e-8);

// Numerical rank of the row span (singular values below kRankTol * max count as zero).
int numeric_rank(const Eigen::MatrixXd& rows);

}  // namespace wellround
