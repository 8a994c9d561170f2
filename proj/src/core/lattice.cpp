#include "lattice.hpp"

#include <cmath>

namespace wellround {

Lattice Lattice::normalize(const Eigen::MatrixXd& raw_basis) {
  require(raw_basis.rows() == raw_basis.cols(), ErrorCode::invalid_argument,
          "basis must be square");
  const int n = static_cast<int>(raw_basis.rows());
  require(n >= kMinDim && n <= kMaxDim, ErrorCode::invalid_argument,
          "dimension must be in [2,8]");
  const double det = raw_basis.determinant();
  require(std::abs(det) > 1e-12, ErrorCode::singular_basis, "basis is singular");
  const double scale = std::pow(std::abs(det), 1.0 / n);
  Lattice out(raw_basis / scale);
  require(std::abs(std::abs(out.basis_.determinant()) - 1.0) <= kUnimodularTol,
          ErrorCode::singular_basis, "normalization failed to reach covolume 1");
  return out;
}

DiagonalElement::DiagonalElement(Eigen::VectorXd log_coords) : log_(std::move(log_coords)) {
  const int n = static_cast<int>(log_.size());
  require(n >= kMinDim && n <= kMaxDim, ErrorCode::invalid_argument,
          "dimension must be in [2,8]");
  require(std::abs(log_.sum()) <= kTraceZeroTol * std::max(1.0, log_.cwiseAbs().maxCoeff()) ||
              std::abs(log_.sum()) <= kTraceZeroTol,
          ErrorCode::invalid_argument, "log coordinates must sum to zero");
}

DiagonalElement DiagonalElement::compose(const DiagonalElement& other) const {
  require(dim() == other.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  Eigen::VectorXd t = log_ + other.log_;
  t.array() -= t.sum() / t.size();  // keep the trace-zero invariant exact
  return DiagonalElement(std::move(t));
}

Lattice apply(const DiagonalElement& a, const Lattice& x) {
  require(a.dim() == x.dim(), ErrorCode::dimension_mismatch, "dimension mismatch");
  const Eigen::VectorXd s = a.scales();
  Eigen::MatrixXd b = x.basis();
  for (int j = 0; j < x.dim(); ++j) b.col(j) *= s(j);
  return Lattice::normalize(b);
}

bool same_lattice(const Lattice& x, const Lattice& y, double tol) {
  if (x.dim() != y.dim()) return false;
  const Eigen::MatrixXd u = y.basis() * x.basis().inverse();
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j)
      if (std::abs(u(i, j) - std::round(u(i, j))) > tol) return false;
  return std::abs(std::abs(u.determinant()) - 1.0) <= 1e-6;
}

int numeric_rank(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0 || rows.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++r;
  return r;
}

}  // namespace wellround
