#include "exterior.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace wellround {

namespace {
using Rational = boost::multiprecision::cpp_rational;
}

MultiIndex::MultiIndex(std::vector<int> indices) : idx_(std::move(indices)) {
  require(!idx_.empty(), ErrorCode::invalid_argument, "multi-index must be nonempty");
  require(idx_.front() >= 1, ErrorCode::index_out_of_range, "indices are 1-based");
  for (std::size_t i = 1; i < idx_.size(); ++i)
    require(idx_[i] > idx_[i - 1], ErrorCode::invalid_argument,
            "multi-index must be strictly increasing");
}

MultiIndex MultiIndex::full(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return MultiIndex(std::move(v));
}

bool MultiIndex::contains(int i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

bool MultiIndex::subset_of(const MultiIndex& other) const {
  return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

std::vector<MultiIndex> all_multiindices(int n, int d) {
  require(d >= 1 && d <= n, ErrorCode::invalid_argument, "order must lie in 1..n");
  std::vector<MultiIndex> out;
  std::vector<int> cur(d);
  for (int i = 0; i < d; ++i) cur[i] = i + 1;
  while (true) {
    out.emplace_back(cur);
    int k = d - 1;
    while (k >= 0 && cur[k] == n - (d - 1 - k)) --k;
    if (k < 0) break;
    ++cur[k];
    for (int i = k + 1; i < d; ++i) cur[i] = cur[i - 1] + 1;
  }
  return out;
}

double chi(const MultiIndex& j, const DiagonalElement& a) {
  require(j.max_index() <= a.dim(), ErrorCode::index_out_of_range,
          "multi-index exceeds dimension");
  double s = 0.0;
  for (int i : j.indices()) s += a.log_coords()(i - 1);
  return std::exp(s);
}

WedgeClass::WedgeClass(int n, int d, std::map<MultiIndex, double> coeffs)
    : n_(n), d_(d), coeffs_(std::move(coeffs)) {
  require(n >= 2 && n <= kMaxDim && d >= 1 && d <= n, ErrorCode::invalid_argument,
          "wedge class order out of range");
  for (const auto& [j, c] : coeffs_) {
    require(j.order() == d, ErrorCode::invalid_argument, "coefficient order mismatch");
    require(j.max_index() <= n, ErrorCode::index_out_of_range, "multi-index exceeds n");
  }
  const double nrm = norm();
  for (const auto& [j, c] : coeffs_) {
    if (std::abs(c) > kSupportTol * nrm) {
      if (c < 0.0)
        for (auto& [jj, cc] : coeffs_) cc = -cc;
      break;
    }
  }
  if (d_ == 2 && n_ == 4 && nrm > 0.0) {
    // Decomposability of the stored coefficients (quadratic Plucker relation).
    auto c = [&](int a, int b) { return coeff(MultiIndex({a, b})); };
    const double rel = c(1, 2) * c(3, 4) - c(1, 3) * c(2, 4) + c(1, 4) * c(2, 3);
    require(std::abs(rel) <= 1e-9 * nrm * nrm, ErrorCode::invalid_argument,
            "coefficients violate the Plucker relation");
  }
}

WedgeClass WedgeClass::wedge_of_group(const Eigen::MatrixXd& rows) {
  const int d = static_cast<int>(rows.rows());
  const int n = static_cast<int>(rows.cols());
  require(d >= 1 && d <= n, ErrorCode::invalid_argument, "need 1..n vectors");
  require(numeric_rank(rows) == d, ErrorCode::rank_deficient, "vectors are dependent");
  std::map<MultiIndex, double> coeffs;
  Eigen::MatrixXd minor(d, d);
  for (const auto& j : all_multiindices(n, d)) {
    for (int c = 0; c < d; ++c) minor.col(c) = rows.col(j.indices()[c] - 1);
    coeffs.emplace(j, minor.determinant());
  }
  return WedgeClass(n, d, std::move(coeffs));
}

double WedgeClass::coeff(const MultiIndex& j) const {
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double WedgeClass::norm() const {
  double s = 0.0;
  for (const auto& [j, c] : coeffs_) s += c * c;
  return std::sqrt(s);
}

std::vector<MultiIndex> WedgeClass::support() const {
  const double nrm = norm();
  std::vector<MultiIndex> out;
  for (const auto& [j, c] : coeffs_)
    if (std::abs(c) > kSupportTol * nrm) out.push_back(j);
  return out;
}

WedgeClass WedgeClass::acted_by(const DiagonalElement& a) const {
  require(a.dim() == n_, ErrorCode::dimension_mismatch, "dimension mismatch");
  std::map<MultiIndex, double> scaled;
  for (const auto& [j, c] : coeffs_) scaled.emplace(j, c * chi(j, a));
  return WedgeClass(n_, d_, std::move(scaled));
}

double covolume(const Eigen::MatrixXd& rows) {
  return WedgeClass::wedge_of_group(rows).norm();
}

StabilizerSubspace stabilizer_subspace(int n, const std::vector<MultiIndex>& supports) {
  require(n >= 2 && n <= kMaxDim, ErrorCode::invalid_argument, "n out of range");
  require(!supports.empty(), ErrorCode::invalid_argument, "support set must be nonempty");
  Eigen::MatrixXd rows(1 + static_cast<int>(supports.size()), n);
  rows.row(0).setOnes();
  for (int r = 0; r < static_cast<int>(supports.size()); ++r) {
    require(supports[r].max_index() <= n, ErrorCode::index_out_of_range,
            "multi-index exceeds n");
    rows.row(r + 1).setZero();
    for (int i : supports[r].indices()) rows(r + 1, i - 1) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++rank;
  StabilizerSubspace out;
  out.dimension = n - rank;
  out.basis = svd.matrixV().rightCols(out.dimension).transpose();
  return out;
}

Flag Flag::from_levels(int n, std::vector<Eigen::MatrixXd> levels) {
  require(n >= 2 && n <= kMaxDim, ErrorCode::invalid_argument, "n out of range");
  require(!levels.empty(), ErrorCode::invalid_argument, "flag must have at least one level");
  int prev_dim = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    require(l.cols() == n, ErrorCode::dimension_mismatch, "level has wrong ambient dimension");
    const int d = static_cast<int>(l.rows());
    require(d > prev_dim && d < n, ErrorCode::invalid_argument,
            "level dimensions must be strictly increasing and below n");
    require(numeric_rank(l) == d, ErrorCode::rank_deficient, "level basis is rank deficient");
    if (i > 0) {
      Eigen::MatrixXd stacked(levels[i - 1].rows() + l.rows(), n);
      stacked << levels[i - 1], l;
      require(numeric_rank(stacked) == d, ErrorCode::invalid_argument,
              "levels are not nested");
    }
    prev_dim = d;
  }
  return Flag(n, std::move(levels), std::nullopt);
}

Flag Flag::from_chain(const Eigen::MatrixXd& rows) {
  const int n = static_cast<int>(rows.cols());
  require(rows.rows() == n, ErrorCode::invalid_argument, "chain must be n x n");
  require(numeric_rank(rows) == n, ErrorCode::singular_basis, "chain rows are dependent");
  std::vector<Eigen::MatrixXd> levels;
  for (int d = 1; d < n; ++d) levels.push_back(rows.topRows(d));
  Flag f = from_levels(n, std::move(levels));
  f.chain_ = rows;
  return f;
}

bool Flag::is_complete() const {
  if (length() != n_ - 1) return false;
  for (int i = 0; i < length(); ++i)
    if (levels_[i].rows() != i + 1) return false;
  return true;
}

namespace {

Rational rational_det(const std::vector<std::vector<Rational>>& m) {
  const int d = static_cast<int>(m.size());
  std::vector<std::vector<Rational>> a = m;
  Rational det = 1;
  for (int col = 0; col < d; ++col) {
    int pivot = -1;
    for (int r = col; r < d; ++r)
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return Rational(0);
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < d; ++r) {
      if (a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (int c = col; c < d; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

}  // namespace

std::vector<MultiIndex> nested_multiindices(const Flag& flag, MinorArithmetic mode) {
  require(flag.is_complete() && flag.chain().has_value(), ErrorCode::invalid_argument,
          "nested_multiindices needs a complete chain flag");
  const Eigen::MatrixXd& rows = *flag.chain();
  const int n = flag.n();

  std::vector<std::vector<Rational>> exact;
  if (mode == MinorArithmetic::exact) {
    exact.assign(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) exact[i][j] = Rational(rows(i, j));
  }

  // Minor with the first d chain vectors restricted to the columns of J.
  auto minor_nonzero = [&](int d, const MultiIndex& j) {
    if (mode == MinorArithmetic::exact) {
      std::vector<std::vector<Rational>> sub(d, std::vector<Rational>(d));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) sub[r][c] = exact[r][j.indices()[c] - 1];
      return rational_det(sub) != 0;
    }
    Eigen::MatrixXd sub(d, d);
    for (int c = 0; c < d; ++c) sub.col(c) = rows.topRows(d).col(j.indices()[c] - 1);
    return std::abs(sub.determinant()) > 1e-10;
  };

  std::vector<MultiIndex> nested;
  nested.reserve(n);
  MultiIndex current = MultiIndex::full(n);
  require(minor_nonzero(n, current), ErrorCode::numerically_singular_minor,
          "chain matrix is singular");
  nested.push_back(current);
  for (int d = n - 1; d >= 1; --d) {
    // Lex-first size-d subset of current with a nonzero minor; Laplace
    // expansion of the level-(d+1) minor guarantees one exists.
    std::vector<MultiIndex> candidates;
    for (int drop = d; drop >= 0; --drop) {
      std::vector<int> sub;
      for (int i = 0; i <= d; ++i)
        if (i != drop) sub.push_back(current.indices()[i]);
      candidates.emplace_back(std::move(sub));
    }
    std::sort(candidates.begin(), candidates.end());
    bool found = false;
    for (const auto& cand : candidates) {
      if (minor_nonzero(d, cand)) {
        current = cand;
        found = true;
        break;
      }
    }
    require(found, ErrorCode::numerically_singular_minor,
            "all candidate minors fall below the threshold; try exact arithmetic");
    nested.push_back(current);
  }
  std::reverse(nested.begin(), nested.end());
  return nested;
}

FlagCodimReport flag_codim_check(const Flag& flag) {
  std::vector<MultiIndex> joint;
  for (const auto& level : flag.levels()) {
    for (auto& j : WedgeClass::wedge_of_group(level).support()) joint.push_back(std::move(j));
  }
  const StabilizerSubspace stab = stabilizer_subspace(flag.n(), joint);
  FlagCodimReport out;
  out.stabilizer_dim = stab.dimension;
  out.codim = (flag.n() - 1) - stab.dimension;
  out.satisfies = out.codim >= flag.length();
  return out;
}

SublevelCheckResult sublevel_almost_affine_check(const Lattice& x,
                                                 const std::vector<Eigen::MatrixXd>& groups,
                                                 double C, const std::vector<GridAxis>& grid,
                                                 double R) {
  const int n = x.dim();
  require(!groups.empty(), ErrorCode::invalid_argument, "need at least one subgroup");
  require(!grid.empty(), ErrorCode::invalid_argument, "need at least one sampling axis");
  std::vector<WedgeClass> wedges;
  std::vector<MultiIndex> joint;
  for (const auto& g : groups) {
    require(g.cols() == n, ErrorCode::dimension_mismatch, "subgroup ambient dimension");
    wedges.push_back(WedgeClass::wedge_of_group(g));
    for (auto& j : wedges.back().support()) joint.push_back(std::move(j));
  }
  const StabilizerSubspace stab = stabilizer_subspace(n, joint);

  std::vector<Eigen::VectorXd> members;
  std::vector<int> odo(grid.size(), 0);
  while (true) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const auto& ax = grid[m];
      require(ax.samples >= 1, ErrorCode::invalid_argument, "axis needs samples >= 1");
      const double c =
          ax.samples == 1 ? ax.lo
                          : ax.lo + (ax.hi - ax.lo) * odo[m] / static_cast<double>(ax.samples - 1);
      t += c * ax.direction;
    }
    t.array() -= t.sum() / n;
    const DiagonalElement a(t);
    bool inside = true;
    for (const auto& w : wedges) {
      if (w.acted_by(a).norm() > C) {
        inside = false;
        break;
      }
    }
    if (inside) members.push_back(a.log_coords());

    int m = static_cast<int>(grid.size()) - 1;
    while (m >= 0 && ++odo[m] >= grid[m].samples) odo[m--] = 0;
    if (m < 0) break;
  }

  SublevelCheckResult out;
  if (members.empty()) {
    out.status = SublevelCheckResult::Status::empty_sublevel;
    return out;
  }
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
  for (const auto& t : members) centroid += t;
  centroid /= static_cast<double>(members.size());
  double worst = 0.0;
  for (const auto& t : members) {
    Eigen::VectorXd r = t - centroid;
    if (stab.dimension > 0) r -= stab.basis.transpose() * (stab.basis * r);
    worst = std::max(worst, r.norm());
  }
  out.status = worst <= R ? SublevelCheckResult::Status::satisfied
                          : SublevelCheckResult::Status::exceeded;
  out.max_distance = worst;
  out.members = static_cast<int>(members.size());
  out.coset_offset = centroid;
  return out;
}

}  // namespace wellround
