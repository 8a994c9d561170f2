#include "enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wellround {

namespace {

struct Gso {
  Eigen::MatrixXd mu;  // lower unitriangular
  Eigen::VectorXd c;   // squared Gram-Schmidt lengths
};

Gso gram_schmidt(const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(b.rows());
  Eigen::MatrixXd bstar = b;
  Gso g{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < n; ++i) {
    bstar.row(i) = b.row(i);
    for (int j = 0; j < i; ++j) {
      g.mu(i, j) = b.row(i).dot(bstar.row(j)) / g.c(j);
      bstar.row(i) -= g.mu(i, j) * bstar.row(j);
    }
    g.c(i) = bstar.row(i).squaredNorm();
    require(g.c(i) > 0.0, ErrorCode::singular_basis, "basis rows are dependent");
  }
  return g;
}

using TransformMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Depth-first enumerator over integer coefficients in Gram-Schmidt coordinates.
class Enumerator {
public:
  Enumerator(const Eigen::MatrixXd& basis, const EnumOptions& opts)
      : basis_(basis), gso_(gram_schmidt(basis)), n_(static_cast<int>(basis.rows())),
        budget_(opts.node_budget), u_(Eigen::VectorXi::Zero(n_)) {}

  // Collect one representative per +/- pair with squared norm strictly below r2.
  std::vector<Eigen::VectorXi> collect(double r2) {
    out_.clear();
    r2_ = r2;
    shrink_ = false;
    descend(n_ - 1, 0.0, true);
    return std::move(out_);
  }

  // Minimal nonzero squared norm; starts from the given upper bound (attained
  // or not) and shrinks as shorter vectors are found.
  double shortest_norm2(double upper2) {
    r2_ = upper2;
    best2_ = upper2;
    shrink_ = true;
    descend(n_ - 1, 0.0, true);
    return best2_;
  }

private:
  void charge() {
    if (++nodes_ > budget_) {
      fail(ErrorCode::enumeration_budget_exceeded,
           "enumeration exceeded node budget (" + std::to_string(budget_) + ")");
    }
  }

  void leaf(double norm2) {
    if (shrink_) {
      if (norm2 < best2_) best2_ = norm2;
      return;
    }
    out_.push_back(u_);
  }

  // partial = contribution of levels > i; suffix_zero = all u_j (j>i) vanish.
  void descend(int i, double partial, bool suffix_zero) {
    const double limit2 = shrink_ ? best2_ : r2_;
    double y = 0.0;
    for (int j = i + 1; j < n_; ++j) y += u_(j) * gso_.mu(j, i);
    const double head = limit2 - partial;
    if (head <= 0.0) return;
    const double w = std::sqrt(head / gso_.c(i));
    long lo = static_cast<long>(std::ceil(-y - w));
    long hi = static_cast<long>(std::floor(-y + w));
    if (suffix_zero) lo = std::max(lo, 0L);
    if (shrink_) {
      // Zig-zag from the interval center so the radius shrinks early.
      const long mid = std::lround(-y);
      for (long step = 0;; ++step) {
        bool any = false;
        const long cand[2] = {mid + step, mid - step};
        for (int k = 0; k < (step == 0 ? 1 : 2); ++k) {
          const long ui = cand[k];
          if (ui < lo || ui > hi) continue;
          any = true;
          visit(i, ui, y, partial, suffix_zero);
        }
        if (!any && (mid + step > hi) && (mid - step < lo)) break;
      }
    } else {
      for (long ui = lo; ui <= hi; ++ui) visit(i, ui, y, partial, suffix_zero);
    }
  }

  void visit(int i, long ui, double y, double partial, bool suffix_zero) {
    charge();
    const double d = ui + y;
    const double total = partial + d * d * gso_.c(i);
    const double limit2 = shrink_ ? best2_ : r2_;
    if (!(total < limit2)) return;
    u_(i) = static_cast<int>(ui);
    const bool still_zero = suffix_zero && ui == 0;
    if (i == 0) {
      if (!still_zero) leaf(total);
    } else {
      descend(i - 1, total, still_zero);
    }
    u_(i) = 0;
  }

  const Eigen::MatrixXd& basis_;
  Gso gso_;
  int n_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  Eigen::VectorXi u_;
  std::vector<Eigen::VectorXi> out_;
  double r2_ = 0.0;
  double best2_ = 0.0;
  bool shrink_ = false;
};

}  // namespace

ReducedBasis lll_reduce(const Eigen::MatrixXd& basis, double delta) {
  const int n = static_cast<int>(basis.rows());
  ReducedBasis red{basis, TransformMatrix::Identity(n, n)};
  Gso g = gram_schmidt(red.basis);
  int k = 1;
  int guard = 0;
  while (k < n) {
    require(++guard < 100000, ErrorCode::invalid_argument, "LLL failed to terminate");
    for (int j = k - 1; j >= 0; --j) {
      const double q = std::round(g.mu(k, j));
      if (q != 0.0) {
        red.basis.row(k) -= q * red.basis.row(j);
        red.transform.row(k) -= static_cast<std::int64_t>(q) * red.transform.row(j);
        // size reduction leaves b*_i and c_i unchanged
        for (int l = 0; l < j; ++l) g.mu(k, l) -= q * g.mu(j, l);
        g.mu(k, j) -= q;
      }
    }
    if (g.c(k) >= (delta - g.mu(k, k - 1) * g.mu(k, k - 1)) * g.c(k - 1)) {
      ++k;
    } else {
      red.basis.row(k).swap(red.basis.row(k - 1));
      red.transform.row(k).swap(red.transform.row(k - 1));
      g = gram_schmidt(red.basis);
      k = std::max(k - 1, 1);
    }
  }
  return red;
}

std::vector<Eigen::VectorXi> enumerate_below(const Eigen::MatrixXd& basis, double radius,
                                             const EnumOptions& opts) {
  require(radius > 0.0, ErrorCode::invalid_argument, "radius must be positive");
  Enumerator e(basis, opts);
  return e.collect(radius * radius);
}

double shortest_length(const Lattice& x, const EnumOptions& opts) {
  return shortest_length_of_basis(lll_reduce(x.basis()).basis, opts);
}

double shortest_length_of_basis(const Eigen::MatrixXd& basis, const EnumOptions& opts) {
  double upper2 = std::numeric_limits<double>::max();
  for (int i = 0; i < basis.rows(); ++i)
    upper2 = std::min(upper2, basis.row(i).squaredNorm());
  Enumerator e(basis, opts);
  return std::sqrt(e.shortest_norm2(upper2 * (1.0 + 1e-12)));
}

int ShortVectorReport::dim_at(double delta) const {
  std::vector<int> keep;
  for (int k = 0; k < static_cast<int>(vectors.size()); ++k)
    if (vectors[k].norm() / alpha - 1.0 < delta) keep.push_back(k);
  if (keep.empty()) return 0;
  Eigen::MatrixXd rows(static_cast<int>(keep.size()), vectors.front().size());
  for (int r = 0; r < static_cast<int>(keep.size()); ++r) rows.row(r) = vectors[keep[r]];
  return numeric_rank(rows);
}

std::vector<Eigen::VectorXd> ShortVectorReport::minimal_vectors(double tol) const {
  std::vector<Eigen::VectorXd> out;
  const double bound = (1.0 + tol) * alpha * (1.0 + 1e-9);
  for (const auto& v : vectors)
    if (v.norm() <= bound) out.push_back(v);
  return out;
}

ShortVectorReport short_vectors(const Lattice& x, double delta_max, const EnumOptions& opts) {
  const int n = x.dim();
  require(delta_max >= 0.0 && delta_max <= n + 1.0, ErrorCode::invalid_argument,
          "delta_max must lie in [0, n+1]");
  const ReducedBasis red = lll_reduce(x.basis());

  Enumerator finder(red.basis, opts);
  double upper2 = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) upper2 = std::min(upper2, red.basis.row(i).squaredNorm());
  const double alpha = std::sqrt(finder.shortest_norm2(upper2 * (1.0 + 1e-12)));

  // Strict bound ||v|| < (1+delta_max)*alpha; the alpha-attaining vectors are
  // always included (they witness alpha even at delta_max = 0).
  const double radius = std::max((1.0 + delta_max) * alpha, alpha * (1.0 + 1e-12));
  auto reduced_coords = enumerate_below(red.basis, radius, opts);

  ShortVectorReport rep;
  rep.alpha = alpha;
  rep.delta_max = delta_max;

  struct Entry {
    double norm;
    Eigen::VectorXd v;
    Eigen::VectorXi u;
  };
  std::vector<Entry> entries;
  entries.reserve(reduced_coords.size());
  for (const auto& ur : reduced_coords) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (ur(i) != 0) v += static_cast<double>(ur(i)) * red.basis.row(i).transpose();
    Eigen::VectorXi u(n);
    for (int j = 0; j < n; ++j) {
      std::int64_t s = 0;
      for (int i = 0; i < n; ++i) s += static_cast<std::int64_t>(ur(i)) * red.transform(i, j);
      u(j) = static_cast<int>(s);
    }
    const double norm = v.norm();
    // Canonical sign: first coordinate above noise positive.
    for (int k = 0; k < n; ++k) {
      if (std::abs(v(k)) > 1e-9 * norm) {
        if (v(k) < 0) {
          v = -v;
          u = -u;
        }
        break;
      }
    }
    entries.push_back({norm, std::move(v), std::move(u)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return std::lexicographical_compare(a.u.data(), a.u.data() + a.u.size(), b.u.data(),
                                        b.u.data() + b.u.size());
  });
  for (auto& e : entries) {
    rep.vectors.push_back(std::move(e.v));
    rep.coords.push_back(std::move(e.u));
  }

  std::vector<double> ratios;
  for (const auto& v : rep.vectors) ratios.push_back(v.norm() / alpha - 1.0);
  std::sort(ratios.begin(), ratios.end());
  for (double r : ratios) {
    if (rep.breakpoints.empty() || r - rep.breakpoints.back() > 1e-9)
      rep.breakpoints.push_back(std::max(r, 0.0));
  }
  return rep;
}

}  // namespace wellround
