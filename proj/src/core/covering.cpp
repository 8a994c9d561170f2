#include "covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"

namespace wellround {

namespace {
constexpr double kUnboundedCoord = 1e30;
constexpr double kFaceTol = 1e-9;
}  // namespace

GridDomain GridDomain::simplex_box(int s, int t, double rho, double t_extent, int resolution) {
  require(s >= 0 && t >= 0 && s + t >= 1, ErrorCode::invalid_argument, "need s + t >= 1");
  require(resolution >= 4, ErrorCode::invalid_argument, "resolution must be >= 4");
  require(s == 0 || rho > 0.0, ErrorCode::invalid_argument, "rho must be positive");
  require(t == 0 || t_extent > 0.0, ErrorCode::invalid_argument, "t_extent must be positive");
  GridDomain d;
  d.resolution_ = resolution;
  d.lo_.resize(s + t);
  d.hi_.resize(s + t);
  for (int i = 0; i < s; ++i) {
    d.lo_(i) = 0.0;
    d.hi_(i) = rho;
  }
  for (int i = 0; i < t; ++i) {
    d.lo_(s + i) = -t_extent;
    d.hi_(s + i) = t_extent;
  }
  if (s > 0) d.simplices_.push_back({0, s, rho});
  d.build();
  return d;
}

GridDomain GridDomain::kkm(int s1, int s2, int resolution) {
  require(s1 >= 0 && s2 >= 0 && s1 + s2 >= 1, ErrorCode::invalid_argument, "need s1 + s2 >= 1");
  require(resolution >= 4, ErrorCode::invalid_argument, "resolution must be >= 4");
  GridDomain d;
  d.resolution_ = resolution;
  d.lo_ = Eigen::VectorXd::Zero(s1 + s2);
  d.hi_ = Eigen::VectorXd::Ones(s1 + s2);
  if (s1 > 0) d.simplices_.push_back({0, s1, 1.0});
  if (s2 > 0) d.simplices_.push_back({s1, s2, 1.0});
  d.build();
  return d;
}

GridDomain GridDomain::window(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              int resolution) {
  require(lo.size() == hi.size() && lo.size() >= 1, ErrorCode::invalid_argument,
          "window bounds mismatch");
  require(resolution >= 4, ErrorCode::invalid_argument, "resolution must be >= 4");
  for (int i = 0; i < lo.size(); ++i)
    require(hi(i) > lo(i), ErrorCode::invalid_argument, "window must have positive extent");
  GridDomain d;
  d.resolution_ = resolution;
  d.lo_ = lo;
  d.hi_ = hi;
  d.build();
  return d;
}

void GridDomain::build() {
  const int m = dim();
  sizes_.resize(m);
  for (int i = 0; i < m; ++i) {
    sizes_[i] = static_cast<int>(std::llround((hi_(i) - lo_(i)) * resolution_)) + 1;
    require(sizes_[i] >= 2, ErrorCode::invalid_argument, "axis has fewer than two grid points");
  }
  strides_.assign(m, 1);
  for (int i = m - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * sizes_[i + 1];
  const std::size_t total = strides_[0] * sizes_[0];
  require(total <= 50'000'000, ErrorCode::invalid_argument, "grid is too large");

  points_.clear();
  flat_to_ord_.assign(total, -1);
  std::vector<int> idx(m, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (inside(idx)) {
      flat_to_ord_[flat] = static_cast<std::int32_t>(points_.size());
      points_.push_back(static_cast<std::uint32_t>(flat));
    }
    int a = m - 1;
    while (a >= 0 && ++idx[a] >= sizes_[a]) idx[a--] = 0;
  }
}

bool GridDomain::inside(const std::vector<int>& axis_idx) const {
  for (const auto& f : simplices_) {
    for (int i = 1; i < f.count; ++i)
      if (axis_idx[f.start + i - 1] > axis_idx[f.start + i]) return false;
  }
  return true;
}

int GridDomain::simplex_axes() const {
  int c = 0;
  for (const auto& f : simplices_) c += f.count;
  return c;
}

Eigen::VectorXd GridDomain::point(std::size_t ordinal) const {
  const auto idx = axis_indices(ordinal);
  Eigen::VectorXd p(dim());
  for (int i = 0; i < dim(); ++i) p(i) = lo_(i) + static_cast<double>(idx[i]) / resolution_;
  return p;
}

std::vector<int> GridDomain::axis_indices(std::size_t ordinal) const {
  std::size_t flat = points_[ordinal];
  std::vector<int> idx(dim());
  for (int i = 0; i < dim(); ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return idx;
}

std::int64_t GridDomain::ordinal_at(const std::vector<int>& axis_idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < dim(); ++i) {
    if (axis_idx[i] < 0 || axis_idx[i] >= sizes_[i]) return -1;
    flat += strides_[i] * static_cast<std::size_t>(axis_idx[i]);
  }
  return flat_to_ord_[flat];
}

std::vector<std::size_t> GridDomain::neighbors(std::size_t ordinal) const {
  std::vector<std::size_t> out;
  auto idx = axis_indices(ordinal);
  for (int i = 0; i < dim(); ++i) {
    for (int d = -1; d <= 1; d += 2) {
      idx[i] += d;
      const std::int64_t o = ordinal_at(idx);
      if (o >= 0) out.push_back(static_cast<std::size_t>(o));
      idx[i] -= d;
    }
  }
  return out;
}

std::vector<double> GridDomain::barycentric(int factor, const Eigen::VectorXd& p) const {
  const auto& f = simplices_.at(factor);
  std::vector<double> lambda(f.count + 1);
  lambda[0] = 1.0 - p(f.start + f.count - 1) / f.scale;
  for (int i = 1; i < f.count; ++i)
    lambda[i] = (p(f.start + f.count - i) - p(f.start + f.count - i - 1)) / f.scale;
  lambda[f.count] = p(f.start) / f.scale;
  return lambda;
}

bool Box::contains(const Eigen::VectorXd& p) const {
  for (int i = 0; i < p.size(); ++i)
    if (!(p(i) > lo(i) && p(i) < hi(i))) return false;
  return true;
}

bool Box::bounded() const {
  for (int i = 0; i < lo.size(); ++i)
    if (std::abs(lo(i)) >= kUnboundedCoord || std::abs(hi(i)) >= kUnboundedCoord) return false;
  return true;
}

bool CoverElement::contains(const Eigen::VectorXd& p) const {
  for (const auto& b : boxes)
    if (b.contains(p)) return true;
  return false;
}

GridCover materialize(const Cover& cover, const GridDomain& domain) {
  require(!cover.elements.empty(), ErrorCode::invalid_argument, "cover has no elements");
  GridCover gc{domain, {}, {}};
  const std::size_t np = domain.num_points();
  for (const auto& e : cover.elements) {
    gc.labels.push_back(e.label);
    gc.masks.emplace_back(np, 0);
  }
  parallel_slabs(np, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t o = begin; o < end; ++o) {
      const Eigen::VectorXd p = domain.point(o);
      for (std::size_t e = 0; e < cover.elements.size(); ++e)
        gc.masks[e][o] = cover.elements[e].contains(p) ? 1 : 0;
    }
  });
  return gc;
}

int GridCover::multiplicity(std::size_t ordinal) const {
  int m = 0;
  for (const auto& mask : masks) m += mask[ordinal];
  return m;
}

OrderReport cover_order(const GridCover& gc) {
  const std::size_t np = gc.domain.num_points();
  require(np > 0, ErrorCode::invalid_argument, "empty domain");
  const int slabs = slab_count(np);
  std::vector<int> best(slabs, 0);
  std::vector<std::size_t> best_at(slabs, 0);
  std::vector<std::int64_t> bare(slabs, -1);
  parallel_slabs(np, [&](std::size_t begin, std::size_t end, int slab) {
    for (std::size_t o = begin; o < end; ++o) {
      const int m = gc.multiplicity(o);
      if (m == 0 && bare[slab] < 0) bare[slab] = static_cast<std::int64_t>(o);
      if (m > best[slab]) {
        best[slab] = m;
        best_at[slab] = o;
      }
    }
  });
  for (int sl = 0; sl < slabs; ++sl) {
    if (bare[sl] >= 0) {
      fail(ErrorCode::not_a_cover, "grid point is uncovered");
    }
  }
  OrderReport rep;
  for (int sl = 0; sl < slabs; ++sl) {
    if (best[sl] > rep.order) {
      rep.order = best[sl];
      rep.witness = gc.domain.point(best_at[sl]);
    }
  }
  return rep;
}

double cover_mesh(const Cover& cover) {
  require(!cover.elements.empty(), ErrorCode::invalid_argument, "cover has no elements");
  double mesh = 0.0;
  for (const auto& e : cover.elements) {
    for (const auto& b : e.boxes)
      require(b.bounded(), ErrorCode::unbounded_element, "element has an unbounded box");
    double diam2 = 0.0;
    for (std::size_t i = 0; i < e.boxes.size(); ++i) {
      for (std::size_t j = i; j < e.boxes.size(); ++j) {
        double d2 = 0.0;
        const auto& a = e.boxes[i];
        const auto& b = e.boxes[j];
        for (int c = 0; c < a.lo.size(); ++c) {
          const double gap = std::max(a.hi(c) - b.lo(c), b.hi(c) - a.lo(c));
          d2 += gap * gap;
        }
        diam2 = std::max(diam2, d2);
      }
    }
    mesh = std::max(mesh, std::sqrt(diam2));
  }
  return mesh;
}

double cover_lebesgue(const GridCover& gc) {
  const std::size_t np = gc.domain.num_points();
  const std::size_t ne = gc.masks.size();
  std::vector<Eigen::VectorXd> coords(np);
  for (std::size_t o = 0; o < np; ++o) coords[o] = gc.domain.point(o);
  // Complement point lists per element.
  std::vector<std::vector<std::size_t>> outside(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t o = 0; o < np; ++o)
      if (!gc.masks[e][o]) outside[e].push_back(o);

  const int slabs = slab_count(np);
  std::vector<double> slab_min(slabs, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> bare(slabs, -1);
  parallel_slabs(np, [&](std::size_t begin, std::size_t end, int slab) {
    for (std::size_t o = begin; o < end; ++o) {
      double here = 0.0;
      bool covered = false;
      for (std::size_t e = 0; e < ne; ++e) {
        if (!gc.masks[e][o]) continue;
        covered = true;
        double r;
        if (outside[e].empty()) {
          r = 0.0;  // saturation: farthest domain point
          for (std::size_t q = 0; q < np; ++q)
            r = std::max(r, (coords[q] - coords[o]).norm());
        } else {
          r = std::numeric_limits<double>::infinity();
          for (std::size_t q : outside[e]) r = std::min(r, (coords[q] - coords[o]).norm());
        }
        here = std::max(here, r);
      }
      if (!covered) {
        if (bare[slab] < 0) bare[slab] = static_cast<std::int64_t>(o);
        continue;
      }
      slab_min[slab] = std::min(slab_min[slab], here);
    }
  });
  for (int sl = 0; sl < slabs; ++sl)
    require(bare[sl] < 0, ErrorCode::not_a_cover, "grid point is uncovered");
  double leb = std::numeric_limits<double>::infinity();
  for (int sl = 0; sl < slabs; ++sl) leb = std::min(leb, slab_min[sl]);
  return leb;
}

int SimplicialComplex::order() const {
  int best = 0;
  for (const auto& f : faces) best = std::max(best, static_cast<int>(f.size()));
  return best;
}

SimplicialComplex nerve(const GridCover& gc) {
  const std::size_t np = gc.domain.num_points();
  std::set<std::vector<int>> signatures;
  for (std::size_t o = 0; o < np; ++o) {
    std::vector<int> sig;
    for (std::size_t e = 0; e < gc.masks.size(); ++e)
      if (gc.masks[e][o]) sig.push_back(static_cast<int>(e));
    require(!sig.empty(), ErrorCode::not_a_cover, "grid point is uncovered");
    signatures.insert(std::move(sig));
  }
  SimplicialComplex complex;
  for (const auto& sig : signatures) {
    const std::size_t k = sig.size();
    require(k <= 20, ErrorCode::invalid_argument, "nerve face too large to expand");
    // downward closure via subset masks
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> face;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(sig[i]);
      complex.faces.insert(std::move(face));
    }
  }
  return complex;
}

namespace {

double set_distance(const Eigen::VectorXd& p, const std::vector<std::size_t>& pts,
                    const std::vector<Eigen::VectorXd>& coords) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t q : pts) best = std::min(best, (coords[q] - p).norm());
  return best;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> separate_components(
    const std::vector<CoverElement>& groups, const CoverElement& z, const GridDomain& domain) {
  const std::size_t np = domain.num_points();
  const std::size_t ng = groups.size();
  std::vector<Eigen::VectorXd> coords(np);
  for (std::size_t o = 0; o < np; ++o) coords[o] = domain.point(o);

  std::vector<std::vector<std::uint8_t>> g_mask(ng, std::vector<std::uint8_t>(np, 0));
  std::vector<std::uint8_t> z_mask(np, 0);
  for (std::size_t o = 0; o < np; ++o) {
    z_mask[o] = z.contains(coords[o]) ? 1 : 0;
    for (std::size_t i = 0; i < ng; ++i) g_mask[i][o] = groups[i].contains(coords[o]) ? 1 : 0;
  }
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = i + 1; j < ng; ++j)
      for (std::size_t o = 0; o < np; ++o)
        require(!(g_mask[i][o] && g_mask[j][o] && !z_mask[o]), ErrorCode::hypothesis_violated,
                "pairwise intersection leaks outside Z");

  // F_i = G_i \ Z as grid point lists.
  std::vector<std::vector<std::size_t>> f(ng);
  std::vector<std::size_t> f_all;
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t o = 0; o < np; ++o)
      if (g_mask[i][o] && !z_mask[o]) {
        f[i].push_back(o);
        f_all.push_back(o);
      }

  std::vector<std::vector<std::uint8_t>> e(ng, std::vector<std::uint8_t>(np, 0));
  for (std::size_t i = 0; i < ng; ++i) {
    std::vector<std::size_t> f_other;
    for (std::size_t j = 0; j < ng; ++j)
      if (j != i) f_other.insert(f_other.end(), f[j].begin(), f[j].end());
    for (std::size_t o = 0; o < np; ++o) {
      if (!g_mask[i][o]) continue;
      const double di = set_distance(coords[o], f[i], coords);
      const double dother = set_distance(coords[o], f_other, coords);
      if (di < dother) e[i][o] = 1;
    }
  }
  return e;
}

Eigen::VectorXd fold_to_cfk(const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double m = std::fmod(x(i), 2.0);
    if (m < 0.0) m += 2.0;
    y(i) = std::min(m, 2.0 - m);
  }
  std::sort(y.data(), y.data() + y.size());
  return y;
}

GridCover unfold_cover(const Cover& cover, const GridDomain& source, const GridDomain& window) {
  require(source.simplices().size() == 1 || source.simplex_axes() == 0,
          ErrorCode::invalid_argument, "source domain must have a single simplex factor");
  const int s = source.simplex_axes();
  if (s > 0)
    require(std::abs(source.simplices()[0].scale - 1.0) <= 1e-12, ErrorCode::invalid_argument,
            "unfolding needs the unit CFK simplex");
  require(window.dim() == source.dim(), ErrorCode::dimension_mismatch,
          "window dimension mismatch");
  for (int i = 0; i < s; ++i)
    require(window.hi()(i) - window.lo()(i) >= 2.0, ErrorCode::window_too_small,
            "window must span one full reflection tile in every folded axis");

  GridCover gc{window, {}, {}};
  const std::size_t np = window.num_points();
  for (const auto& e : cover.elements) {
    gc.labels.push_back(e.label);
    gc.masks.emplace_back(np, 0);
  }
  parallel_slabs(np, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t o = begin; o < end; ++o) {
      const Eigen::VectorXd p = window.point(o);
      Eigen::VectorXd q(p.size());
      q.head(s) = fold_to_cfk(p.head(s));
      q.tail(p.size() - s) = p.tail(p.size() - s);
      for (std::size_t e = 0; e < cover.elements.size(); ++e)
        gc.masks[e][o] = cover.elements[e].contains(q) ? 1 : 0;
    }
  });
  return gc;
}

namespace {

// Connected components (axis adjacency) of a mask; returns component id per
// ordinal, -1 outside, and the component count.
std::pair<std::vector<int>, int> flood_components(const GridDomain& domain,
                                                  const std::vector<std::uint8_t>& mask) {
  const std::size_t np = domain.num_points();
  std::vector<int> comp(np, -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < np; ++seed) {
    if (!mask[seed] || comp[seed] >= 0) continue;
    comp[seed] = next;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t o = stack.back();
      stack.pop_back();
      for (std::size_t nb : domain.neighbors(o)) {
        if (mask[nb] && comp[nb] < 0) {
          comp[nb] = next;
          stack.push_back(nb);
        }
      }
    }
    ++next;
  }
  return {std::move(comp), next};
}

}  // namespace

CertifyReport certify_multiplicity(const GridCover& gc, bool check_hypotheses) {
  const GridDomain& domain = gc.domain;
  require(domain.simplices().size() <= 1, ErrorCode::invalid_argument,
          "certification expects a single simplex factor; use the KKM check");
  const int s = domain.simplex_axes();
  const int t = domain.box_axes();
  CertifyReport rep;
  rep.s = s;
  rep.t = t;
  const OrderReport order = cover_order(gc);
  rep.order = order.order;
  rep.witness = order.witness;
  if (!check_hypotheses) return rep;
  rep.hypotheses_checked = true;

  // Hypothesis (i): every connected component of every element misses some
  // face slice M_j (the slice within one grid step of barycentric face j).
  if (s > 0) {
    const double step_lambda = domain.step() / domain.simplices()[0].scale;
    const std::size_t np = domain.num_points();
    for (std::size_t e = 0; e < gc.masks.size(); ++e) {
      auto [comp, count] = flood_components(domain, gc.masks[e]);
      std::vector<std::vector<std::uint8_t>> meets(count,
                                                   std::vector<std::uint8_t>(s + 1, 0));
      for (std::size_t o = 0; o < np; ++o) {
        if (comp[o] < 0) continue;
        const auto lambda = domain.barycentric(0, domain.point(o));
        for (int j = 0; j <= s; ++j)
          if (lambda[j] <= step_lambda + kFaceTol) meets[comp[o]][j] = 1;
      }
      for (int c = 0; c < count; ++c) {
        bool misses_some = false;
        for (int j = 0; j <= s; ++j)
          if (!meets[c][j]) misses_some = true;
        if (!misses_some) {
          rep.hyp_i_ok = false;
          rep.hyp_i_failures.push_back(static_cast<int>(e));
          break;
        }
      }
    }
  }

  // Hypothesis (ii): components of k-fold intersections, projected to the
  // box factor, fitted by an (s+t-k)-dimensional affine subspace (centered
  // SVD); the max residual is the empirical R.
  const SimplicialComplex nv = nerve(gc);
  const std::size_t np = domain.num_points();
  for (const auto& face : nv.faces) {
    const int k = static_cast<int>(face.size());
    if (k > s + t) continue;
    std::vector<std::uint8_t> inter(np, 1);
    for (int e : face)
      for (std::size_t o = 0; o < np; ++o) inter[o] &= gc.masks[e][o];
    auto [comp, count] = flood_components(domain, inter);
    if (count == 0) continue;
    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t o = 0; o < np; ++o)
      if (comp[o] >= 0) members[comp[o]].push_back(o);
    for (int c = 0; c < count; ++c) {
      ComponentFit fit;
      fit.elements = face;
      fit.k = k;
      fit.component_size = static_cast<int>(members[c].size());
      fit.fitted_dim = std::clamp(s + t - k, 0, t);
      if (t == 0 || fit.fitted_dim >= t || members[c].empty()) {
        fit.max_residual = 0.0;
      } else {
        Eigen::MatrixXd pts(static_cast<int>(members[c].size()), t);
        for (int r = 0; r < pts.rows(); ++r)
          pts.row(r) = domain.point(members[c][r]).tail(t);
        const Eigen::RowVectorXd mean = pts.colwise().mean();
        pts.rowwise() -= mean;
        double worst = 0.0;
        if (fit.fitted_dim == 0) {
          for (int r = 0; r < pts.rows(); ++r) worst = std::max(worst, pts.row(r).norm());
        } else {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(pts, Eigen::ComputeThinV);
          const Eigen::MatrixXd v = svd.matrixV().leftCols(fit.fitted_dim);
          for (int r = 0; r < pts.rows(); ++r) {
            const Eigen::VectorXd x = pts.row(r).transpose();
            worst = std::max(worst, (x - v * (v.transpose() * x)).norm());
          }
        }
        fit.max_residual = worst;
      }
      rep.hyp_ii.push_back(std::move(fit));
    }
  }

  rep.violated = rep.hyp_i_ok && rep.order <= s + t;
  return rep;
}

KkmReport kkm_check(const GridCover& gc, const std::vector<std::array<int, 2>>& face_misses) {
  const GridDomain& domain = gc.domain;
  require(face_misses.size() == gc.masks.size(), ErrorCode::invalid_argument,
          "one declaration per element required");
  const auto& factors = domain.simplices();
  require(!factors.empty() && factors.size() <= 2, ErrorCode::invalid_argument,
          "KKM domain must have one or two simplex factors");
  const std::size_t np = domain.num_points();
  for (std::size_t e = 0; e < gc.masks.size(); ++e) {
    for (std::size_t fidx = 0; fidx < factors.size(); ++fidx) {
      const int declared = face_misses[e][fidx];
      if (declared < 0) continue;  // point factor: no declaration
      require(declared <= factors[fidx].count, ErrorCode::invalid_argument,
              "face index out of range");
      for (std::size_t o = 0; o < np; ++o) {
        if (!gc.masks[e][o]) continue;
        const auto lambda = domain.barycentric(static_cast<int>(fidx), domain.point(o));
        require(lambda[declared] > kFaceTol, ErrorCode::declaration_false,
                "projection meets its declared missed face");
      }
    }
  }
  const OrderReport order = cover_order(gc);
  KkmReport rep;
  rep.order = order.order;
  rep.witness = order.witness;
  rep.required = 1;
  for (const auto& f : factors) rep.required += f.count;
  rep.satisfied = rep.order >= rep.required;
  return rep;
}

}  // namespace wellround
