#include "orbit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>

#include "parallel.hpp"

namespace wellround {

int ClosedOrbitStructure::n() const {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.size());
  return total;
}

void ClosedOrbitStructure::validate(const Lattice& x) const {
  const int nn = n();
  require(nn == x.dim(), ErrorCode::dimension_mismatch, "structure does not match lattice");
  std::vector<int> seen(nn, 0);
  for (const auto& b : blocks) {
    require(!b.empty(), ErrorCode::invalid_argument, "empty block");
    for (int i : b) {
      require(i >= 1 && i <= nn, ErrorCode::invalid_argument, "block index out of range");
      require(seen[i - 1]++ == 0, ErrorCode::invalid_argument, "blocks must be disjoint");
    }
  }
  for (const auto& g : t2_stabilizer_gens) {
    require(g.size() == nn, ErrorCode::dimension_mismatch, "generator has wrong dimension");
    require(std::abs(g.sum()) <= 1e-9, ErrorCode::invalid_argument,
            "generator is not trace-zero");
    for (const auto& b : blocks) {
      double s = 0.0;
      for (int i : b) s += g(i - 1);
      require(std::abs(s) <= 1e-9, ErrorCode::invalid_argument,
              "generator does not lie in T2");
    }
    require(same_lattice(x, apply(DiagonalElement(g), x), 1e-8), ErrorCode::invalid_argument,
            "generator does not stabilize the lattice");
  }
}

PellUnit pell_fundamental_unit(std::int64_t d) {
  require(d >= 2, ErrorCode::invalid_argument, "need D >= 2");
  auto a0 = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(d))));
  while (a0 * a0 > d) --a0;
  while ((a0 + 1) * (a0 + 1) <= d) ++a0;
  require(a0 * a0 != d, ErrorCode::not_squarefree, "D must not be a perfect square");

  using Wide = __int128;
  const Wide kGuard = (Wide(1) << 120);
  std::int64_t m = 0, den = 1, a = a0;
  Wide h_prev = 1, h = a0, k_prev = 0, k = 1;
  int period = 0;
  while (true) {
    m = den * a - m;
    den = (d - m * m) / den;
    a = (a0 + m) / den;
    ++period;
    if (den == 1) break;
    const Wide h_next = Wide(a) * h + h_prev;
    const Wide k_next = Wide(a) * k + k_prev;
    require(h_next < kGuard && k_next < kGuard, ErrorCode::invalid_argument,
            "fundamental unit exceeds the 128-bit guard");
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  require(h <= Wide(INT64_MAX) && k <= Wide(INT64_MAX), ErrorCode::invalid_argument,
          "fundamental unit exceeds 64-bit range");
  PellUnit out;
  out.x = static_cast<std::int64_t>(h);
  out.y = static_cast<std::int64_t>(k);
  out.norm = (period % 2 == 1) ? -1 : 1;
  return out;
}

OrbitPart OrbitPart::unit() {
  OrbitPart p;
  p.basis = Eigen::MatrixXd::Identity(1, 1);
  p.blocks = {{1}};
  return p;
}

OrbitPart OrbitPart::quadratic(std::int64_t d) {
  require(d >= 2 && d <= 1'000'000'000, ErrorCode::invalid_argument, "D out of range");
  for (std::int64_t p = 2; p * p <= d; ++p)
    require(d % (p * p) != 0, ErrorCode::not_squarefree, "D must be squarefree");

  const PellUnit unit = pell_fundamental_unit(d);
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  double log_u = std::log(static_cast<double>(unit.x) + static_cast<double>(unit.y) * sqrt_d);
  if (unit.norm == -1) log_u *= 2.0;  // square so both embeddings are positive

  OrbitPart p;
  Eigen::MatrixXd raw(2, 2);
  raw << 1.0, 1.0, sqrt_d, -sqrt_d;
  p.basis = raw / std::sqrt(2.0 * sqrt_d);
  p.blocks = {{1, 2}};
  Eigen::VectorXd g(2);
  g << log_u, -log_u;
  p.gens.push_back(std::move(g));
  return p;
}

OrbitPart OrbitPart::from(const Lattice& x, const ClosedOrbitStructure& s) {
  s.validate(x);
  OrbitPart p;
  p.basis = x.basis();
  p.blocks = s.blocks;
  p.gens = s.t2_stabilizer_gens;
  return p;
}

std::pair<Lattice, ClosedOrbitStructure> block_sum(const std::vector<OrbitPart>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "need at least one part");
  int n = 0;
  for (const auto& p : parts) {
    require(p.basis.rows() == p.basis.cols() && p.basis.rows() >= 1,
            ErrorCode::invalid_argument, "part basis must be square");
    n += static_cast<int>(p.basis.rows());
  }
  require(n >= kMinDim && n <= kMaxDim, ErrorCode::invalid_argument,
          "total dimension must lie in [2,8]");

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n);
  ClosedOrbitStructure s;
  int offset = 0;
  for (const auto& p : parts) {
    const int m = static_cast<int>(p.basis.rows());
    basis.block(offset, offset, m, m) = p.basis;
    for (const auto& b : p.blocks) {
      std::vector<int> shifted;
      shifted.reserve(b.size());
      for (int i : b) shifted.push_back(i + offset);
      s.blocks.push_back(std::move(shifted));
    }
    for (const auto& g : p.gens) {
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
      padded.segment(offset, m) = g;
      s.t2_stabilizer_gens.push_back(std::move(padded));
    }
    offset += m;
  }
  Lattice x = Lattice::normalize(basis);
  s.validate(x);
  return {std::move(x), std::move(s)};
}

std::pair<Lattice, ClosedOrbitStructure> compact_orbit_from_quadratic(std::int64_t d) {
  return block_sum({OrbitPart::quadratic(d)});
}

double spread(const Lattice& x, const EnumOptions& opts) {
  return spread_bounded(x, std::numeric_limits<double>::infinity(), opts);
}

double spread_bounded(const Lattice& x, double cap, const EnumOptions& opts) {
  const int n = x.dim();
  const ReducedBasis red = lll_reduce(x.basis());
  double radius = 0.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, red.basis.row(i).norm());
  // The n-th greedy minimum is at most the largest reduced row, so the ball
  // of that radius always completes the greedy chain. Under a cap the ball
  // may be truncated; rank < n then certifies spread > cap.
  bool truncated = false;
  double cap_floor = 0.0;
  if (std::isfinite(cap)) {
    const double alpha = shortest_length_of_basis(red.basis, opts);
    const double capped = cap * alpha * (1.0 + 1e-9);
    if (capped < radius) {
      radius = capped;
      truncated = true;
      cap_floor = cap;
    }
  }
  const auto coords = enumerate_below(red.basis, radius * (1.0 + 1e-9), opts);

  struct Entry {
    double norm2;
    Eigen::VectorXd v;
    Eigen::VectorXi u;
  };
  std::vector<Entry> entries;
  entries.reserve(coords.size());
  for (const auto& u : coords) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (u(i) != 0) v += static_cast<double>(u(i)) * red.basis.row(i).transpose();
    entries.push_back({v.squaredNorm(), std::move(v), u});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return std::lexicographical_compare(a.u.data(), a.u.data() + a.u.size(), b.u.data(),
                                        b.u.data() + b.u.size());
  });

  // Greedy independent minima: shortest, then shortest independent of the
  // span so far.
  Eigen::MatrixXd q(n, n);  // orthonormal rows of the selected span
  int picked = 0;
  double first = 0.0, last = 0.0;
  for (const auto& e : entries) {
    Eigen::VectorXd r = e.v;
    for (int i = 0; i < picked; ++i) r -= q.row(i).dot(e.v) * q.row(i).transpose();
    if (r.norm() > 1e-7 * e.v.norm()) {
      q.row(picked++) = r / r.norm();
      const double len = e.v.norm();
      if (picked == 1) first = len;
      last = len;
      if (picked == n) break;
    }
  }
  if (picked < n) {
    require(truncated, ErrorCode::invalid_argument,
            "failed to extract n independent minima");
    return cap_floor;  // the chain did not complete inside cap * alpha
  }
  return last / first;
}

namespace {

// Unconstrained chart for A adapted to the orbit structure: the first s
// coordinates move along T1 (homothety per block), the last t along the
// stabilizer generators spanning T2.
struct SearchChart {
  int n = 0, s = 0, t = 0;
  Eigen::MatrixXd t1_basis;                 // n x s
  std::vector<Eigen::VectorXd> t2_gens;     // n-vectors
  std::vector<Eigen::VectorXd> simplex_vertices_chart;  // d points in R^s

  Eigen::VectorXd log_coords(const Eigen::VectorXd& u) const {
    Eigen::VectorXd t_log = Eigen::VectorXd::Zero(n);
    if (s > 0) t_log += t1_basis * u.head(s);
    for (int j = 0; j < t; ++j) t_log += u(s + j) * t2_gens[j];
    t_log.array() -= t_log.sum() / n;
    return t_log;
  }
};

SearchChart make_chart(const ClosedOrbitStructure& st, double rho) {
  SearchChart ch;
  ch.n = st.n();
  const int d = static_cast<int>(st.blocks.size());
  ch.s = d - 1;
  ch.t = static_cast<int>(st.t2_stabilizer_gens.size());
  ch.t2_gens = st.t2_stabilizer_gens;

  ch.t1_basis.resize(ch.n, ch.s);
  for (int k = 0; k < ch.s; ++k) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(ch.n);
    for (int i : st.blocks[k]) w(i - 1) = 1.0 / st.blocks[k].size();
    for (int i : st.blocks[d - 1]) w(i - 1) = -1.0 / st.blocks[d - 1].size();
    ch.t1_basis.col(k) = w;
  }

  // Vertices b_i of Delta_rho: chi_j = rho for j != i, chi_i balancing the
  // determinant.
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ch.n);
    const double ni = static_cast<double>(st.blocks[i].size());
    for (int j = 0; j < d; ++j) {
      const double chi = (j == i) ? -rho * (ch.n - ni) / ni : rho;
      for (int idx : st.blocks[j]) b(idx - 1) = chi;
    }
    Eigen::VectorXd v;
    if (ch.s > 0) {
      v = (ch.t1_basis.transpose() * ch.t1_basis)
              .ldlt()
              .solve(ch.t1_basis.transpose() * b);
    } else {
      v = Eigen::VectorXd::Zero(0);
    }
    ch.simplex_vertices_chart.push_back(std::move(v));
  }
  return ch;
}

// Compositions of m into d nonnegative parts, lexicographic.
void for_each_composition(int m, int d, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> k(d, 0);
  k[0] = m;
  while (true) {
    fn(k);
    // next composition
    int i = d - 2;
    while (i >= 0 && k[i] == 0) --i;
    if (i < 0) break;
    --k[i];
    int tail = std::accumulate(k.begin() + i + 1, k.end(), 0) + 1;
    for (int j = i + 1; j < d; ++j) k[j] = 0;
    k[i + 1] = tail;
  }
}

std::size_t composition_count(int m, int d) {
  // C(m + d - 1, d - 1)
  std::size_t c = 1;
  for (int i = 1; i <= d - 1; ++i) c = c * (m + i) / i;
  return c;
}

class Objective {
public:
  Objective(const Lattice& x, const SearchChart& chart, std::uint64_t budget, bool record,
            double cap)
      : x_(x), chart_(chart), budget_(budget), record_(record), cap_(cap) {}

  bool exhausted() const { return count_ >= budget_; }
  std::uint64_t count() const { return count_; }
  std::vector<std::pair<Eigen::VectorXd, double>>& trace() { return trace_; }

  std::optional<double> eval(const Eigen::VectorXd& u) {
    if (exhausted()) return std::nullopt;
    ++count_;
    const Eigen::VectorXd t_log = chart_.log_coords(u);
    // runaway reflections would overflow the exponentials
    if (t_log.cwiseAbs().maxCoeff() > 50.0) {
      if (record_) trace_.emplace_back(t_log, cap_);
      return std::log(cap_) + t_log.cwiseAbs().maxCoeff();
    }
    const double sp = spread_bounded(apply(DiagonalElement(t_log), x_), cap_);
    if (record_) trace_.emplace_back(t_log, sp);
    return std::log(sp);
  }

  // Evaluation without the budget/trace machinery (used by eta sampling).
  std::uint64_t charge(std::uint64_t k) { return count_ += k; }

private:
  const Lattice& x_;
  const SearchChart& chart_;
  std::uint64_t budget_;
  std::uint64_t count_ = 0;
  bool record_;
  double cap_;
  std::vector<std::pair<Eigen::VectorXd, double>> trace_;
};

struct Best {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u;
  void consider(double v, const Eigen::VectorXd& cand) {
    if (v < value) {
      value = v;
      u = cand;
    }
  }
};

// Standard Nelder-Mead on f, starting from u0 with step h. Stops on target,
// simplex collapse, or objective exhaustion.
void nelder_mead(Objective& f, const Eigen::VectorXd& u0, double h, double target, Best& best) {
  const int p = static_cast<int>(u0.size());
  if (p == 0) return;
  struct Vertex {
    Eigen::VectorXd u;
    double v;
  };
  std::vector<Vertex> simplex;
  auto push = [&](const Eigen::VectorXd& u) -> bool {
    auto v = f.eval(u);
    if (!v) return false;
    best.consider(*v, u);
    simplex.push_back({u, *v});
    return true;
  };
  if (!push(u0)) return;
  for (int k = 0; k < p; ++k) {
    Eigen::VectorXd u = u0;
    u(k) += h;
    if (!push(u)) return;
  }
  const int max_iter = 400 * p;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.v < b.v; });
    if (simplex.front().v <= target) return;
    double diam = 0.0;
    for (int k = 1; k <= p; ++k)
      diam = std::max(diam, (simplex[k].u - simplex[0].u).norm());
    if (diam < 1e-13) return;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
    for (int k = 0; k < p; ++k) centroid += simplex[k].u;
    centroid /= p;
    const Vertex& worst = simplex[p];

    const Eigen::VectorXd refl = centroid + (centroid - worst.u);
    auto fr = f.eval(refl);
    if (!fr) return;
    best.consider(*fr, refl);
    if (*fr < simplex[0].v) {
      const Eigen::VectorXd expd = centroid + 2.0 * (centroid - worst.u);
      auto fe = f.eval(expd);
      if (!fe) return;
      best.consider(*fe, expd);
      simplex[p] = (*fe < *fr) ? Vertex{expd, *fe} : Vertex{refl, *fr};
      continue;
    }
    if (*fr < simplex[p - 1].v) {
      simplex[p] = {refl, *fr};
      continue;
    }
    const Eigen::VectorXd ctr = centroid + 0.5 * (worst.u - centroid);
    auto fc = f.eval(ctr);
    if (!fc) return;
    best.consider(*fc, ctr);
    if (*fc < worst.v) {
      simplex[p] = {ctr, *fc};
      continue;
    }
    for (int k = 1; k <= p; ++k) {
      simplex[k].u = simplex[0].u + 0.5 * (simplex[k].u - simplex[0].u);
      auto fv = f.eval(simplex[k].u);
      if (!fv) return;
      best.consider(*fv, simplex[k].u);
      simplex[k].v = *fv;
    }
  }
}

}  // namespace

SearchResult search_well_rounded(const Lattice& x, const ClosedOrbitStructure& st,
                                 const SearchOptions& opts) {
  st.validate(x);
  require(opts.budget >= 100, ErrorCode::invalid_argument, "budget must be at least 100");
  const int n = x.dim();
  const int d = static_cast<int>(st.blocks.size());
  const int s = d - 1;
  const int t = static_cast<int>(st.t2_stabilizer_gens.size());
  require(t == st.t2_dim(), ErrorCode::invalid_argument,
          "stabilizer generators must span T2");

  // eta: smallest nonzero block-projection norm among short vectors, sampled
  // over the T2 fundamental parallelepiped.
  double eta = std::numeric_limits<double>::infinity();
  std::uint64_t eta_evals = 0;
  {
    const int q = t > 0 ? std::clamp(static_cast<int>(std::floor(std::pow(64.0, 1.0 / t))), 3, 16)
                        : 1;
    std::vector<int> odo(std::max(t, 1), 0);
    while (true) {
      Eigen::VectorXd t_log = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < t; ++j) t_log += (static_cast<double>(odo[j]) / q) * st.t2_stabilizer_gens[j];
      t_log.array() -= t_log.sum() / n;
      const Lattice ax = apply(DiagonalElement(t_log), x);
      ++eta_evals;
      const ReducedBasis red = lll_reduce(ax.basis());
      for (const auto& u : enumerate_below(red.basis, 3.0)) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
          if (u(i) != 0) v += static_cast<double>(u(i)) * red.basis.row(i).transpose();
        for (const auto& b : st.blocks) {
          double p2 = 0.0;
          for (int i : b) p2 += v(i - 1) * v(i - 1);
          const double pn = std::sqrt(p2);
          if (pn > 1e-9) eta = std::min(eta, pn);
        }
      }
      if (t == 0) break;
      int j = t - 1;
      while (j >= 0 && ++odo[j] >= q) odo[j--] = 0;
      if (j < 0) break;
    }
  }
  if (!std::isfinite(eta)) eta = 1.0;
  const double hermite_c = std::sqrt(static_cast<double>(n));
  const double rho = std::log(2.0 * hermite_c / eta) + 0.5;

  const SearchChart chart = make_chart(st, rho);
  const int p = s + t;

  Objective f(x, chart, opts.budget, opts.record_trace, opts.objective_cap);
  f.charge(eta_evals);
  Best best;

  // The identity is always probed first (x may already be well-rounded).
  if (auto v0 = f.eval(Eigen::VectorXd::Zero(p))) best.consider(*v0, Eigen::VectorXd::Zero(p));
  const double target = std::log1p(opts.target_tol);

  // Coarse grid: barycentric subdivision of Delta_rho times a half-open
  // grid on the stabilizer parallelepiped.
  std::vector<Eigen::VectorXd> grid_points;
  if (best.value > target && !f.exhausted()) {
    const std::uint64_t remaining = opts.budget - f.count();
    const auto grid_budget = static_cast<std::size_t>(0.55 * static_cast<double>(remaining));
    int target_res = std::max(
        2, static_cast<int>(std::floor(std::pow(static_cast<double>(std::max<std::size_t>(grid_budget, 1)),
                                                1.0 / std::max(p, 1)))));
    int m = s > 0 ? target_res : 0;
    int rt = t > 0 ? target_res : 0;
    if (s > 0) {
      while (m > 2 && composition_count(m, d) * static_cast<std::size_t>(std::pow(std::max(rt, 1), t)) >
                          std::max<std::size_t>(grid_budget, 1))
        --m;
    }
    std::vector<Eigen::VectorXd> simplex_part;
    if (s > 0) {
      for_each_composition(m, d, [&](const std::vector<int>& k) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(s);
        for (int i = 0; i < d; ++i)
          u += (static_cast<double>(k[i]) / m) * chart.simplex_vertices_chart[i];
        simplex_part.push_back(std::move(u));
      });
    } else {
      simplex_part.emplace_back(Eigen::VectorXd::Zero(0));
    }
    std::vector<Eigen::VectorXd> t2_part;
    if (t > 0) {
      std::vector<int> odo(t, 0);
      while (true) {
        Eigen::VectorXd c(t);
        for (int j = 0; j < t; ++j) c(j) = static_cast<double>(odo[j]) / rt;
        t2_part.push_back(std::move(c));
        int j = t - 1;
        while (j >= 0 && ++odo[j] >= rt) odo[j--] = 0;
        if (j < 0) break;
      }
    } else {
      t2_part.emplace_back(Eigen::VectorXd::Zero(0));
    }
    for (const auto& us : simplex_part)
      for (const auto& ut : t2_part) {
        Eigen::VectorXd u(p);
        u.head(s) = us;
        u.tail(t) = ut;
        grid_points.push_back(std::move(u));
      }
  }

  struct Cell {
    double value;
    std::size_t index;
  };
  std::vector<Cell> ranked;
  for (std::size_t i = 0; i < grid_points.size() && !f.exhausted(); ++i) {
    auto v = f.eval(grid_points[i]);
    if (!v) break;
    best.consider(*v, grid_points[i]);
    ranked.push_back({*v, i});
    if (best.value <= target) break;
  }
  std::sort(ranked.begin(), ranked.end(), [](const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.index < b.index;
  });

  // Refinement: Nelder-Mead from the best grid cells, then jittered restarts
  // around the incumbent.
  double h = 0.25;
  if (!grid_points.empty()) {
    double edge = 0.0;
    for (int i = 1; i < d; ++i)
      edge = std::max(edge, (chart.simplex_vertices_chart[i] - chart.simplex_vertices_chart[0]).norm());
    const int m_eff = std::max(2, static_cast<int>(std::round(std::pow(
                                      static_cast<double>(grid_points.size()), 1.0 / std::max(p, 1)))));
    h = std::max(edge > 0.0 ? edge / m_eff : 0.0, t > 0 ? 1.0 / m_eff : 0.0);
    if (h <= 0.0) h = 0.25;
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(4, ranked.size()); ++k) {
    if (best.value <= target || f.exhausted()) break;
    nelder_mead(f, grid_points[ranked[k].index], h, target, best);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  double hj = h;
  while (best.value > target && !f.exhausted()) {
    Eigen::VectorXd u = best.u;
    for (int k = 0; k < p; ++k) u(k) += hj * jitter(rng);
    nelder_mead(f, u, hj * 0.5, target, best);
    hj = std::max(hj * 0.5, 1e-7);
  }

  SearchResult out{DiagonalElement::identity(n), x, 1.0, 0, false, {}};
  if (best.u.size() == 0) best.u = Eigen::VectorXd::Zero(p);
  out.a_star = DiagonalElement(chart.log_coords(best.u));
  out.lattice = apply(out.a_star, x);
  out.spread_value = spread(out.lattice);
  out.evaluations = f.count();
  out.converged = out.spread_value - 1.0 <= opts.target_tol;
  out.trace = std::move(f.trace());
  return out;
}

}  // namespace wellround
