#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/covering.hpp"

using namespace wellround;

namespace {

Box box1(double lo, double hi) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(1, lo);
  b.hi = Eigen::VectorXd::Constant(1, hi);
  return b;
}

Box box2(double lx, double hx, double ly, double hy) {
  Box b;
  b.lo.resize(2);
  b.hi.resize(2);
  b.lo << lx, ly;
  b.hi << hx, hy;
  return b;
}

CoverElement element(std::string label, std::vector<Box> boxes) {
  CoverElement e;
  e.label = std::move(label);
  e.boxes = std::move(boxes);
  return e;
}

// Bundled s=1, t=1 tube-and-bricks cover satisfying both hypotheses.
Cover tube_cover() {
  Cover c;
  c.elements.push_back(element("tube", {box2(-0.1, 0.55, -5.0, 5.0)}));
  std::vector<Box> bricks_a, bricks_b;
  for (int m = -5; m <= 5; ++m) {
    bricks_a.push_back(box2(0.45, 1.1, m - 0.3, m + 0.3));
    bricks_b.push_back(box2(0.45, 1.1, m + 0.2, m + 0.8));
  }
  c.elements.push_back(element("bricks_a", std::move(bricks_a)));
  c.elements.push_back(element("bricks_b", std::move(bricks_b)));
  return c;
}

Cover kkm_delta2_cover() {
  Cover c;
  c.elements.push_back(element("E1", {box2(0.15, 1.1, -0.1, 1.1)}));
  std::vector<Box> stairs;
  for (int k = 0; k <= 10; ++k)
    stairs.push_back(box2(-0.1, 0.1 * k, 0.1 * k + 0.15, 1.1));
  c.elements.push_back(element("E2", std::move(stairs)));
  c.elements.push_back(element("E3", {box2(-0.1, 1.1, -0.1, 0.85)}));
  return c;
}

}  // namespace

TEST_CASE("cover order: overlapping intervals and a single element") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover three;
  three.elements = {element("a", {box1(-0.1, 0.4)}), element("b", {box1(0.3, 0.7)}),
                    element("c", {box1(0.6, 1.1)})};
  const auto rep = cover_order(materialize(three, seg));
  CHECK(rep.order == 2);
  // the witness attains the reported multiplicity
  int at_witness = 0;
  for (const auto& e : three.elements) at_witness += e.contains(rep.witness) ? 1 : 0;
  CHECK(at_witness == rep.order);

  Cover one;
  one.elements = {element("all", {box1(-1.0, 2.0)})};
  CHECK(cover_order(materialize(one, seg)).order == 1);
}

TEST_CASE("cover order agrees with a doubled-resolution scan on random box covers") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Cover c;
    c.elements.push_back(element("base", {box2(-0.1, 1.1, -0.1, 1.1)}));
    // edges on the eighth-grid, fattened a touch: every overlap region is
    // thick relative to both scan resolutions
    for (int e = 0; e < 5; ++e) {
      const double x0 = std::floor(u(rng) * 6.0) / 8.0 - 0.01;
      const double y0 = std::floor(u(rng) * 6.0) / 8.0 - 0.01;
      const double wx = (1.0 + std::floor(u(rng) * 3.0)) / 8.0 + 0.02;
      const double wy = (1.0 + std::floor(u(rng) * 3.0)) / 8.0 + 0.02;
      c.elements.push_back(element("r", {box2(x0, x0 + wx, y0, y0 + wy)}));
    }
    const GridDomain d32 = GridDomain::kkm(1, 1, 32);  // unit square
    const GridDomain d64 = GridDomain::kkm(1, 1, 64);
    CHECK(cover_order(materialize(c, d32)).order == cover_order(materialize(c, d64)).order);
  }
}

TEST_CASE("uncovered grid point raises not_a_cover") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover gap;
  gap.elements = {element("a", {box1(-0.1, 0.5)}), element("b", {box1(0.6, 1.1)})};
  CHECK_THROWS_AS(cover_order(materialize(gap, seg)), Error);
}

TEST_CASE("cover mesh: unit boxes, disjoint unions, corner-enumeration oracle") {
  Cover unit;
  unit.elements = {element("u", {box2(0.0, 1.0, 0.0, 1.0)})};
  CHECK(cover_mesh(unit) == doctest::Approx(std::sqrt(2.0)));

  Cover split;
  split.elements = {element("s", {box1(0.0, 1.0), box1(3.0, 4.0)})};
  CHECK(cover_mesh(split) == doctest::Approx(4.0));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    CoverElement e;
    for (int b = 0; b < 3; ++b) {
      const double x0 = u(rng), y0 = u(rng);
      e.boxes.push_back(box2(x0, x0 + 0.2 + 0.5 * std::abs(u(rng)), y0,
                             y0 + 0.2 + 0.5 * std::abs(u(rng))));
    }
    Cover c;
    c.elements = {e};
    // independent oracle: farthest pair among all box corners
    double oracle = 0.0;
    for (const auto& b1 : e.boxes)
      for (const auto& b2 : e.boxes)
        for (int c1 = 0; c1 < 4; ++c1)
          for (int c2 = 0; c2 < 4; ++c2) {
            Eigen::Vector2d p((c1 & 1) ? b1.hi(0) : b1.lo(0), (c1 & 2) ? b1.hi(1) : b1.lo(1));
            Eigen::Vector2d q((c2 & 1) ? b2.hi(0) : b2.lo(0), (c2 & 2) ? b2.hi(1) : b2.lo(1));
            oracle = std::max(oracle, (p - q).norm());
          }
    CHECK(cover_mesh(c) == doctest::Approx(oracle).epsilon(1e-12));
  }

  Cover unbounded;
  unbounded.elements = {element("u", {box1(-1e300, 0.5)})};
  CHECK_THROWS_AS(cover_mesh(unbounded), Error);
}

TEST_CASE("Lebesgue number of the classic interval cover is 0.1 up to a grid step") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover c;
  c.elements = {element("lo", {box1(-1e300, 0.6)}), element("hi", {box1(0.4, 1e300)})};
  const double leb = cover_lebesgue(materialize(c, seg));
  CHECK(std::abs(leb - 0.1) <= 1.0 / 32.0);
}

TEST_CASE("Lebesgue number saturates at the domain radius for an all-covering element") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover c;
  c.elements = {element("all", {box1(-1e300, 1e300)})};
  CHECK(std::abs(cover_lebesgue(materialize(c, seg)) - 0.5) <= 1.0 / 32.0);
}

TEST_CASE("Lebesgue number decreases as the overlap shrinks") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  double prev = 1e18;
  for (double w : {0.3, 0.2, 0.1, 0.05}) {
    Cover c;
    c.elements = {element("lo", {box1(-1e300, 0.5 + w)}),
                  element("hi", {box1(0.5 - w, 1e300)})};
    const double leb = cover_lebesgue(materialize(c, seg));
    CHECK(leb < prev);
    prev = leb;
  }
}

TEST_CASE("nerve of interval covers") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover overlap;
  overlap.elements = {element("a", {box1(-0.1, 0.6)}), element("b", {box1(0.4, 1.1)})};
  const auto nv = nerve(materialize(overlap, seg));
  CHECK(nv.faces == std::set<std::vector<int>>{{0}, {1}, {0, 1}});
  CHECK(nv.order() == 2);
  CHECK(nv.order() == cover_order(materialize(overlap, seg)).order);

  Cover disjoint;
  disjoint.elements = {element("a", {box1(-0.1, 0.45)}), element("b", {box1(0.55, 1.1)}),
                       element("c", {box1(0.3, 0.7)})};
  const auto nv2 = nerve(materialize(disjoint, seg));
  CHECK(nv2.faces.count({0, 1}) == 0);  // disjoint pair: no edge
  CHECK(nv2.faces.count({0, 2}) == 1);
  CHECK(nv2.faces.count({1, 2}) == 1);
}

TEST_CASE("nerve order equals cover order on the tube cover") {
  const GridDomain dom = GridDomain::simplex_box(1, 1, 1.0, 4.0, 16);
  const auto gc = materialize(tube_cover(), dom);
  CHECK(nerve(gc).order() == cover_order(gc).order);
}

TEST_CASE("separate_components: basic, degenerate, and random configurations") {
  const GridDomain seg = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  const auto g1 = element("g1", {box1(-0.1, 0.6)});
  const auto g2 = element("g2", {box1(0.4, 1.1)});
  const auto z = element("z", {box1(0.35, 0.65)});
  const auto es = separate_components({g1, g2}, z, seg);
  REQUIRE(es.size() == 2);
  for (std::size_t o = 0; o < seg.num_points(); ++o) {
    CHECK(!(es[0][o] && es[1][o]));  // disjoint
    const Eigen::VectorXd p = seg.point(o);
    // G_i \ Z inside E_i, E_i inside G_i
    if (g1.contains(p) && !z.contains(p)) CHECK(es[0][o]);
    if (es[0][o]) CHECK(g1.contains(p));
    if (g2.contains(p) && !z.contains(p)) CHECK(es[1][o]);
    if (es[1][o]) CHECK(g2.contains(p));
  }

  // Z covering everything: F_i empty, E_i may be empty.
  const auto all_z = element("z", {box1(-1.0, 2.0)});
  const auto es2 = separate_components({g1, g2}, all_z, seg);
  for (std::size_t o = 0; o < seg.num_points(); ++o) {
    CHECK_FALSE(es2[0][o]);
    CHECK_FALSE(es2[1][o]);
  }

  // hypothesis violation: intersection leaking outside Z
  const auto thin_z = element("z", {box1(0.48, 0.52)});
  CHECK_THROWS_AS(separate_components({g1, g2}, thin_z, seg), Error);

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 15; ++rep) {
    const double a1 = 0.3 * u(rng), b1 = 0.45 + 0.2 * u(rng);
    const double a2 = b1 - 0.15, b2 = a2 + 0.3 + 0.3 * u(rng);
    const auto gg1 = element("g1", {box1(a1, b1)});
    const auto gg2 = element("g2", {box1(a2, b2)});
    const auto zz = element("z", {box1(a2 - 0.03, b1 + 0.03)});
    const auto sep = separate_components({gg1, gg2}, zz, seg);
    for (std::size_t o = 0; o < seg.num_points(); ++o) {
      CHECK(!(sep[0][o] && sep[1][o]));
      const Eigen::VectorXd p = seg.point(o);
      if (gg1.contains(p) && !zz.contains(p)) CHECK(sep[0][o]);
      if (sep[0][o]) CHECK(gg1.contains(p));
      if (gg2.contains(p) && !zz.contains(p)) CHECK(sep[1][o]);
      if (sep[1][o]) CHECK(gg2.contains(p));
    }
  }
}

TEST_CASE("fold_to_cfk: examples, idempotence, generator invariance") {
  Eigen::VectorXd one(1);
  one << 1.3;
  CHECK(fold_to_cfk(one)(0) == doctest::Approx(0.7).epsilon(1e-12));

  Eigen::VectorXd two(2);
  two << 0.9, 0.2;
  const auto sorted = fold_to_cfk(two);
  CHECK(sorted(0) == doctest::Approx(0.2));
  CHECK(sorted(1) == doctest::Approx(0.9));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int s = 1 + static_cast<int>(rng() % 3);
    Eigen::VectorXd x(s);
    for (int i = 0; i < s; ++i) x(i) = u(rng);
    const Eigen::VectorXd folded = fold_to_cfk(x);
    // idempotence, exact
    CHECK((fold_to_cfk(folded) - folded).cwiseAbs().maxCoeff() == 0.0);
    CHECK(folded(0) >= 0.0);
    CHECK(folded(s - 1) <= 1.0);
    // generators: swap adjacent, negate first, reflect last at 1
    if (s >= 2) {
      Eigen::VectorXd swapped = x;
      std::swap(swapped(0), swapped(1));
      CHECK((fold_to_cfk(swapped) - folded).cwiseAbs().maxCoeff() <= 1e-12);
    }
    Eigen::VectorXd neg = x;
    neg(0) = -neg(0);
    CHECK((fold_to_cfk(neg) - folded).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::VectorXd refl = x;
    refl(s - 1) = 2.0 - refl(s - 1);
    CHECK((fold_to_cfk(refl) - folded).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("unfold: periodic pullback with matching multiplicity") {
  const GridDomain source = GridDomain::simplex_box(1, 0, 1.0, 0.0, 32);
  Cover c;
  c.elements = {element("lo", {box1(-0.1, 0.6)}), element("hi", {box1(0.4, 1.1)})};

  Eigen::VectorXd lo(1), hi(1);
  lo << -2.0;
  hi << 2.0;
  const GridDomain window = GridDomain::window(lo, hi, 32);
  const auto pulled = unfold_cover(c, source, window);

  // multiplicity at x equals multiplicity of the original at fold(x)
  for (std::size_t o = 0; o < window.num_points(); ++o) {
    const Eigen::VectorXd p = window.point(o);
    const Eigen::VectorXd q = fold_to_cfk(p);
    int direct = 0;
    for (const auto& e : c.elements) direct += e.contains(q) ? 1 : 0;
    CHECK(pulled.multiplicity(o) == direct);
  }
  // 2-periodicity and reflection consistency across tiles
  for (std::size_t o = 0; o < window.num_points(); ++o) {
    const Eigen::VectorXd p = window.point(o);
    if (p(0) + 2.0 <= 2.0 + 1e-12) {
      std::vector<int> idx{static_cast<int>(std::llround((p(0) + 2.0 - lo(0)) * 32))};
      const auto o2 = window.ordinal_at(idx);
      if (o2 >= 0)
        for (std::size_t e = 0; e < pulled.masks.size(); ++e)
          CHECK(pulled.masks[e][o] == pulled.masks[e][static_cast<std::size_t>(o2)]);
    }
    std::vector<int> neg{static_cast<int>(std::llround((-p(0) - lo(0)) * 32))};
    const auto on = window.ordinal_at(neg);
    if (on >= 0)
      for (std::size_t e = 0; e < pulled.masks.size(); ++e)
        CHECK(pulled.masks[e][o] == pulled.masks[e][static_cast<std::size_t>(on)]);
  }
  // pullback order equals source order here (the window folds onto all of Delta)
  CHECK(cover_order(pulled).order == cover_order(materialize(c, source)).order);

  Eigen::VectorXd small_hi(1);
  small_hi << -0.5;
  CHECK_THROWS_AS(unfold_cover(c, source, GridDomain::window(lo, small_hi, 32)), Error);
}

TEST_CASE("certify: s=0, t=1 interval cover has order 2 and no violation") {
  const GridDomain dom = GridDomain::simplex_box(0, 1, 1.0, 4.0, 32);
  Cover c;
  for (int m = -4; m <= 4; ++m) {
    c.elements.push_back(element("i" + std::to_string(m), {box1(m - 0.6, m + 0.6)}));
  }
  const auto rep = certify_multiplicity(materialize(c, dom), true);
  CHECK(rep.order == 2);
  CHECK(rep.order >= rep.s + rep.t + 1);
  CHECK(rep.hyp_i_ok);
  CHECK_FALSE(rep.violated);
  for (const auto& fit : rep.hyp_ii) {
    if (fit.k == 1) CHECK(fit.max_residual <= 0.6 + 1e-9);
  }
}

TEST_CASE("certify: s=1, t=1 tube cover has order 3, hypotheses hold") {
  const GridDomain dom = GridDomain::simplex_box(1, 1, 1.0, 4.0, 32);
  const auto rep = certify_multiplicity(materialize(tube_cover(), dom), true);
  CHECK(rep.order == 3);
  int at_witness = 0;
  for (const auto& e : tube_cover().elements) at_witness += e.contains(rep.witness) ? 1 : 0;
  CHECK(at_witness == 3);
  CHECK(rep.hyp_i_ok);
  CHECK_FALSE(rep.violated);
  // pairwise intersections are bounded bricks: small 0-dim residuals
  for (const auto& fit : rep.hyp_ii)
    if (fit.k == 2) CHECK(fit.max_residual <= 0.75);
}

TEST_CASE("certify flags VIOLATED for the two-tube cover of order s+t") {
  const GridDomain dom = GridDomain::simplex_box(1, 1, 1.0, 4.0, 16);
  Cover c;
  c.elements = {element("t1", {box2(-0.1, 0.55, -5.0, 5.0)}),
                element("t2", {box2(0.45, 1.1, -5.0, 5.0)})};
  const auto rep = certify_multiplicity(materialize(c, dom), true);
  CHECK(rep.order == 2);  // = s + t, contradicting the theorem's conclusion
  CHECK(rep.hyp_i_ok);
  CHECK(rep.violated);
  // the tell: the k=2 intersection is a full tube, so its 0-dim residual is
  // the window half-length rather than a bounded constant
  double worst = 0.0;
  for (const auto& fit : rep.hyp_ii)
    if (fit.k == 2) worst = std::max(worst, fit.max_residual);
  CHECK(worst >= 3.0);
}

TEST_CASE("kkm: segment, triangle, and product-of-segments covers") {
  // Delta^1 x point
  const GridDomain seg = GridDomain::kkm(1, 0, 32);
  Cover two;
  two.elements = {element("a", {box1(-0.1, 0.6)}), element("b", {box1(0.4, 1.1)})};
  const auto rep1 = kkm_check(materialize(two, seg), {{{0, -1}}, {{1, -1}}});
  CHECK(rep1.order == 2);
  CHECK(rep1.required == 2);
  CHECK(rep1.satisfied);

  // Delta^2 x point: barycentric faces 0:{x2=1}, 1:{x1=x2}, 2:{x1=0}
  const GridDomain tri = GridDomain::kkm(2, 0, 32);
  const auto rep2 = kkm_check(materialize(kkm_delta2_cover(), tri),
                              {{{2, -1}}, {{1, -1}}, {{0, -1}}});
  CHECK(rep2.order == 3);
  CHECK(rep2.required == 3);
  CHECK(rep2.satisfied);

  // Delta^1 x Delta^1 with four quadrant elements
  const GridDomain sq = GridDomain::kkm(1, 1, 32);
  Cover four;
  four.elements = {element("00", {box2(-0.1, 0.6, -0.1, 0.6)}),
                   element("01", {box2(-0.1, 0.6, 0.4, 1.1)}),
                   element("10", {box2(0.4, 1.1, -0.1, 0.6)}),
                   element("11", {box2(0.4, 1.1, 0.4, 1.1)})};
  const auto rep3 = kkm_check(materialize(four, sq),
                              {{{0, 0}}, {{0, 1}}, {{1, 0}}, {{1, 1}}});
  CHECK(rep3.order >= 3);
  CHECK(rep3.required == 3);
  CHECK(rep3.satisfied);
}

TEST_CASE("kkm rejects a false face declaration") {
  const GridDomain seg = GridDomain::kkm(1, 0, 32);
  Cover two;
  two.elements = {element("a", {box1(-0.1, 0.6)}), element("b", {box1(0.4, 1.1)})};
  CHECK_THROWS_AS(kkm_check(materialize(two, seg), {{{1, -1}}, {{0, -1}}}), Error);
}
