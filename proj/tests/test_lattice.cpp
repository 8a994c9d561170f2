#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/lattice.hpp"
#include "core/lattice_ops.hpp"

using namespace wellround;

namespace {

Eigen::MatrixXd random_basis(int n, std::mt19937& rng, double span = 1.0) {
  std::uniform_real_distribution<double> u(-span, span);
  while (true) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    if (std::abs(m.determinant()) > 0.1) return m;
  }
}

Eigen::VectorXd random_trace_zero(int n, std::mt19937& rng, double span = 0.5) {
  std::uniform_real_distribution<double> u(-span, span);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t(i) = u(rng);
  t.array() -= t.sum() / n;
  return t;
}

}  // namespace

TEST_CASE("normalize keeps the identity and rescales to covolume 1") {
  const Lattice id = Lattice::normalize(Eigen::MatrixXd::Identity(2, 2));
  CHECK(id.basis().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));

  Eigen::MatrixXd m(2, 2);
  m << 1, 1, std::sqrt(2.0), -std::sqrt(2.0);
  const Lattice x = Lattice::normalize(m);
  // det = -2*sqrt(2); every entry shrinks by (2 sqrt 2)^(1/2).
  const double scale = std::sqrt(2.0 * std::sqrt(2.0));
  CHECK(x.basis()(0, 0) == doctest::Approx(1.0 / scale).epsilon(1e-9));
  CHECK(1.0 / scale == doctest::Approx(1.0 / 1.681793).epsilon(1e-5));
  CHECK(std::abs(x.basis().determinant()) == doctest::Approx(1.0).epsilon(1e-9));

  const Lattice d = Lattice::normalize(2.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(d.basis().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
}

TEST_CASE("normalize rejects singular input") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 4;
  CHECK_THROWS_AS(Lattice::normalize(m), Error);
}

TEST_CASE("diagonal action: identity, explicit scaling, group law") {
  const Lattice z2 = Lattice::normalize(Eigen::MatrixXd::Identity(2, 2));
  const DiagonalElement id = DiagonalElement::identity(2);
  CHECK(apply(id, z2).basis().isApprox(z2.basis(), 1e-12));

  Eigen::VectorXd t(2);
  t << std::log(2.0), -std::log(2.0);
  const Lattice y = apply(DiagonalElement(t), z2);
  Eigen::MatrixXd expected(2, 2);
  expected << 2.0, 0.0, 0.0, 0.5;
  CHECK(y.basis().isApprox(expected, 1e-12));

  std::mt19937 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Lattice x = Lattice::normalize(random_basis(n, rng));
    const DiagonalElement a(random_trace_zero(n, rng));
    const DiagonalElement b(random_trace_zero(n, rng));
    const Lattice lhs = apply(a, apply(b, x));
    const Lattice rhs = apply(a.compose(b), x);
    CHECK((lhs.basis() - rhs.basis()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("apply rejects dimension mismatch") {
  const Lattice z2 = Lattice::normalize(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(apply(DiagonalElement::identity(3), z2), Error);
}

TEST_CASE("trace-zero invariant is enforced") {
  Eigen::VectorXd t(2);
  t << 0.5, 0.0;
  CHECK_THROWS_AS(DiagonalElement{t}, Error);
}

TEST_CASE("well-rounded checks on standard examples") {
  for (int n = 2; n <= 5; ++n) {
    const Lattice zn = Lattice::normalize(Eigen::MatrixXd::Identity(n, n));
    CHECK(is_well_rounded(zn, 0.0));
    CHECK(is_generic_well_rounded(zn, 0.0));
  }

  Eigen::VectorXd t(2);
  t << std::log(2.0), -std::log(2.0);
  const Lattice skew = apply(DiagonalElement(t), Lattice::normalize(Eigen::MatrixXd::Identity(2, 2)));
  CHECK_FALSE(is_well_rounded(skew, 0.0));
  CHECK_THROWS_AS(is_generic_well_rounded(skew, 0.0), Error);

  Eigen::MatrixXd hex(2, 2);
  hex << 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
  const Lattice hexagonal = Lattice::normalize(hex);
  CHECK(is_well_rounded(hexagonal, 0.0));
  CHECK_FALSE(is_generic_well_rounded(hexagonal, 0.0));  // three +/- pairs

  Eigen::MatrixXd d4(4, 4);
  d4 << 1, -1, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1, 0, 0, 1, 1;
  const Lattice d4_lattice = Lattice::normalize(d4);
  CHECK(is_well_rounded(d4_lattice, 0.0));
  CHECK_FALSE(is_generic_well_rounded(d4_lattice, 0.0));  // 12 +/- pairs
}

TEST_CASE("transversality rank of Z^n is n-1") {
  for (int n = 2; n <= 6; ++n) {
    const Lattice zn = Lattice::normalize(Eigen::MatrixXd::Identity(n, n));
    CHECK(wr_transversality_rank(zn) == n - 1);
  }
}

TEST_CASE("transversality rank survives a small generic perturbation") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  int checked = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) += u(rng);
    // Re-round: equalize row lengths so the rows stay joint minima.
    for (int i = 0; i < n; ++i) g.row(i) /= g.row(i).norm();
    const Lattice x = Lattice::normalize(g);
    if (!is_well_rounded(x, 0.0) || !is_generic_well_rounded(x, 0.0)) continue;
    CHECK(wr_transversality_rank(x) == n - 1);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("cover membership on standard lattices") {
  const int n = 4;
  const Lattice zn = Lattice::normalize(Eigen::MatrixXd::Identity(n, n));
  const auto cm = cover_membership(zn, DiagonalElement::identity(n), 0.04);
  REQUIRE(cm.j.has_value());
  CHECK(*cm.j == n);  // dim_delta = n throughout (0, sqrt(2)-1)
  CHECK(cm.all == std::vector<int>{n});

  Eigen::VectorXd t(2);
  t << std::log(2.0), -std::log(2.0);
  const Lattice skew = apply(DiagonalElement(t), Lattice::normalize(Eigen::MatrixXd::Identity(2, 2)));
  const auto cm2 = cover_membership(skew, DiagonalElement::identity(2), 0.1);
  REQUIRE(cm2.j.has_value());
  CHECK(*cm2.j == 1);
}

TEST_CASE("cover membership finds some j on random inputs") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Lattice x = Lattice::normalize(random_basis(n, rng));
    const DiagonalElement a(random_trace_zero(n, rng));
    const auto cm = cover_membership(x, a, 0.04);
    CHECK(cm.j.has_value());
  }
}

TEST_CASE("compactness surrogate: j = n forces alpha above half the derived bound") {
  std::mt19937 rng(31);
  int hits = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Lattice x = Lattice::normalize(random_basis(n, rng));
    const DiagonalElement a(random_trace_zero(n, rng, 0.3));
    const auto cm = cover_membership(x, a, 0.04);
    if (cm.j && *cm.j == n) {
      const double alpha = shortest_length(apply(a, x));
      CHECK(alpha >= 0.5 * minkowski_alpha_lower_bound(n));
      ++hits;
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("log-Lipschitz continuity of alpha along the diagonal flow") {
  std::mt19937 rng(41);
  for (int rep = 0; rep < 15; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Lattice x = Lattice::normalize(random_basis(n, rng));
    const DiagonalElement a(random_trace_zero(n, rng));
    const double lhs = std::abs(std::log(shortest_length(apply(a, x))) -
                                std::log(shortest_length(x)));
    CHECK(lhs <= a.log_coords().cwiseAbs().maxCoeff() + 1e-9);
  }
}
