#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lipfree/weighted_operator.hpp"
#include "support/random_instances.hpp"

using namespace lipfree;
using Catch::Matchers::WithinAbs;

namespace {

WeightedLipOperator two_cycle_op() {
  // Points 0 (base), 1, 2 with the swap 1 <-> 2 and weights (2, 3).
  auto s = PointedMetricSpace::sum_radial({1.0, 1.0});
  SelfMap f{{0, 2, 1}};
  Weight w{{cx(0, 0), cx(2, 0), cx(3, 0)}, 0.0};
  return WeightedLipOperator::build(s, f, w);
}

}  // namespace

TEST_CASE("matrix construction follows the column rule") {
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0});

  auto id = WeightedLipOperator::build(s, SelfMap::identity(3), Weight::ones(3));
  CHECK(id.matrix()(0, 0) == cx(1, 0));
  CHECK(id.matrix()(1, 1) == cx(1, 0));
  CHECK(id.matrix()(0, 1) == cx(0, 0));

  auto zero = WeightedLipOperator::build(s, SelfMap::constant(3, 0), Weight::ones(3));
  CHECK(zero.matrix().max_abs() == 0.0);

  const auto op = two_cycle_op();
  CHECK(op.matrix()(0, 0) == cx(0, 0));
  CHECK(op.matrix()(0, 1) == cx(3, 0));
  CHECK(op.matrix()(1, 0) == cx(2, 0));
  CHECK(op.matrix()(1, 1) == cx(0, 0));
}

TEST_CASE("admissibility is enforced at build") {
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0});
  SelfMap moves_base{{1, 0, 0}};

  CHECK_THROWS_AS(WeightedLipOperator::build(s, moves_base, Weight::ones(3)),
                  admissibility_error);

  // Zero base weight makes the same map admissible.
  Weight w = Weight::ones(3);
  w.values[0] = 0.0;
  CHECK_NOTHROW(WeightedLipOperator::build(s, moves_base, w));
  CHECK_NOTHROW(WeightedLipOperator::build(s, SelfMap::identity(3), Weight::ones(3)));
}

TEST_CASE("apply moves point masses with weights") {
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0, 0.5});
  SelfMap f{{0, 3, 3, 0}};
  Weight w{{cx(0, 0), cx(2, 1), cx(-1, 0), cx(5, 5)}, 0.0};
  auto op = WeightedLipOperator::build(s, f, w);

  // delta(x) -> w(x) delta(f(x))
  CHECK(op.apply(FreeVector::delta(s, 1)).coefficient(3) == cx(2, 1));
  // Images at the base vanish.
  CHECK(op.apply(FreeVector::delta(s, 3)).zero());
  // Collisions sum before the zero test.
  const FreeVector both = FreeVector::delta(s, 1) + FreeVector::delta(s, 2);
  const FreeVector image = op.apply(both);
  CHECK(image.support() == std::vector<int>{3});
  CHECK(image.coefficient(3) == cx(1, 1));
}

TEST_CASE("matrix action matches apply on random vectors") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = testing::random_problem(rng, 12, 0.2);
    auto op = WeightedLipOperator::build(p.space, p.f, p.w);
    const FreeVector v = testing::random_free_vector(rng, p.space, 6, false);

    std::vector<cx> coords(op.basis_points().size(), cx(0, 0));
    for (const auto& [idx, c] : v.coefficients()) coords[op.basis_index(idx)] = c;
    const std::vector<cx> image_coords = op.matrix().apply(coords);
    const FreeVector image = op.apply(v);
    for (size_t k = 0; k < image_coords.size(); ++k) {
      CAPTURE(trial, k);
      REQUIRE(std::abs(image_coords[k] - image.coefficient(op.point_of_basis(
                                             static_cast<int>(k)))) <= 1e-13);
    }
  }
}

TEST_CASE("powers compose map iterates and weight products") {
  const auto op = two_cycle_op();

  const auto p1 = op.power(1);
  CHECK((p1.matrix() - op.matrix()).max_abs() == 0.0);

  // [[0,3],[2,0]]^2 = [[6,0],[0,6]]
  const auto p2 = op.power(2);
  CHECK_THAT(std::abs(p2.matrix()(0, 0) - cx(6, 0)), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(p2.matrix()(1, 1) - cx(6, 0)), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(p2.matrix()(0, 1)), WithinAbs(0.0, 1e-12));

  const auto direct = op.matrix().power(2);
  CHECK((p2.matrix() - direct).max_abs() <= 1e-10);
}

TEST_CASE("power matches matrix powers on random instances") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = testing::random_problem(rng, 10, 0.2);
    auto op = WeightedLipOperator::build(p.space, p.f, p.w);
    for (int n : {2, 3, 5}) {
      CAPTURE(trial, n);
      REQUIRE((op.power(n).matrix() - op.matrix().power(n)).max_abs() <= 1e-10);
    }
    // Power of a sum of exponents agrees with the matrix product.
    const auto p23 = op.power(2).matrix() * op.power(3).matrix();
    REQUIRE((op.power(5).matrix() - p23).max_abs() <= 1e-10);
  }
}

TEST_CASE("unweighted powers are iterates of the map") {
  auto s = PointedMetricSpace::sum_radial({1.0, 1.0, 1.0});
  SelfMap f{{0, 2, 3, 1}};
  auto op = WeightedLipOperator::build(s, f, Weight::ones(4));
  const auto p3 = op.power(3);
  for (int x = 0; x < 4; ++x) {
    CHECK(p3.map()(x) == f.iterate(x, 3));
    CHECK(p3.weight()(x) == cx(1, 0));
  }
}

TEST_CASE("boundedness constants on hand-checked cases") {
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0, 0.5});

  // Identity with unit weights: both quantities bounded by 1.
  auto id = WeightedLipOperator::build(s, SelfMap::identity(4), Weight::ones(4));
  CHECK(id.boundedness().A <= 1.0 + 1e-12);
  CHECK(id.boundedness().B <= 1.0 + 1e-12);

  // Zero weight kills both.
  Weight zero{std::vector<cx>(4, cx(0, 0)), 0.0};
  auto z = WeightedLipOperator::build(s, SelfMap::identity(4), zero);
  CHECK(z.boundedness().A == 0.0);
  CHECK(z.boundedness().B == 0.0);

  // Constant map to a fixed nonbase point: nonbase pairs contribute nothing
  // (equal images, equal weights), so the suprema are attained against the
  // base point, where the radial term w(x) d(f(x),0) survives.  Here
  // rho = (1, 2, 0.5) and f == point 2, so both suprema are 2 / 0.5 = 4.
  Weight cw = Weight::ones(4);
  cw.values[0] = 0.0;
  auto c = WeightedLipOperator::build(s, SelfMap::constant(4, 2), cw);
  for (int x = 1; x < 4; ++x)
    for (int y = x + 1; y < 4; ++y) {
      const double axy =
          std::abs(cw(x) * s->radius(2) - cw(y) * s->radius(2)) / s->dist(x, y);
      CHECK(axy == 0.0);
    }
  CHECK_THAT(c.boundedness().A, WithinAbs(4.0, 1e-12));
  CHECK_THAT(c.boundedness().B, WithinAbs(4.0, 1e-12));
  CHECK(c.boundedness().witness_A == std::make_pair(0, 3));
}

TEST_CASE("operator norm of unweighted operators is the map Lipschitz constant") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 15; ++trial) {
    auto space = testing::random_space(rng, 2 + static_cast<int>(rng() % 8));
    const SelfMap f =
        testing::random_self_map(rng, space->size(), space->base_index());
    auto op = WeightedLipOperator::build(space, f, Weight::ones(space->size()));
    const NormInterval norm = op.operator_norm();
    CAPTURE(trial);
    REQUIRE(norm.hi - norm.lo <= 1e-8);
    REQUIRE_THAT(norm.hi, WithinAbs(map_lipschitz(*space, f), 1e-8));
  }
}

TEST_CASE("operator norm basics") {
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0});
  Weight zero{std::vector<cx>(3, cx(0, 0)), 0.0};
  auto z = WeightedLipOperator::build(s, SelfMap::identity(3), zero);
  CHECK(z.operator_norm().lo == 0.0);
  CHECK(z.operator_norm().hi == 0.0);

  // The boundedness constants are pairings against explicit unit-Lipschitz
  // functions, so they sit below the norm interval.
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 15; ++trial) {
    auto p = testing::random_problem(rng, 10, 0.2);
    auto op = WeightedLipOperator::build(p.space, p.f, p.w);
    const auto& bc = op.boundedness();
    REQUIRE(std::max(bc.A, bc.B) <= op.operator_norm().hi + 1e-8);
  }
}

TEST_CASE("norm contraction on random real vectors") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    auto p = testing::random_problem(rng, 9, 0.2);
    Weight real_w = p.w;
    for (auto& v : real_w.values) v = std::abs(v);
    if (p.f(p.space->base_index()) != p.space->base_index())
      real_w.values[p.space->base_index()] = 0.0;
    auto op = WeightedLipOperator::build(p.space, p.f, real_w);
    const FreeVector v = testing::random_free_vector(rng, p.space, 5, true);
    const double lhs = norm_real(op.apply(v)).upper;
    const double rhs = op.operator_norm().hi * norm_real(v).upper;
    REQUIRE(lhs <= rhs + 1e-8 * (1.0 + rhs));
  }
}

TEST_CASE("adjoint duality") {
  auto s = PointedMetricSpace::sum_radial({1.0, 0.5, 2.0});
  SelfMap f{{0, 2, 3, 1}};
  Weight w{{cx(0, 0), cx(1, -2), cx(0.5, 0), cx(0, 3)}, 0.0};
  auto op = WeightedLipOperator::build(s, f, w);

  // g = rho: adjoint is x -> w(x) d(f(x), 0).
  std::vector<cx> rho(s->size());
  for (int i = 0; i < s->size(); ++i) rho[i] = s->radius(i);
  const auto wrho = op.adjoint_apply(rho);
  for (int x = 1; x < s->size(); ++x) CHECK(wrho[x] == w(x) * s->radius(f(x)));

  auto id = WeightedLipOperator::build(s, SelfMap::identity(4), Weight::ones(4));
  CHECK(id.adjoint_apply(rho) == rho);

  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 25; ++trial) {
    auto p = testing::random_problem(rng, 10, 0.2);
    auto rop = WeightedLipOperator::build(p.space, p.f, p.w);
    const FreeVector v = testing::random_free_vector(rng, p.space, 6, false);
    auto g = testing::random_unit_lipschitz(rng, *p.space);
    const cx lhs = dual_pairing(rop.adjoint_apply(g), v);
    const cx rhs = dual_pairing(g, rop.apply(v));
    CAPTURE(trial);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("support preservation under application") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = testing::random_problem(rng, 12, 0.3);
    auto op = WeightedLipOperator::build(p.space, p.f, p.w);
    const FreeVector v = testing::random_free_vector(rng, p.space, 8, false);
    const FreeVector image = op.apply(v);
    for (int pt : image.support()) {
      bool covered = false;
      for (const auto& [idx, c] : v.coefficients())
        if (!p.w.is_zero(idx) && p.f(idx) == pt) covered = true;
      REQUIRE(covered);
    }
  }
}

TEST_CASE("cutoff operator weight bands") {
  // Radii straddle the band [2^1, 2^2]: below, at the lower edge, midway, at
  // the upper edge and above.
  auto s = PointedMetricSpace::sum_radial({1.0, 2.0, 3.0, 4.0, 5.0});
  auto t1 = cutoff_operator(s, 1);
  CHECK(t1.weight()(1) == cx(0, 0));    // 1.0 < 2
  CHECK(t1.weight()(2) == cx(0, 0));    // exactly at the lower edge: 2/2 - 1
  CHECK(t1.weight()(3) == cx(0.5, 0));  // midpoint 3 = 3 * 2^0
  CHECK(t1.weight()(4) == cx(1, 0));    // exactly at the upper edge
  CHECK(t1.weight()(5) == cx(1, 0));    // above
  for (int x = 0; x < s->size(); ++x) CHECK(t1.map()(x) == x);

  // Support of the image stays outside the killed ball.
  FreeVector v(s, {{1, cx(1, 0)}, {3, cx(1, 0)}, {5, cx(1, 0)}});
  const FreeVector img = t1.apply(v);
  for (int pt : img.support()) CHECK(s->radius(pt) >= 2.0);
}

TEST_CASE("cutoff operators have norm at most 4") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    auto space = testing::random_space(rng, 2 + static_cast<int>(rng() % 10));
    // Bands that can intersect radii in [0.26, 2.24]: exponents -2..1.
    for (int n = -2; n <= 1; ++n) {
      auto t = cutoff_operator(space, n);
      CAPTURE(trial, n);
      REQUIRE(t.operator_norm().hi <= 4.0 + 1e-6);
    }
  }
}
