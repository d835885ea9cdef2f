#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "latgibbs/cumulants.hpp"
#include "latgibbs/model.hpp"
#include "oracles.hpp"

using namespace latgibbs;
using oracle::cumulant_fd;

namespace {

InteractionModel tilted_ising(double lambda = 0.3) {
  FieldSpec f;
  f.default_h = 0.4;
  return build_ising(1, lambda, {1.0}, f);
}

Observable spin_at(const InteractionModel& m, const Point& p) {
  (void)m;
  return Observable{Region({p}), {-1.0, +1.0}};
}

Observable pair_product(const Point& a, const Point& b, double scale) {
  // table over (v_a, v_b) in {-1,+1}^2, last site fastest
  return Observable{Region({a, b}),
                    {scale * 1.0, scale * -1.0, scale * -1.0, scale * 1.0}};
}

}  // namespace

TEST_CASE("is_connected_sequence") {
  CHECK(is_connected_sequence(Region({{0}}), {}));
  CHECK(!is_connected_sequence(Region({{0}}), {Region({{0}, {1}}), Region({{5}, {6}})}));
  CHECK(is_connected_sequence(Region({{0}}), {Region({{1}, {2}}), Region({{0}, {1}})}));
}

TEST_CASE("mixed_moment pinned cases") {
  const auto m = tilted_ising();
  CylinderEvent a;
  a.base = Region({{0}});
  a.clauses.push_back({{Point{0}, {+1.0}}});
  const Observable ia = indicator_observable(m, a);
  CHECK(mixed_moment(m, {ia}) ==
        Catch::Approx(event_probability_p0(m, a)).margin(1e-15));

  // disjoint supports factor into the product of means
  const auto sym = build_ising(1, 0.2, {1.0}, {});
  const Observable s0 = spin_at(sym, {0});
  const Observable s5 = spin_at(sym, {5});
  CHECK(mixed_moment(sym, {s0, s5}) ==
        Catch::Approx(mixed_moment(sym, {s0}) * mixed_moment(sym, {s5}))
            .margin(1e-15));

  // <(w0 w1)(w1 w2)> = <w0><w1^2><w2> = 0 under the symmetric measure
  CHECK(mixed_moment(sym, {pair_product({0}, {1}, 1.0), pair_product({1}, {2}, 1.0)}) ==
        Catch::Approx(0.0).margin(1e-15));
  CHECK(mixed_moment(sym, {pair_product({0}, {1}, 1.0), pair_product({0}, {1}, 1.0)}) ==
        Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("semi_invariant basics") {
  const auto m = tilted_ising();
  CylinderEvent a;
  a.base = Region({{0}});
  a.clauses.push_back({{Point{0}, {+1.0}}});
  const Observable ia = indicator_observable(m, a);

  // length 1 is the mean
  CHECK(semi_invariant(m, {ia}) ==
        Catch::Approx(event_probability_p0(m, a)).margin(1e-15));

  // independent variables have zero joint cumulant
  CHECK(std::abs(semi_invariant(m, {spin_at(m, {0}), spin_at(m, {4})})) <= 1e-15);

  // variance of the symmetric spin
  const auto sym = build_ising(1, 0.2, {1.0}, {});
  CHECK(semi_invariant(sym, {spin_at(sym, {0}), spin_at(sym, {0})}) ==
        Catch::Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(semi_invariant(m, {}), invalid_input);
  CHECK_THROWS_AS(
      semi_invariant(m, std::vector<Observable>(11, spin_at(m, {0}))),
      resource_limit);
}

TEST_CASE("semi_invariant is exactly permutation invariant") {
  const auto m = tilted_ising();
  std::vector<Observable> vars{spin_at(m, {0}), pair_product({0}, {1}, 0.7),
                               pair_product({1}, {2}, -0.4), spin_at(m, {2})};
  const double reference = semi_invariant(m, vars);
  std::mt19937 rng(31);
  for (int it = 0; it < 10; ++it) {
    std::shuffle(vars.begin(), vars.end(), rng);
    CHECK(semi_invariant(m, vars) == reference);  // bitwise
  }
}

TEST_CASE("semi_invariant is multilinear in each argument") {
  const auto m = tilted_ising();
  std::vector<Observable> vars{spin_at(m, {0}), pair_product({0}, {1}, 1.0),
                               spin_at(m, {1})};
  const double base = semi_invariant(m, vars);
  for (double c : {2.0, -0.5, 0.0}) {
    auto scaled = vars;
    for (double& v : scaled[1].table) v *= c;
    CHECK(semi_invariant(m, scaled) ==
          Catch::Approx(c * base).margin(1e-13 * (1.0 + std::abs(base))));
  }
}

TEST_CASE("non-connected sequences have vanishing semi-invariants") {
  // randomized split construction: one group near the base, one far away
  std::mt19937 rng(37);
  std::uniform_int_distribution<int> near_site(-2, 2);
  std::uniform_int_distribution<int> n_near(0, 2);
  std::uniform_int_distribution<int> n_far(1, 2);
  const auto m = tilted_ising(0.5);

  CylinderEvent a;
  a.base = Region({{0}});
  a.clauses.push_back({{Point{0}, {+1.0}}});
  const Observable ia = indicator_observable(m, a);

  for (int it = 0; it < 100; ++it) {
    std::vector<Observable> vars{ia};
    std::vector<Region> sets;
    for (int i = n_near(rng); i > 0; --i) {
      const int s = near_site(rng);
      sets.push_back(Region({{s}, {s + 1}}));
      vars.push_back(pair_product({s}, {s + 1}, 0.5));
    }
    for (int i = n_far(rng); i > 0; --i) {
      const int s = 20 + near_site(rng);
      sets.push_back(Region({{s}, {s + 1}}));
      vars.push_back(pair_product({s}, {s + 1}, 0.5));
    }
    REQUIRE(!is_connected_sequence(a.base, sets));
    CHECK(std::abs(semi_invariant(m, vars)) <= 1e-12);
  }
}

TEST_CASE("partition formula matches finite-difference derivatives") {
  const auto m = tilted_ising();
  const std::vector<Observable> pool{
      spin_at(m, {0}), pair_product({0}, {1}, 0.8), pair_product({1}, {2}, -0.6),
      spin_at(m, {2})};

  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<Observable> vars(pool.begin(), pool.begin() + len);
    const double exact = semi_invariant(m, vars);
    const double fd = cumulant_fd(m, vars, 0.03);
    INFO("length " << len << ": exact " << exact << " fd " << fd);
    CHECK(std::abs(exact - fd) <= 1e-6);
  }

  // repeated arguments too (multiplicity case)
  std::vector<Observable> rep{pair_product({0}, {1}, 0.8), pair_product({0}, {1}, 0.8),
                              spin_at(m, {1})};
  CHECK(std::abs(semi_invariant(m, rep) - cumulant_fd(m, rep, 0.03)) <= 1e-6);
}
