#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "latgibbs/model.hpp"

using namespace latgibbs;

namespace {

CylinderEvent one_site_event(const Point& site, std::vector<double> allowed,
                             Region base = {}) {
  CylinderEvent ev;
  ev.base = base.empty() ? Region({site}) : base;
  ev.clauses.push_back({{site, std::move(allowed)}});
  return ev;
}

}  // namespace

TEST_CASE("build_potts sites and tables") {
  const auto m = build_potts(1, 0.7, 3, {0.5});
  CHECK(m.r() == 1);
  CHECK(m.site({0}).values == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(m.site({0}).prob_of(2.0) == 1.0 / 3.0);

  const auto term = m.term_for(Region({{0}, {1}}));
  REQUIRE(term.has_value());
  REQUIRE(term->table.size() == 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(term->table[i * 3 + j] == (i == j ? 0.7 * 0.5 : 0.0));

  // lambda = 0 kills every table
  const auto free = build_potts(2, 0.0, 2, {1.0});
  for (const auto& t : free.terms_in(cube(1, 2)))
    for (double v : t.table) CHECK(v == 0.0);

  CHECK_THROWS_AS(build_potts(1, 0.5, 1, {1.0}), invalid_input);
  CHECK_THROWS_AS(build_potts(1, 0.5, 2, {1.5}), invalid_input);
  CHECK_THROWS_AS(build_potts(1, -0.5, 2, {1.0}), invalid_input);
}

TEST_CASE("build_ising absorbs the field into the site distribution") {
  const auto sym = build_ising(1, 0.2, {1.0}, {});
  CHECK(sym.site({0}).prob_of(+1.0) == 0.5);
  CHECK(sym.site({0}).prob_of(-1.0) == 0.5);

  FieldSpec f;
  f.default_h = 1.0;
  const auto m = build_ising(1, 0.2, {1.0}, f);
  const double z = std::exp(1.0) + std::exp(-1.0);
  CHECK(m.site({5}).prob_of(+1.0) == Catch::Approx(std::exp(-1.0) / z).epsilon(1e-15));
  CHECK(m.site({5}).prob_of(+1.0) < 0.12);  // around 0.1192

  FieldSpec mixed;
  mixed.overrides[{3}] = -2.0;
  const auto m2 = build_ising(1, 0.2, {1.0}, mixed);
  CHECK(m2.site({0}).prob_of(+1.0) == 0.5);
  CHECK(m2.site({3}).prob_of(+1.0) ==
        Catch::Approx(std::exp(2.0) / (std::exp(2.0) + std::exp(-2.0))));

  const auto term = m.term_for(Region({{0}, {1}}));
  REQUIRE(term.has_value());
  double max_abs = 0.0;
  for (double v : term->table) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs <= 0.2);
  CHECK(term->table == std::vector<double>{0.2, -0.2, -0.2, 0.2});

  CHECK_THROWS_AS(build_ising(1, 0.2, {-1.2}, {}), invalid_input);
}

TEST_CASE("per-axis couplings") {
  const auto m = build_ising(2, 0.5, {1.0, -0.5}, {});
  const auto along_x = m.term_for(Region({{0, 0}, {1, 0}}));
  const auto along_y = m.term_for(Region({{0, 0}, {0, 1}}));
  REQUIRE(along_x.has_value());
  REQUIRE(along_y.has_value());
  CHECK(along_x->table[3] == 0.5);    // (+1,+1)
  CHECK(along_y->table[3] == -0.25);  // (+1,+1)
  CHECK(!m.term_for(Region({{0, 0}, {1, 1}})).has_value());
}

TEST_CASE("build_custom validates terms against the model") {
  SiteSpec sites;
  sites.default_dist.values = {-1.0, +1.0};
  sites.default_dist.probs = {0.5, 0.5};

  // free model with no terms is fine
  const auto free = build_custom(1, 1, 0.0, sites, {});
  CHECK(free.terms_in(cube(3, 1)).empty());

  // S({0,2}) = 2 > r = 1
  CHECK_THROWS_AS(
      build_custom(1, 1, 0.5, sites, {{Region({{0}, {2}}), {0, 0, 0, 0}}}),
      invalid_input);
  // same set accepted at r = 2
  const auto wide =
      build_custom(1, 2, 0.5, sites, {{Region({{0}, {2}}), {0.5, 0, 0, 0.5}}});
  CHECK(wide.term_for(Region({{0}, {2}})).has_value());

  // |value| > lambda rejected, = lambda accepted
  CHECK_THROWS_AS(
      build_custom(1, 1, 0.5, sites,
                   {{Region({{0}, {1}}), {0.5 + 1e-9, 0, 0, 0}}}),
      invalid_input);
  // table size must match the product of supports
  CHECK_THROWS_AS(build_custom(1, 1, 0.5, sites, {{Region({{0}, {1}}), {0.5}}}),
                  invalid_input);
}

TEST_CASE("site distribution validation") {
  SiteDistribution bad;
  bad.values = {1.0, 1.0};
  bad.probs = {0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), invalid_input);
  bad.values = {1.0, 2.0};
  bad.probs = {0.6, 0.6};
  CHECK_THROWS_AS(bad.validate(), invalid_input);
  bad.probs = {-0.1, 1.1};
  CHECK_THROWS_AS(bad.validate(), invalid_input);
}

TEST_CASE("cylinder event validation") {
  CylinderEvent ev;
  CHECK_THROWS_AS(ev.validate(), invalid_input);  // empty base
  ev.base = Region({{0}});
  ev.clauses.push_back({{Point{1}, {1.0}}});
  CHECK_THROWS_AS(ev.validate(), invalid_input);  // site outside base
  ev.clauses.clear();
  ev.clauses.push_back({{Point{0}, {}}});
  CHECK_THROWS_AS(ev.validate(), invalid_input);  // empty allowed set
}

TEST_CASE("event_probability_p0 pinned cases") {
  const auto ising = build_ising(1, 0.1, {1.0}, {});
  CHECK(event_probability_p0(ising, one_site_event({0}, {+1.0})) == 0.5);

  const auto potts = build_potts(1, 0.1, 4, {1.0});
  CHECK(event_probability_p0(potts, one_site_event({0}, {1.0, 2.0})) == 0.5);

  // whole space: one empty-constraint clause
  CylinderEvent whole;
  whole.base = Region({{0}});
  whole.clauses.push_back({});
  CHECK(event_probability_p0(ising, whole) == 1.0);

  // empty event: no clauses
  CylinderEvent empty;
  empty.base = Region({{0}});
  CHECK(event_probability_p0(ising, empty) == 0.0);

  // values outside the support contribute nothing
  CHECK(event_probability_p0(potts, one_site_event({0}, {9.0})) == 0.0);
}

TEST_CASE("event_probability_p0 adds over disjoint clauses and factorizes") {
  const auto potts = build_potts(1, 0.3, 3, {1.0});
  const Region base({{0}, {1}});

  CylinderEvent a = one_site_event({0}, {1.0}, base);
  CylinderEvent b = one_site_event({0}, {2.0}, base);
  CylinderEvent both;
  both.base = base;
  both.clauses = {a.clauses[0], b.clauses[0]};
  CHECK(event_probability_p0(potts, both) ==
        Catch::Approx(event_probability_p0(potts, a) +
                      event_probability_p0(potts, b))
            .margin(1e-15));

  // site independence
  CylinderEvent joint;
  joint.base = base;
  joint.clauses.push_back({{Point{0}, {1.0, 3.0}}, {Point{1}, {2.0}}});
  CHECK(event_probability_p0(potts, joint) ==
        Catch::Approx((2.0 / 3.0) * (1.0 / 3.0)).margin(1e-15));

  // overlapping clauses handled by inclusion-exclusion
  CylinderEvent overlap;
  overlap.base = base;
  overlap.clauses.push_back({{Point{0}, {1.0}}});
  overlap.clauses.push_back({{Point{1}, {1.0}}});
  const double p = 1.0 / 3.0;
  CHECK(event_probability_p0(potts, overlap) ==
        Catch::Approx(p + p - p * p).margin(1e-15));
}

TEST_CASE("event_probability_p0 matches a direct enumeration on random DNFs") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> coin(0, 1);
  const auto potts = build_potts(1, 0.3, 3, {1.0});
  const Region base({{0}, {1}, {2}});

  for (int it = 0; it < 30; ++it) {
    CylinderEvent ev;
    ev.base = base;
    const int clauses = 1 + it % 3;
    for (int c = 0; c < clauses; ++c) {
      std::map<Point, std::vector<double>> clause;
      for (const auto& site : base.pts()) {
        if (coin(rng) == 0) continue;
        std::vector<double> allowed;
        for (double v : {1.0, 2.0, 3.0})
          if (coin(rng)) allowed.push_back(v);
        if (!allowed.empty()) clause[site] = allowed;
      }
      ev.clauses.push_back(clause);
    }

    // brute force over all 27 assignments
    double expect = 0.0;
    for (int x0 = 1; x0 <= 3; ++x0)
      for (int x1 = 1; x1 <= 3; ++x1)
        for (int x2 = 1; x2 <= 3; ++x2) {
          const std::map<Point, double> w{{{0}, double(x0)}, {{1}, double(x1)},
                                          {{2}, double(x2)}};
          bool sat = false;
          for (const auto& clause : ev.clauses) {
            bool ok = true;
            for (const auto& [site, allowed] : clause)
              ok = ok && std::find(allowed.begin(), allowed.end(),
                                   w.at(site)) != allowed.end();
            if (ok) sat = true;
          }
          if (sat) expect += 1.0 / 27.0;
        }
    CHECK(event_probability_p0(potts, ev) == Catch::Approx(expect).margin(1e-13));
  }
}

TEST_CASE("built models respect the lambda bound on every window") {
  const auto models = {build_potts(2, 0.4, 3, {-1.0}),
                       build_ising(2, 0.2, {0.3, -1.0}, {})};
  for (const auto& m : models)
    for (const auto& t : m.terms_in(cube(2, 2))) {
      CHECK(t.set.member_of(m.r()));
      for (double v : t.table) CHECK(std::abs(v) <= m.lambda());
    }
}

TEST_CASE("indicator observable matches the clause semantics") {
  const auto ising = build_ising(1, 0.1, {1.0}, {});
  CylinderEvent ev;
  ev.base = Region({{0}, {1}});
  ev.clauses.push_back({{Point{0}, {+1.0}}, {Point{1}, {-1.0}}});
  const Observable ia = indicator_observable(ising, ev);
  // configs in odometer order over sorted sites, last site fastest:
  // (-1,-1), (-1,+1), (+1,-1), (+1,+1)
  CHECK(ia.table == std::vector<double>{0.0, 0.0, 1.0, 0.0});
}
