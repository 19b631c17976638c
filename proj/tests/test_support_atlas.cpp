#include "demandsig/atlas.hpp"
#include "demandsig/generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace demandsig;

namespace {

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }

Belief<Rational> B(const Rational& high) { return Belief<Rational>::two_state(high); }

template <Scalar T>
void check_structure(const PiecewiseLinearCost<T>& atlas, double tol) {
  const auto& seg = atlas.segments();
  REQUIRE_FALSE(seg.empty());
  CHECK(seg.front().lo == T(0));
  CHECK(seg.back().hi == T(1));
  for (std::size_t i = 0; i < seg.size(); ++i) {
    CHECK(seg[i].lo < seg[i].hi);
    if (i == 0) continue;
    CHECK(seg[i].lo == seg[i - 1].hi);
    CHECK(seg[i].support != seg[i - 1].support);
    const double jump = to_double(T(seg[i].value_at(seg[i].lo) - seg[i - 1].value_at(seg[i].lo)));
    CHECK(std::abs(jump) <= tol);
  }
}

}  // namespace

TEST_CASE("support ranges on the goldens") {
  auto two = braess_example<Rational>();
  auto r = support_range(two, Support{{0, 1, 2, 3, 4}});
  REQUIRE(r);
  CHECK(r->lo == R(2, 57));
  CHECK(r->hi == R(2, 3));
  CHECK(r->cost_lo == R(2, 5));
  CHECK(r->cost_hi == R(19, 25));

  r = support_range(two, Support{{0, 3, 4}});
  REQUIRE(r);
  CHECK(r->lo == 0);
  CHECK(r->hi == R(2, 57));

  auto one = two_link_example<Rational>();
  r = support_range(one, Support{{0, 1}});
  REQUIRE(r);
  CHECK(r->lo == R(1, 2));
  CHECK(r->hi == 1);

  // The constant link alone is undercut by the empty congestible link.
  CHECK_FALSE(support_range(one, Support{{1}}));

  auto oned = two_link_example<double>();
  auto rd = support_range(oned, Support{{0, 1}});
  REQUIRE(rd);
  CHECK(rd->lo == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-link atlas") {
  auto atlas = enumerate_supports(two_link_example<Rational>());
  REQUIRE(atlas.size() == 2);
  CHECK(atlas.breakpoints() == std::vector<Rational>{R(0), R(1, 2), R(1)});
  CHECK(atlas(R(0)) == R(1, 4));
  CHECK(atlas(R(1, 2)) == R(5, 8));
  CHECK(atlas(R(1)) == R(5, 6));
  CHECK(atlas.segments()[0].support == Support{{0}});
  CHECK(atlas.segments()[1].support == Support{{0, 1}});
  check_structure(atlas, 0);
}

TEST_CASE("braess atlas") {
  auto atlas = enumerate_supports(braess_example<Rational>());
  REQUIRE(atlas.size() == 3);
  CHECK(atlas.breakpoints() == std::vector<Rational>{R(0), R(2, 57), R(2, 3), R(1)});
  CHECK(atlas(R(0)) == R(17, 50));
  CHECK(atlas(R(2, 57)) == R(2, 5));
  CHECK(atlas(R(2, 3)) == R(19, 25));
  CHECK(atlas(R(1)) == 1);
  CHECK(atlas(R(1, 2)) == R(133, 200));
  check_structure(atlas, 0);

  auto approx = enumerate_supports(braess_example<double>());
  REQUIRE(approx.size() == 3);
  CHECK(approx.breakpoints()[1] == doctest::Approx(2.0 / 57).epsilon(1e-12));
  CHECK(approx.breakpoints()[2] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  check_structure(approx, 1e-9);
}

TEST_CASE("single edge atlas") {
  Instance<Rational> inst;
  inst.network = {2, {{0, 1, {R(2), R(1)}}}, 0, 1};
  inst.states = {{R(1, 3), R(1)}, {}};
  inst.prior = B(R(1, 2));
  auto atlas = enumerate_supports(inst);
  CHECK(atlas.size() == 1);
  CHECK(atlas.breakpoints() == std::vector<Rational>{R(0), R(1)});
  CHECK(atlas.is_linear(0));
}

TEST_CASE("grid oracle examples") {
  auto one = grid_oracle(two_link_example<Rational>(), 5);
  std::vector<Rational> want{R(1, 4), R(7, 16), R(5, 8), R(35, 48), R(5, 6)};
  REQUIRE(one.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(one[i].first == R(static_cast<long>(i), 4));
    CHECK(one[i].second == want[i]);
  }
  auto two = grid_oracle(braess_example<Rational>(), 3);
  REQUIRE(two.size() == 3);
  CHECK(two[0].second == R(17, 50));
  CHECK(two[1].second == R(133, 200));
  CHECK(two[2].second == 1);
  auto ends = grid_oracle(braess_example<Rational>(), 2);
  REQUIRE(ends.size() == 2);
  CHECK(ends[0].second == R(17, 50));
  CHECK(ends[1].second == 1);
}

TEST_CASE("atlas structure and pointwise agreement on random instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto exact = enumerate_supports(random_two_state_instance<Rational>(seed));
    check_structure(exact, 0);
    auto inst = random_two_state_instance<double>(seed);
    auto atlas = enumerate_supports(inst);
    check_structure(atlas, 1e-9);
    CHECK(atlas.size() == exact.size());
    for (const auto& [mu, c] : grid_oracle(inst, 101)) CHECK(std::abs(atlas(mu) - c) <= 1e-7);
    for (const auto& s : atlas.segments()) {
      const double mid = (s.lo + s.hi) / 2;
      CHECK(std::abs(s.value_at(mid) - equilibrium_cost(inst, Belief<double>::two_state(mid))) <= 1e-8);
    }
  }
}

TEST_CASE("atlas agrees with brute-force support enumeration") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    auto inst = random_two_state_instance<Rational>(seed, {6, 9});
    auto atlas = enumerate_supports(inst);
    for (const auto& s : atlas.segments()) {
      const Rational mid = (s.lo + s.hi) / 2;
      CHECK(s.value_at(mid) == oracle::brute_force_cost(inst, mid));
    }
    for (const auto& [mu, c] : atlas.vertices()) CHECK(c == oracle::brute_force_cost(inst, mu));
  }
}

TEST_CASE("equilibria inside a segment are collinear") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto inst = random_two_state_instance<Rational>(seed);
    auto atlas = enumerate_supports(inst);
    for (const auto& s : atlas.segments()) {
      const Rational w = s.hi - s.lo;
      const Rational m1 = s.lo + w / 4, m2 = s.lo + w / 2, m3 = s.lo + 3 * w / 4;
      const Rational c1 = equilibrium_cost(inst, B(m1));
      const Rational c2 = equilibrium_cost(inst, B(m2));
      const Rational c3 = equilibrium_cost(inst, B(m3));
      CHECK((c2 - c1) * (m3 - m2) == (c3 - c2) * (m2 - m1));
      // Supports read off the flow agree with the segment label.
      CHECK(active_subnetwork(inst, solve_wardrop(inst, B(m2))) == s.support);
    }
  }
}

TEST_CASE("shape classification") {
  using Seg = AtlasSegment<double>;
  PiecewiseLinearCost<double> concave({Seg{0, 0.5, 0, 2, {{0}}}, Seg{0.5, 1, 0.5, 1, {{0, 1}}}});
  CHECK(concave.is_concave(1e-9));
  CHECK_FALSE(concave.is_linear(1e-9));
  PiecewiseLinearCost<double> convex({Seg{0, 0.5, 1, 0, {{0}}}, Seg{0.5, 1, 0.5, 1, {{0, 1}}}});
  CHECK_FALSE(convex.is_concave(1e-9));
  PiecewiseLinearCost<double> flat({Seg{0, 0.5, 1, 1, {{0}}}, Seg{0.5, 1, 1, 1 + 1e-12, {{0, 1}}}});
  CHECK(flat.is_linear(1e-9));
  CHECK(flat.is_concave(1e-9));
}

TEST_CASE("atlas export") {
  auto atlas = enumerate_supports(two_link_example<Rational>());
  auto j = atlas_to_json(atlas);
  CHECK(j["breakpoints"] == nlohmann::json::array({"0", "1/2", "1"}));
  CHECK(j["segments"][1]["slope"] == "5/12");
  CHECK(j["segments"][1]["support"] == nlohmann::json::array({0, 1}));
  std::ostringstream csv;
  write_atlas_csv(csv, atlas);
  CHECK(csv.str() == "lo,hi,intercept,slope,support\n0,1/2,1/4,3/4,0\n1/2,1,5/12,5/12,0 1\n");
}

TEST_CASE("multi-state instances are rejected") {
  auto inst = braess_example<Rational>();
  inst.states.demands = {R(1, 5), R(1, 2), R(1)};
  inst.prior = Belief<Rational>({R(1, 3), R(1, 3), R(1, 3)});
  CHECK_THROWS(enumerate_supports(inst));
}
