#include "demandsig/generators.hpp"
#include "demandsig/instance_io.hpp"
#include "demandsig/model.hpp"
#include "demandsig/wardrop.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace demandsig;

namespace {

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }

Instance<Rational> single_edge(Rational a, Rational b, std::vector<Rational> demands) {
  Instance<Rational> inst;
  inst.network.num_vertices = 2;
  inst.network.source = 0;
  inst.network.sink = 1;
  inst.network.edges.push_back({0, 1, {a, b}});
  inst.states.demands = std::move(demands);
  inst.prior = Belief<Rational>::point_mass(inst.states.size(), inst.states.size() - 1);
  return inst;
}

bool has_error_containing(const ValidationReport& r, const std::string& needle) {
  for (const auto& e : r.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("scalar parsing is exact") {
  CHECK(parse_rational("3/20") == R(3, 20));
  CHECK(parse_rational("0.15") == R(3, 20));
  CHECK(parse_rational("-2") == R(-2));
  CHECK(parse_rational("1e-2") == R(1, 100));
  CHECK(parse_rational("2.5E3") == R(2500));
  CHECK(parse_rational(" 7/14 ") == R(1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK(parse_scalar<double>("1/4") == 0.25);
  CHECK(to_string(R(2, 57)) == "2/57");
}

TEST_CASE("approximate_rational recovers small fractions") {
  CHECK(approximate_rational(2.0 / 57.0, 1000, 1e-12) == R(2, 57));
  CHECK(approximate_rational(0.625, 1000, 1e-12) == R(5, 8));
  CHECK(approximate_rational(3.0, 10, 1e-12) == R(3));
}

TEST_CASE("belief helpers") {
  auto b = Belief<Rational>::two_state(R(1, 4));
  CHECK(b[0] == R(3, 4));
  CHECK(b.high() == R(1, 4));
  CHECK_FALSE(b.is_point_mass());
  auto p = Belief<Rational>::point_mass(3, 1);
  CHECK(p.is_point_mass());
  CHECK(p[1] == 1);
  CHECK(p[0] == 0);
}

TEST_CASE("moments") {
  StateSpace<Rational> st{{R(1, 2), R(1)}, {}};
  auto mu = Belief<Rational>::two_state(R(1, 2));
  CHECK(first_moment(mu, st) == R(3, 4));
  CHECK(second_moment(mu, st) == R(5, 8));
}

TEST_CASE("validate accepts the two golden instances without warnings") {
  for (const auto& inst : {two_link_example<Rational>(), braess_example<Rational>()}) {
    auto r = validate(inst);
    CHECK(r.valid());
    CHECK(r.warnings.empty());
    CHECK(r.dead_edges.empty());
  }
}

TEST_CASE("validate reports violated invariants") {
  SUBCASE("coinciding terminals") {
    auto inst = two_link_example<Rational>();
    inst.network.sink = inst.network.source;
    auto r = validate(inst);
    CHECK_FALSE(r.valid());
    CHECK(has_error_containing(r, "coincide"));
  }
  SUBCASE("self-loop") {
    auto inst = two_link_example<Rational>();
    inst.network.edges.push_back({1, 1, {R(1), R(0)}});
    CHECK(has_error_containing(validate(inst), "self-loop"));
  }
  SUBCASE("negative coefficient") {
    auto inst = two_link_example<Rational>();
    inst.network.edges[0].cost.slope = R(-1);
    CHECK(has_error_containing(validate(inst), "negative"));
  }
  SUBCASE("zero cost needs the free flag") {
    auto inst = two_link_example<Rational>();
    inst.network.edges.push_back({0, 1, {R(0), R(0)}});
    CHECK(has_error_containing(validate(inst), "free"));
    inst.network.edges.back().cost.free = true;
    CHECK(validate(inst).valid());
  }
  SUBCASE("demands must increase") {
    auto inst = two_link_example<Rational>();
    inst.states.demands = {R(1), R(1)};
    CHECK(has_error_containing(validate(inst), "increasing"));
  }
  SUBCASE("prior must sum to one") {
    auto inst = two_link_example<Rational>();
    inst.prior = Belief<Rational>({R(1, 2), R(1, 3)});
    CHECK(has_error_containing(validate(inst), "sum"));
  }
  SUBCASE("prior dimension") {
    auto inst = two_link_example<Rational>();
    inst.prior = Belief<Rational>({R(1)});
    CHECK_FALSE(validate(inst).valid());
  }
  SUBCASE("unreachable sink") {
    auto inst = two_link_example<Rational>();
    inst.network.num_vertices = 3;
    inst.network.sink = 2;
    CHECK(has_error_containing(validate(inst), "reachable"));
  }
  SUBCASE("require_valid throws") {
    auto inst = two_link_example<Rational>();
    inst.network.sink = inst.network.source;
    CHECK_THROWS_AS(require_valid(inst), ValidationError);
  }
}

TEST_CASE("dead edges are reported and can be pruned") {
  auto inst = two_link_example<Rational>();
  inst.network.num_vertices = 4;
  inst.network.edges.push_back({1, 0, {R(1), R(1)}});  // back into s
  inst.network.edges.push_back({0, 2, {R(1), R(1)}});  // dead end
  inst.network.edges.push_back({3, 1, {R(1), R(1)}});  // unreachable
  auto r = validate(inst);
  CHECK(r.valid());
  CHECK(r.dead_edges == std::vector<EdgeId>{2, 3, 4});
  CHECK_FALSE(r.warnings.empty());
  std::vector<EdgeId> kept;
  auto pruned = prune_dead_edges(inst, &kept);
  CHECK(kept == std::vector<EdgeId>{0, 1});
  CHECK(pruned.network.num_edges() == 2);
  CHECK(validate(pruned).warnings.empty());
}

TEST_CASE("normalize examples") {
  SUBCASE("already normalized") {
    auto inst = two_link_example<Rational>();
    auto n = normalize(inst);
    CHECK(n.scale == 1);
    CHECK(n.states.demands == inst.states.demands);
    CHECK(n.network.edges[0].cost.slope == 1);
  }
  SUBCASE("network total") {
    auto inst = single_edge(R(3, 20), R(2), {R(72120), R(360600)});
    auto n = normalize(inst);
    CHECK(n.states.demands[0] == R(1, 5));
    CHECK(n.states.demands[1] == 1);
    CHECK(n.network.edges[0].cost.slope == R(3, 20) * 360600);
    CHECK(n.network.edges[0].cost.offset == 2);
    CHECK(n.scale == 360600);
  }
  SUBCASE("single state") {
    auto n = normalize(single_edge(R(3), R(0), {R(2)}));
    CHECK(n.states.demands == std::vector<Rational>{R(1)});
    CHECK(n.network.edges[0].cost.slope == 6);
  }
  SUBCASE("nonpositive demand") {
    CHECK_THROWS_AS(normalize(single_edge(R(1), R(0), {R(0)})), ValidationError);
  }
}

TEST_CASE("normalize is idempotent on random instances") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto inst = random_two_state_instance<Rational>(seed);
    for (auto& d : inst.states.demands) d *= R(7, 3);
    auto once = normalize(inst);
    auto twice = normalize(once);
    CHECK(twice.states.demands == once.states.demands);
    CHECK(twice.scale == once.scale);
    for (int e = 0; e < once.network.num_edges(); ++e) {
      CHECK(twice.network.edges[e].cost.slope == once.network.edges[e].cost.slope);
    }
  }
}

TEST_CASE("normalize scales the equilibrium cost by D") {
  // Brute-force support enumeration on the raw instance, library solve on
  // the normalized one.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    Instance<Rational> raw;
    raw.network.num_vertices = 3;
    raw.network.source = 0;
    raw.network.sink = 2;
    auto coef = [&](int lo, int hi) { return R(lo + static_cast<long>(rng() % (hi - lo + 1)), 4); };
    raw.network.edges = {{0, 1, {coef(1, 8), coef(0, 8)}},
                         {1, 2, {coef(1, 8), coef(0, 8)}},
                         {0, 2, {coef(1, 8), coef(0, 8)}},
                         {0, 1, {coef(1, 8), coef(0, 8)}}};
    const Rational D = R(1 + static_cast<long>(rng() % 9), 2);
    raw.states.demands = {D * R(1 + static_cast<long>(rng() % 9), 10), D};
    raw.prior = Belief<Rational>::two_state(R(1, 2));
    auto norm = normalize(raw);
    for (const Rational mu : {R(0), R(1, 3), R(4, 5), R(1)}) {
      const Rational raw_cost = oracle::brute_force_cost(raw, mu);
      CHECK(raw_cost == D * equilibrium_cost(norm, Belief<Rational>::two_state(mu)));
    }
  }
}

TEST_CASE("json round trip keeps exact values") {
  auto inst = braess_example<Rational>();
  auto j = instance_to_json(inst);
  CHECK(j["edges"][4]["b"] == "1/20");
  auto back = instance_from_json<Rational>(j);
  CHECK(instance_to_json(back) == j);

  auto as_double = instance_from_json<double>(j);
  CHECK(as_double.network.edges[4].cost.offset == doctest::Approx(0.05));
  CHECK(as_double.states.demands[0] == doctest::Approx(0.4));
}

TEST_CASE("json accepts numbers and strings") {
  json j = {{"vertices", 2},
            {"edges", json::array({{{"tail", 0}, {"head", 1}, {"a", 1}, {"b", "0.15"}}})},
            {"s", 0},
            {"t", 1},
            {"demands", json::array({"1/2", 1})},
            {"prior", json::array({0.5, "1/2"})}};
  auto inst = instance_from_json<Rational>(j);
  CHECK(inst.network.edges[0].cost.offset == R(3, 20));
  CHECK(inst.states.demands[0] == R(1, 2));
  CHECK(inst.prior.high() == R(1, 2));
}

TEST_CASE("malformed json instances are validation errors") {
  CHECK_THROWS_AS(instance_from_json<Rational>(json{{"vertices", 2}}), ValidationError);
  json j = instance_to_json(two_link_example<Rational>());
  j["edges"][0]["a"] = "x/y";
  CHECK_THROWS(instance_from_json<Rational>(j));
  CHECK_THROWS_AS(read_instance<Rational>("/nonexistent/instance.json"), ValidationError);
}

TEST_CASE("convert_instance preserves values") {
  auto r = braess_example<Rational>();
  auto d = convert_instance<double>(r);
  auto back = convert_instance<Rational>(d);
  CHECK(d.network.edges[1].cost.offset == 0.5);
  CHECK(back.network.edges[1].cost.offset == R(1, 2));
  CHECK(back.prior.high() == R(1, 2));
}
