#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atlas/ceg.hpp"
#include "atlas/error.hpp"
#include "atlas/synth.hpp"
#include "oracles.hpp"

using namespace atlas;

namespace {

AnnotationTable table(std::map<EntityId, std::vector<ConceptId>> rows) {
  AnnotationTable t;
  for (auto& [e, cs] : rows) {
    auto& row = t.rows[e];
    for (auto& c : cs) row[c] = 1;
  }
  return t;
}

std::set<oracle::EdgeKey> keys(const CoreGraph& g) {
  std::set<oracle::EdgeKey> out;
  for (const auto& e : g.edges) out.emplace(e.a, e.b, e.weight);
  return out;
}

}  // namespace

TEST_CASE("threshold boundary") {
  auto five = table({{"a", {"1", "2", "3", "4", "5", "6"}}, {"b", {"1", "2", "3", "4", "5", "7"}}});
  auto four = table({{"a", {"1", "2", "3", "4", "6"}}, {"b", {"1", "2", "3", "4", "7"}}});
  const auto g5 = build_ceg(five);
  REQUIRE(g5.edges.size() == 1);
  CHECK(g5.edges[0].weight == 5);
  CHECK_FALSE(g5.edges[0].synthetic);
  CHECK(build_ceg(four).edges.empty());
  CHECK(build_ceg(four, 4).edges.size() == 1);
}

TEST_CASE("build_ceg equals the pairwise oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto eat = random_annotations(seed, 60, 25, 14);
    for (int tau : {1, 3, 5}) CHECK(keys(build_ceg(eat, tau)) == oracle::ceg_edges(eat, tau));
  }
}

TEST_CASE("build_ceg edge cases") {
  CHECK_THROWS_AS(build_ceg(AnnotationTable{}), Error);
  CHECK_THROWS_AS(build_ceg(table({{"a", {"1"}}}), 0), Error);
  const auto g = build_ceg(table({{"b", {}}, {"a", {"1"}}}));
  CHECK(g.nodes == std::vector<EntityId>{"a", "b"});
  CHECK(g.edges.empty());
  CHECK(component_count(g) == 2);
}

TEST_CASE("ensure_connected") {
  SUBCASE("already connected graph is unchanged") {
    auto eat = table({{"a", {"1", "2", "3", "4", "5"}}, {"b", {"1", "2", "3", "4", "5"}}});
    auto g = build_ceg(eat);
    CHECK(ensure_connected(g, eat) == g);
  }
  SUBCASE("best cross pair with 3 shared concepts") {
    auto eat = table({{"a", {"1", "2", "3", "4", "5", "x"}},
                      {"b", {"1", "2", "3", "4", "5", "y"}},
                      {"c", {"x", "y", "q"}},
                      {"d", {"x", "y", "q", "r"}}});
    // c and d share 3 < 5; a-c share 1, b-d share 1, a-d share 1.
    auto g = ensure_connected(build_ceg(eat), eat);
    CHECK(component_count(g) == 1);
    auto synthetic = std::count_if(g.edges.begin(), g.edges.end(), [](auto& e) { return e.synthetic; });
    // {a,b} and {c}, {d}: c-d (3) joins two, then one weight-1 edge.
    CHECK(synthetic == 2);
    bool cd = false;
    for (auto& e : g.edges)
      if (e.a == "c" && e.b == "d") cd = e.weight == 3 && e.synthetic;
    CHECK(cd);
  }
  SUBCASE("two components, one bridge of weight 3") {
    auto eat = table({{"a", {"1", "2", "3", "4", "5", "x", "y", "z"}},
                      {"b", {"1", "2", "3", "4", "5"}},
                      {"c", {"6", "7", "8", "9", "0", "x", "y", "z"}},
                      {"d", {"6", "7", "8", "9", "0"}}});
    auto g = ensure_connected(build_ceg(eat), eat);
    CHECK(g.edges.size() == 3);
    auto added = std::find_if(g.edges.begin(), g.edges.end(), [](auto& e) { return e.synthetic; });
    REQUIRE(added != g.edges.end());
    CHECK(added->a == "a");
    CHECK(added->b == "c");
    CHECK(added->weight == 3);
  }
  SUBCASE("k isolated components use weight-0 edges by folder prefix") {
    auto eat = table({{"a", {"1"}}, {"b", {"2"}}, {"c", {"3"}}, {"d", {"4"}}});
    std::vector<EntityRecord> recs(4);
    const char* ids[] = {"a", "b", "c", "d"};
    const char* folders[] = {"X/Y/Z", "Q", "X/Y", "Q/R"};
    for (int i = 0; i < 4; ++i) {
      recs[static_cast<std::size_t>(i)].id = ids[i];
      recs[static_cast<std::size_t>(i)].folderPaths = {folders[i]};
    }
    auto g = ensure_connected(build_ceg(eat), eat, recs);
    CHECK(g.edges.size() == 3);
    CHECK(component_count(g) == 1);
    std::set<std::pair<EntityId, EntityId>> pairs;
    for (auto& e : g.edges) {
      CHECK(e.weight == 0);
      CHECK(e.synthetic);
      pairs.emplace(e.a, e.b);
    }
    CHECK(pairs.count({"a", "c"}));
    CHECK(pairs.count({"b", "d"}));
  }
}

TEST_CASE("ensure_connected on random corpora") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto eat = random_annotations(seed, 50, 40, 8);
    const auto g0 = build_ceg(eat);
    const int before = oracle::components(g0);
    CHECK(component_count(g0) == before);
    const auto g = ensure_connected(g0, eat);
    CHECK(oracle::components(g) == 1);
    CHECK(g.edges.size() - g0.edges.size() == static_cast<std::size_t>(before - 1));
    for (auto& e : g.edges) CHECK(e.a < e.b);
  }
}
