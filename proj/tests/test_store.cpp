#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <sstream>

#include "atlas/error.hpp"
#include "atlas/gzip.hpp"
#include "atlas/store.hpp"
#include "demo_fixture.hpp"

using namespace atlas;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::IoError;
}

std::size_t count_lines(const std::string& s, const std::string& prefix) {
  std::istringstream in(s);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_CASE("gzip") {
  const std::string text(10000, 'x');
  const auto z = gzip_compress(text);
  CHECK(z.size() < text.size());
  CHECK(gzip_decompress(z) == text);
  CHECK(gzip_compress(text) == z);
  CHECK(gzip_decompress(gzip_compress("")) == "");
  CHECK(code_of([&] { gzip_decompress(z.substr(0, z.size() / 2)); }) == Errc::CorruptBundle);
  CHECK(code_of([] { gzip_decompress("not gzip at all"); }) == Errc::CorruptBundle);
}

TEST_CASE("bundle round trip") {
  const auto& b = fixture::demo_bundle();
  CHECK_NOTHROW(validate_bundle(b));
  const auto bytes = encode_bundle(b);
  const auto back = decode_bundle(bytes);
  CHECK(back == b);
  CHECK(encode_bundle(back) == bytes);

  const auto dir = fixture::temp_dir("store");
  save_bundle(b, dir / "a.kcb");
  CHECK(load_bundle(dir / "a.kcb") == b);
  CHECK(code_of([&] { load_bundle(dir / "missing.kcb"); }) == Errc::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty bundle round trips") {
  GraphBundle b;
  b.layout.perTopic[kRootTopic] = Circled(0, 0, 1);
  b.contours.isoLevels = {};
  CHECK(decode_bundle(encode_bundle(b)) == b);
}

TEST_CASE("validation rejects broken bundles") {
  const auto& good = fixture::demo_bundle();
  SUBCASE("dangling similarity edge") {
    auto b = good;
    b.ceg.edges.push_back({"P000", "ZZZ", 9, false});
    CHECK(code_of([&] { validate_bundle(b); }) == Errc::CorruptBundle);
  }
  SUBCASE("instance edge endpoint missing") {
    auto b = good;
    b.tog.edges.at(1).push_back({"nobody::x", b.tog.instances.at(1)[0].instanceId, EdgeKind::within_topic, 1});
    CHECK(code_of([&] { validate_bundle(b); }) == Errc::CorruptBundle);
  }
  SUBCASE("instance without layout") {
    auto b = good;
    b.layout.perInstance.erase(b.tog.instances.at(2)[0].instanceId);
    CHECK(code_of([&] { validate_bundle(b); }) == Errc::CorruptBundle);
  }
  SUBCASE("assignment to unknown topic") {
    auto b = good;
    b.assignment.byLevel[1]["P000"].insert("Nowhere");
    CHECK(code_of([&] { validate_bundle(b); }) == Errc::CorruptBundle);
  }
  SUBCASE("corrupt bytes on decode") {
    auto json = bundle_to_json(good);
    json.replace(json.find("\"P001\""), 6, "\"Q001\"");
    CHECK(code_of([&] { bundle_from_json(json); }) == Errc::CorruptBundle);
    CHECK(code_of([] { bundle_from_json("{\"formatVersion\": 1}"); }) == Errc::CorruptBundle);
  }
  SUBCASE("version mismatch") {
    auto json = bundle_to_json(good);
    const std::string key = "\"formatVersion\":1";
    REQUIRE(json.find(key) != std::string::npos);
    json.replace(json.find(key), key.size(), "\"formatVersion\":2");
    CHECK(code_of([&] { bundle_from_json(json); }) == Errc::VersionMismatch);
  }
}

TEST_CASE("graph database script") {
  const auto& b = fixture::demo_bundle();
  const auto script = graphdb_script(b);
  const auto tally = graphdb_tally(b);
  const auto nodes = count_lines(script, "MERGE (");
  const auto rels = count_lines(script, "MATCH (");
  CHECK(nodes == tally.nodes);
  CHECK(rels == tally.relationships);

  // Independent count from the bundle contents.
  std::size_t instances = 0, instanceEdges = 0, memberships = 0;
  for (const auto& [l, v] : b.tog.instances) instances += v.size();
  for (const auto& [l, v] : b.tog.edges) instanceEdges += v.size();
  for (const auto& [l, m] : b.assignment.byLevel)
    for (const auto& [e, t] : m) memberships += t.size();
  CHECK(nodes == b.corpus.size() + b.thg.size() + instances);
  CHECK(rels == b.ceg.edges.size() + (b.thg.size() - 1) + memberships + instanceEdges);
  CHECK(script.find("{id: \"P000\"}") != std::string::npos);

  GraphBundle empty;
  const auto header = graphdb_script(empty);
  CHECK(count_lines(header, "//") == 2);
  CHECK(count_lines(header, "M") == 0);
}
