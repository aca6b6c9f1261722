#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <future>
#include <set>
#include <thread>

#include <json.hpp>

#include "atlas/api.hpp"
#include "atlas/error.hpp"
#include "atlas/gzip.hpp"
#include "atlas/http_server.hpp"
#include "demo_fixture.hpp"

// After Eigen: the resolver headers it pulls in define _res.
#include <httplib.h>

using namespace atlas;
using nlohmann::json;

namespace {

std::shared_ptr<const Snapshot> demo_snapshot() {
  static auto snap = std::make_shared<const Snapshot>(fixture::demo_bundle());
  return snap;
}

HttpRequest get(std::string path, std::map<std::string, std::string> query = {}) {
  HttpRequest r;
  r.path = std::move(path);
  r.query = std::move(query);
  return r;
}

HttpRequest post_export(std::string body) {
  HttpRequest r;
  r.method = "POST";
  r.path = "/api/export";
  r.body = std::move(body);
  return r;
}

std::string error_code(const HttpResponse& r) { return json::parse(r.body).at("error").get<std::string>(); }

std::vector<std::string> csv_lines(const std::string& body) {
  std::vector<std::string> out;
  for (std::size_t pos = 0; pos < body.size();) {
    auto end = body.find("\r\n", pos);
    REQUIRE(end != std::string::npos);
    out.push_back(body.substr(pos, end - pos));
    pos = end + 2;
  }
  return out;
}

}  // namespace

TEST_CASE("map payload matches the occupancy graph at each depth") {
  const auto& b = fixture::demo_bundle();
  const auto snap = demo_snapshot();
  REQUIRE(snap->max_depth() == b.thg.max_depth());
  CHECK(snap->depths() == std::vector<int>{1, 2, 3});
  for (int d = 1; d <= snap->max_depth(); ++d) {
    const auto p = json::parse(*snap->payload(d));
    CHECK(p.at("depth") == d);
    CHECK(p.at("maxDepth") == snap->max_depth());

    std::multiset<std::string> ids, expectedIds;
    for (const auto& n : p.at("instances")) ids.insert(n.at("id").get<std::string>());
    for (const auto& n : b.tog.instances.at(d)) expectedIds.insert(n.instanceId);
    CHECK(ids == expectedIds);

    std::multiset<std::tuple<std::string, std::string, std::string, int>> edges, expectedEdges;
    for (const auto& e : p.at("edges"))
      edges.emplace(e.at("a"), e.at("b"), e.at("kind"), e.at("weight").get<int>());
    for (const auto& e : b.tog.edges.at(d))
      expectedEdges.emplace(e.a, e.b, std::string(to_string(e.kind)), e.weight);
    CHECK(edges == expectedEdges);

    std::size_t expectedTopics = 0;
    for (const auto& [id, n] : b.thg.nodes()) expectedTopics += n.level >= 1 && n.level <= d;
    CHECK(p.at("topics").size() == expectedTopics);
    for (const auto& t : p.at("topics")) CHECK(t.at("level").get<int>() <= d);

    CHECK(render_map_payload(b, d) == *snap->payload(d));
    CHECK(gzip_decompress(*snap->payload_gzip(d)) == *snap->payload(d));
    CHECK(snap->payload_gzip(d)->size() < snap->payload(d)->size());
  }
  CHECK(snap->payload(0) == nullptr);
  CHECK(snap->payload(snap->max_depth() + 1) == nullptr);
  CHECK(*Snapshot(b).payload(2) == *snap->payload(2));
}

TEST_CASE("snapshot of an empty bundle") {
  GraphBundle b;
  b.layout.perTopic[kRootTopic] = Circled(0, 0, 1);
  b.contours.isoLevels = {};
  Snapshot s(b);
  CHECK(s.depths() == std::vector<int>{1});
  const auto p = json::parse(*s.payload(1));
  CHECK(p.at("instances").empty());
  CHECK(p.at("topics").empty());
  CHECK(s.search("anything").entities.empty());
}

TEST_CASE("search ranking") {
  auto b = fixture::demo_bundle();
  b.corpus[0].title = "Zebrafish kinase atlas";
  b.corpus[1].abstract = "A note on zebrafish kinase signalling.";
  const Snapshot s(b);

  const auto r = s.search("zebrafish kinase");
  REQUIRE(r.entities.size() == 2);
  CHECK(r.entities[0].entityId == b.corpus[0].id);
  CHECK(r.entities[1].entityId == b.corpus[1].id);
  CHECK(r.entities[0].score > r.entities[1].score);

  const auto o = s.search("  ONCOLOGY ");
  REQUIRE_FALSE(o.topics.empty());
  CHECK(o.topics[0].label == "Oncology");
  for (std::size_t k = 1; k < o.topics.size(); ++k) CHECK(o.topics[k].score < o.topics[0].score);

  const auto none = s.search("qqqqxyzzy");
  CHECK(none.topics.empty());
  CHECK(none.entities.empty());
  CHECK(s.search("clinical", 3).topics.size() <= 3);
  CHECK_THROWS_AS(s.search("   "), Error);
}

TEST_CASE("entity detail") {
  const auto& b = fixture::demo_bundle();
  const auto snap = demo_snapshot();
  const auto& rec = b.corpus[5];
  const auto d = json::parse(*snap->entity_detail(rec.id));
  CHECK(d.at("id") == rec.id);
  CHECK(d.at("title") == rec.title);
  CHECK(d.at("authors").get<std::vector<std::string>>() == rec.authors);
  CHECK(d.at("concepts").size() == rec.concepts.size());
  std::set<std::string> got, expected;
  for (const auto& n : d.at("instances")) got.insert(n.at("instanceId").get<std::string>());
  for (const auto& [l, v] : b.tog.instances)
    for (const auto& n : v)
      if (n.entityId == rec.id) expected.insert(n.instanceId);
  CHECK(got == expected);
  CHECK_FALSE(snap->entity_detail("nope").has_value());
}

TEST_CASE("csv export") {
  auto b = fixture::demo_bundle();
  b.corpus[0].title = "Commas, \"quotes\" and more";
  const Snapshot s(b);
  std::vector<EntityId> unknown;
  const auto lines = csv_lines(s.export_csv({b.corpus[1].id, b.corpus[0].id, "missing"}, unknown));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "id,title,authors,year,venue,doi,url");
  CHECK(lines[1].rfind(b.corpus[1].id + ",", 0) == 0);
  CHECK(lines[2].rfind(b.corpus[0].id + ",\"Commas, \"\"quotes\"\" and more\",", 0) == 0);
  CHECK(unknown == std::vector<EntityId>{"missing"});
}

TEST_CASE("api routes") {
  ApiService api;
  CHECK(api.handle(get("/healthz")).status == 503);
  auto cold = api.handle(get("/api/map"));
  CHECK(cold.status == 503);
  CHECK(error_code(cold) == "SnapshotNotReady");

  api.set_snapshot(demo_snapshot());
  CHECK(api.handle(get("/healthz")).body == "ok");

  SUBCASE("map") {
    auto r = api.handle(get("/api/map", {{"depth", "2"}}));
    CHECK(r.status == 200);
    CHECK(r.body == *demo_snapshot()->payload(2));
    CHECK(r.header("X-Cache") == "HIT");
    CHECK(r.header("Vary") == "Accept-Encoding");
    CHECK_FALSE(r.header("Content-Encoding"));
    CHECK(api.handle(get("/api/map")).body == *demo_snapshot()->payload(1));

    auto req = get("/api/map", {{"depth", "3"}});
    req.headers["accept-encoding"] = "br, gzip";
    auto z = api.handle(req);
    CHECK(z.header("Content-Encoding") == "gzip");
    CHECK(gzip_decompress(z.body) == *demo_snapshot()->payload(3));
    req.headers["accept-encoding"] = "gzip;q=0";
    CHECK_FALSE(api.handle(req).header("Content-Encoding"));

    for (auto bad : {"0", "4", "-1", "two", "1.5", ""}) {
      auto e = api.handle(get("/api/map", {{"depth", bad}}));
      CHECK(e.status == 400);
      CHECK(error_code(e) == "InvalidDepth");
    }
  }
  SUBCASE("meta") {
    auto m = json::parse(api.handle(get("/api/meta")).body);
    CHECK(m.at("maxDepth") == 3);
    CHECK(m.at("entities") == 200);
  }
  SUBCASE("search") {
    auto r = api.handle(get("/api/search", {{"q", "oncology"}}));
    CHECK(r.status == 200);
    CHECK(json::parse(r.body).at("topics").at(0).at("label") == "Oncology");
    CHECK(error_code(api.handle(get("/api/search", {{"q", " "}}))) == "EmptyQuery");
    CHECK(error_code(api.handle(get("/api/search"))) == "EmptyQuery");
    CHECK(error_code(api.handle(get("/api/search", {{"q", "a"}, {"limit", "0"}}))) == "InvalidLimit");
  }
  SUBCASE("entity") {
    CHECK(api.handle(get("/api/entity/P000")).status == 200);
    auto r = api.handle(get("/api/entity/P999"));
    CHECK(r.status == 404);
    CHECK(error_code(r) == "UnknownEntity");
  }
  SUBCASE("export") {
    auto r = api.handle(post_export(R"(["P003","P004"])"));
    CHECK(r.status == 200);
    CHECK(r.contentType.rfind("text/csv", 0) == 0);
    CHECK(csv_lines(r.body).size() == 3);
    CHECK(r.header("Content-Disposition").has_value());
    CHECK_FALSE(r.header("X-Export-Warning"));
    auto w = api.handle(post_export(R"({"ids":["P003","ghost"]})"));
    CHECK(w.status == 200);
    CHECK(w.header("X-Export-Warning")->find("ghost") != std::string::npos);
    CHECK(error_code(api.handle(post_export("[]"))) == "EmptyList");
    CHECK(error_code(api.handle(post_export("{oops"))) == "MalformedBody");
    CHECK(error_code(api.handle(post_export("[1,2]"))) == "MalformedBody");
  }
  SUBCASE("unknown route") {
    CHECK(api.handle(get("/api/nothing")).status == 404);
    HttpRequest r = get("/api/map");
    r.method = "DELETE";
    CHECK(api.handle(r).status == 404);
  }
}

TEST_CASE("concurrent identical requests give identical bytes") {
  ApiService api(demo_snapshot());
  std::vector<std::future<HttpResponse>> futures;
  for (int k = 0; k < 32; ++k)
    futures.push_back(std::async(std::launch::async, [&] { return api.handle(get("/api/map", {{"depth", "2"}})); }));
  const auto first = futures[0].get();
  for (std::size_t k = 1; k < futures.size(); ++k) {
    const auto r = futures[k].get();
    CHECK(r.status == first.status);
    CHECK(r.body == first.body);
  }
}

TEST_CASE("snapshot swap keeps in-flight references valid") {
  ApiService api(demo_snapshot());
  auto held = api.snapshot();
  GraphBundle empty;
  empty.layout.perTopic[kRootTopic] = Circled(0, 0, 1);
  empty.contours.isoLevels = {};
  api.set_snapshot(std::make_shared<const Snapshot>(empty));
  CHECK(held->max_depth() == 3);
  CHECK(json::parse(api.handle(get("/api/meta")).body).at("entities") == 0);
}

TEST_CASE("http server end to end") {
  ApiService api(demo_snapshot());
  HttpServer server(api);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto map = client.Get("/api/map?depth=2");
  REQUIRE(map);
  CHECK(map->status == 200);
  CHECK(map->body == *demo_snapshot()->payload(2));
  CHECK(map->get_header_value("X-Cache") == "HIT");

  auto bad = client.Get("/api/map?depth=9");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto exp = client.Post("/api/export", R"(["P001"])", "application/json");
  REQUIRE(exp);
  CHECK(exp->status == 200);
  CHECK(exp->body.rfind("id,title", 0) == 0);

  server.stop();
  t.join();
}
