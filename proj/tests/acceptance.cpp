// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "atlas/api.hpp"
#include "atlas/ceg.hpp"
#include "atlas/gzip.hpp"
#include "atlas/http_server.hpp"
#include "atlas/layout.hpp"
#include "atlas/store.hpp"
#include "atlas/synth.hpp"
#include "atlas/thg.hpp"
#include "atlas/tog.hpp"
#include "demo_fixture.hpp"
#include "oracles.hpp"

// After Eigen: the resolver headers it pulls in define _res.
#include <httplib.h>

using namespace atlas;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

/// Collects the first few failures of one criterion.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
  }
  void note(const std::string& s) { info_ << (info_.tellp() > 0 ? ", " : "") << s; }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    if (ok()) return info_.str();
    return std::to_string(failures_) + " failure(s): " + notes_.str();
  }

 private:
  int failures_ = 0;
  std::ostringstream notes_, info_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

std::vector<AnnotationTable> random_corpora() {
  std::vector<AnnotationTable> out;
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const int entities = 1 + static_cast<int>(rng() % 100);
    const int vocabulary = 12 + static_cast<int>(rng() % 40);
    const int maxConcepts = 4 + static_cast<int>(rng() % 12);
    out.push_back(random_annotations(rng(), entities, vocabulary, maxConcepts));
  }
  return out;
}

void ceg_oracle(Verdict& v) {
  const auto t0 = Clock::now();
  std::size_t edges = 0;
  for (const auto& eat : random_corpora()) {
    std::set<oracle::EdgeKey> got;
    for (const auto& e : build_ceg(eat, 5).edges) got.emplace(e.a, e.b, e.weight);
    const auto expected = oracle::ceg_edges(eat, 5);
    v.expect(got == expected, "edge set differs on a corpus of " + std::to_string(eat.rows.size()));
    edges += expected.size();
  }
  auto pair = [](int shared) {
    AnnotationTable t;
    for (int c = 0; c < shared; ++c) t.rows["a"]["s" + std::to_string(c)] = t.rows["b"]["s" + std::to_string(c)] = 1;
    t.rows["a"]["only-a"] = 1;
    t.rows["b"]["only-b"] = 1;
    return t;
  };
  v.expect(build_ceg(pair(5), 5).edges.size() == 1, "5 shared concepts gave no edge");
  v.expect(build_ceg(pair(4), 5).edges.empty(), "4 shared concepts gave an edge");
  const double secs = seconds_since(t0);
  v.expect(secs < 10.0, "took " + fixed(secs) + " s");
  v.note("100 corpora, " + std::to_string(edges) + " edges, " + fixed(secs) + " s");
}

void connectivity(Verdict& v) {
  int merged = 0;
  for (const auto& eat : random_corpora()) {
    const auto base = build_ceg(eat, 5);
    const int before = oracle::components(base);
    const auto joined = ensure_connected(base, eat, {});
    const auto added = joined.edges.size() - base.edges.size();
    v.expect(oracle::components(joined) == 1, "still disconnected");
    v.expect(added == static_cast<std::size_t>(before - 1),
             "added " + std::to_string(added) + " edges for " + std::to_string(before) + " components");
    merged += before - 1;
  }
  v.note("100 corpora, " + std::to_string(merged) + " edges added");
}

void transitivity(Verdict& v) {
  const auto demo = demo_corpus();
  const auto thg = build_mthg(parse_folder_tree(demo.records));
  const auto a = backpropagate(direct_topics_from_folders(demo.records), thg);
  std::size_t checked = 0;
  for (const auto& [level, entities] : a.byLevel)
    for (const auto& [e, topics] : entities)
      for (const auto& t : topics) {
        ++checked;
        if (level == 0) continue;
        const auto& parent = thg.at(t).parent;
        v.expect(parent && a.assigned(e, *parent, level - 1), e + " in " + t + " without its parent");
      }
  // Every prefix of every folder path is assigned at its depth.
  for (const auto& r : demo.records)
    for (const auto& path : r.folderPaths) {
      const auto clean = clean_folder_path(path);
      int depth = 0;
      for (std::size_t pos = 0; pos != std::string::npos;) {
        pos = clean.find('/', pos == 0 ? 0 : pos + 1);
        ++depth;
        const auto prefix = clean.substr(0, pos);
        v.expect(a.assigned(r.id, prefix, depth), r.id + " missing " + prefix);
        ++checked;
      }
    }
  v.note(std::to_string(checked) + " assignments checked on the demo corpus");
}

void tog_identities(Verdict& v) {
  std::size_t levels = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto recs = random_foldered_corpus(seed, 20 + static_cast<int>(seed), 3, 3);
    const auto eat = table_from_concepts(recs);
    const auto thg = build_mthg(parse_folder_tree(recs));
    const auto assignment = backpropagate(direct_topics_from_folders(recs), thg);
    const auto ceg = ensure_connected(build_ceg(eat, 3), eat, recs);
    const auto tog = build_tog(ceg, assignment, thg, eat);
    for (int level = 1; level <= thg.max_depth(); ++level, ++levels) {
      std::map<EntityId, std::size_t> sizes;
      std::size_t instances = 0, expanded = 0;
      for (const auto& e : ceg.nodes) instances += sizes[e] = effective_topics(assignment, thg, e, level).size();
      for (const auto& e : ceg.edges) expanded += sizes[e.a] * sizes[e.b];
      v.expect(tog.instances.at(level).size() == instances, "instance count at level " + std::to_string(level));

      std::map<InstanceId, EntityId> owner;
      for (const auto& n : tog.instances.at(level)) owner[n.instanceId] = n.entityId;
      std::size_t nonMatching = 0;
      std::set<std::pair<EntityId, EntityId>> projected, cegPairs;
      for (const auto& e : tog.edges.at(level)) {
        if (e.kind == EdgeKind::matching) continue;
        ++nonMatching;
        const auto a = owner.at(e.a), b = owner.at(e.b);
        projected.emplace(std::min(a, b), std::max(a, b));
      }
      for (const auto& e : ceg.edges) cegPairs.emplace(e.a, e.b);
      v.expect(nonMatching == expanded, "expanded edge count at level " + std::to_string(level));
      v.expect(projected == cegPairs, "projection differs at level " + std::to_string(level));
    }
  }

  // Worked fixture: one topic at level 1, two at level 2.
  TopicHierarchy h;
  h.add("T1", "T1", kRootTopic);
  h.add("T1/a", "a", "T1");
  h.add("T1/b", "b", "T1");
  const auto a = backpropagate({{"E1", {"T1/a", "T1/b"}}}, h);
  const auto spawned = spawn_instances("E1", a, h, {});
  std::size_t l1 = 0, l2 = 0, clones = 0;
  for (const auto& n : spawned) {
    (n.level == 1 ? l1 : l2) += 1;
    clones += n.level == 2 && n.kind == InstanceKind::clone;
  }
  v.expect(l1 == 1, "fixture level-1 instances " + std::to_string(l1));
  v.expect(l2 == 2, "fixture level-2 instances " + std::to_string(l2));
  v.expect(clones == 1, "fixture level-2 clones " + std::to_string(clones));
  v.note(std::to_string(levels) + " levels over 30 corpora; fixture gives 2 level-2 instances");
}

std::string layout_bytes(const LayoutTree& l) {
  std::string out;
  auto put = [&](double d) { out.append(reinterpret_cast<const char*>(&d), sizeof d); };
  put(l.worldRadius);
  for (const auto& [id, c] : l.perTopic) {
    out += id;
    put(c.x()), put(c.y()), put(c.r);
  }
  for (const auto& [id, c] : l.perInstance) {
    out += id;
    put(c.x()), put(c.y()), put(c.r);
  }
  return out;
}

void layout_geometry(Verdict& v) {
  constexpr double tol = 1e-9;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto recs = random_foldered_corpus(seed, 10 + static_cast<int>(seed % 40), 2 + static_cast<int>(seed % 3),
                                             2 + static_cast<int>(seed % 4));
    const auto eat = table_from_concepts(recs);
    const auto thg = build_mthg(parse_folder_tree(recs));
    const auto assignment = backpropagate(direct_topics_from_folders(recs), thg);
    const auto tog = build_tog(ensure_connected(build_ceg(eat, 3), eat, recs), assignment, thg, eat);
    const auto l = layout_hierarchy(thg, tog);
    v.expect(layout_bytes(l) == layout_bytes(layout_hierarchy(thg, tog)), "layout not reproducible");

    auto inside = [&](const Circled& inner, const Circled& outer) {
      const double d = std::hypot(inner.x() - outer.x(), inner.y() - outer.y());
      return d + inner.r <= outer.r * (1 + tol);
    };
    for (const auto& [id, node] : thg.nodes()) {
      const auto& parent = l.perTopic.at(id);
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& a = l.perTopic.at(node.children[i]);
        v.expect(inside(a, parent), node.children[i] + " escapes " + id);
        for (std::size_t j = i + 1; j < node.children.size(); ++j, ++pairs) {
          const auto& b = l.perTopic.at(node.children[j]);
          const double d = std::hypot(a.x() - b.x(), a.y() - b.y());
          v.expect(d >= (a.r + b.r) * (1 - tol), node.children[i] + " overlaps " + node.children[j]);
        }
      }
    }
    for (const auto& [level, instances] : tog.instances)
      for (const auto& n : instances)
        v.expect(inside(l.perInstance.at(n.instanceId), l.perTopic.at(n.topicId)), n.instanceId + " escapes");
  }
  const auto three = pack_siblings(std::vector<double>{1.0, 1.0, 1.0});
  const double r = enclosing_circle(three).r;
  v.expect(std::abs(r - (1.0 + 2.0 / std::sqrt(3.0))) < 1e-9, "three unit circles enclosed at " + fixed(r, 12));
  v.note("200 hierarchies, " + std::to_string(pairs) + " sibling pairs, fixture radius " + fixed(r, 12));
}

/// Bilinear value at (x = column, y = row).
double interpolate(const GridValues& g, double x, double y) {
  const auto j = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), g.cols() - 2);
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(y)), g.rows() - 2);
  const double fx = x - double(j), fy = y - double(i);
  return g(i, j) * (1 - fx) * (1 - fy) + g(i, j + 1) * fx * (1 - fy) + g(i + 1, j) * (1 - fx) * fy +
         g(i + 1, j + 1) * fx * fy;
}

void contours(Verdict& v) {
  std::size_t segments = 0;
  double worst = 0;
  for (unsigned mask = 0; mask < (1u << 16); ++mask) {
    GridValues g(4, 4);
    for (int k = 0; k < 16; ++k) g(k / 4, k % 4) = (mask >> k) & 1u;
    const auto lines = trace_iso(g, 0.5);
    const auto expected = oracle::cell_segments(g, 0.5);
    v.expect(oracle::same_segments(oracle::polyline_segments(lines), expected), "mask " + std::to_string(mask));
    segments += expected.size();
    for (const auto& line : lines)
      for (const auto& p : line.points) worst = std::max(worst, std::abs(interpolate(g, p.x(), p.y()) - 0.5));
  }
  v.expect(worst <= 1e-6, "vertex off its iso value by " + std::to_string(worst));
  v.note("65536 grids, " + std::to_string(segments) + " segments, max vertex error " + std::to_string(worst));
}

void dthg_recovery(Verdict& v) {
  // Four blocks of six documents over four concepts each; blocks 0,1 and
  // blocks 2,3 share one bridging concept.
  const int blocks = 4, docs = 6, width = 4;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(blocks * docs, blocks * width + 2);
  std::vector<EntityId> entities;
  std::vector<ConceptId> concepts;
  for (int r = 0; r < blocks * docs; ++r) entities.push_back("d" + std::to_string(100 + r));
  for (int c = 0; c < blocks * width + 2; ++c) concepts.push_back("c" + std::to_string(100 + c));
  for (int b = 0; b < blocks; ++b)
    for (int d = 0; d < docs; ++d) {
      for (int w = 0; w < width; ++w)
        if (w != d % width) dense(b * docs + d, b * width + w) = 1.0;
      dense(b * docs + d, blocks * width + b / 2) = 1.0;
    }
  const auto result = build_dthg(DocConceptMatrix::from_dense(entities, concepts, dense), {2, 4});
  const auto& thg = result.thg;
  auto block_of = [](const EntityId& e) { return (std::stoi(e.substr(1)) - 100) / 6; };

  std::size_t edges = 0;
  for (const auto& [id, n] : thg.nodes()) edges += n.children.size();
  v.expect(edges == thg.size() - 1, "edges " + std::to_string(edges) + " for " + std::to_string(thg.size()) + " nodes");
  v.expect(thg.level(2).size() == 4, "leaf count " + std::to_string(thg.level(2).size()));

  const auto leaves = members_by_topic(result.assignment, 2);
  const auto uppers = members_by_topic(result.assignment, 1);
  std::set<int> recovered;
  for (const auto& [leaf, members] : leaves) {
    std::set<int> seen;
    for (const auto& e : members) seen.insert(block_of(e));
    v.expect(seen.size() == 1 && members.size() == 6, leaf + " is not one planted block");
    recovered.insert(*seen.begin());

    // Correct parent: argmax Jaccard between member sets.
    TopicId best;
    double bestScore = -1;
    for (const auto& [upper, upperMembers] : uppers) {
      std::size_t common = 0;
      for (const auto& e : members) common += upperMembers.count(e);
      const double j = double(common) / double(members.size() + upperMembers.size() - common);
      if (j > bestScore) best = upper, bestScore = j;
    }
    v.expect(thg.at(leaf).parent == best, leaf + " hangs under the wrong parent");
    for (const auto& e : uppers.at(best)) v.expect(block_of(e) / 2 == *seen.begin() / 2, "parent mixes halves");
  }
  v.expect(recovered == std::set<int>{0, 1, 2, 3}, "not all blocks recovered");
  v.note("4 blocks recovered, " + std::to_string(thg.size()) + " nodes, " + std::to_string(edges) + " edges");
}

struct DemoBuild {
  GraphBundle bundle;
  double buildSeconds = 0;
  std::filesystem::path dir, bundlePath;
};

DemoBuild& full_demo() {
  static DemoBuild d = [] {
    DemoBuild out;
    const auto dir = fixture::temp_dir("acceptance");
    const auto t0 = Clock::now();
    out.bundle = build_bundle(fixture::write_demo(dir));
    out.dir = dir;
    out.bundlePath = dir / "demo.kcb";
    save_bundle(out.bundle, out.bundlePath);
    out.buildSeconds = seconds_since(t0);
    return out;
  }();
  return d;
}

void service(Verdict& v) {
  auto& demo = full_demo();
  const auto t0 = Clock::now();
  ApiService api(std::make_shared<const Snapshot>(load_bundle(demo.bundlePath)));
  HttpServer server(api);
  const int port = server.bind("127.0.0.1", 0);
  std::thread listener([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  auto first = client.Get("/api/map?depth=1");
  const double coldStart = demo.buildSeconds + seconds_since(t0);
  v.expect(first && first->status == 200, "first map request failed");

  const auto& b = api.snapshot()->bundle();
  for (int d = 1; d <= b.thg.max_depth(); ++d) {
    const auto path = "/api/map?depth=" + std::to_string(d);
    auto plain = client.Get(path);
    if (!plain || plain->status != 200) {
      v.expect(false, path + " failed");
      continue;
    }
    std::multiset<std::string> ids, expected;
    const auto payload = json::parse(plain->body);
    for (const auto& n : payload.at("instances")) ids.insert(n.at("id").get<std::string>());
    for (const auto& n : b.tog.instances.at(d)) expected.insert(n.instanceId);
    v.expect(ids == expected, "instance ids differ at depth " + std::to_string(d));

    // Raw compressed bytes, without the client decoding them.
    HttpRequest req;
    req.path = "/api/map";
    req.query["depth"] = std::to_string(d);
    req.headers["accept-encoding"] = "gzip";
    const auto z = api.handle(req);
    v.expect(z.header("Content-Encoding") == "gzip", "no gzip at depth " + std::to_string(d));
    v.expect(z.body.size() < plain->body.size(), "compressed not smaller at depth " + std::to_string(d));
    v.expect(gzip_decompress(z.body) == plain->body, "gzip bytes differ at depth " + std::to_string(d));
  }

  std::vector<std::future<std::string>> futures;
  for (int k = 0; k < 32; ++k)
    futures.push_back(std::async(std::launch::async, [port] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Get("/api/map?depth=2");
      return r && r->status == 200 ? r->body : std::string("request failed");
    }));
  std::set<std::string> bodies;
  for (auto& f : futures) bodies.insert(f.get());
  v.expect(bodies.size() == 1 && *bodies.begin() != "request failed", "concurrent responses differ");

  server.stop();
  listener.join();
  v.expect(coldStart < 30.0, "cold start took " + fixed(coldStart) + " s");
  v.note("cold start " + fixed(coldStart) + " s (build " + fixed(demo.buildSeconds) + " s), 32 concurrent identical");
}

void bundle_round_trip(Verdict& v) {
  auto& demo = full_demo();
  const auto loaded = load_bundle(demo.bundlePath);
  v.expect(loaded == demo.bundle, "loaded bundle differs");
  const auto bytes = encode_bundle(demo.bundle);
  v.expect(encode_bundle(loaded) == bytes, "re-encoded bytes differ");

  // Same inputs at the same paths: the config stored in the bundle includes them.
  const auto again = encode_bundle(build_bundle(fixture::write_demo(demo.dir)));
  v.expect(again.size() == bytes.size() && std::memcmp(again.data(), bytes.data(), bytes.size()) == 0,
           "rebuild gives different bytes");
  v.note(std::to_string(bytes.size()) + " bytes, identical across rebuilds");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"CEG oracle equivalence", ceg_oracle},
      {"Connectivity", connectivity},
      {"Transitivity", transitivity},
      {"TOG identities", tog_identities},
      {"Layout geometry", layout_geometry},
      {"Contour correctness", contours},
      {"dTHG recovery", dthg_recovery},
      {"Service properties", service},
      {"Bundle round-trip", bundle_round_trip},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    failed += !v.ok();
    std::cout << (v.ok() ? "PASS " : "FAIL ") << name << " (" << v.detail() << ")" << std::endl;
  }
  std::filesystem::remove_all(full_demo().dir);
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
