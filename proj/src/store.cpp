#include "atlas/store.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "atlas/error.hpp"
#include "atlas/gzip.hpp"
#include "text_util.hpp"

namespace atlas {

using nlohmann::json;

namespace {

constexpr const char* kModule = "store";

[[noreturn]] void corrupt(const std::string& detail) {
  throw Error(Errc::CorruptBundle, kModule, detail);
}

json circle_json(const Circled& c) { return json::array({c.x(), c.y(), c.r}); }
Circled circle_from(const json& j) {
  return Circled(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

template <typename Enum>
Enum enum_from(const std::string& s, std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, value] : table)
    if (s == name) return value;
  corrupt("unknown enum value '" + s + "'");
}

InstanceKind kind_from(const std::string& s) {
  return enum_from<InstanceKind>(s, {{"original", InstanceKind::original}, {"clone", InstanceKind::clone}});
}
AnnotationTag tag_from(const std::string& s) {
  return enum_from<AnnotationTag>(s, {{"direct", AnnotationTag::direct}, {"induced", AnnotationTag::induced}});
}
EdgeKind edge_kind_from(const std::string& s) {
  return enum_from<EdgeKind>(s, {{"within_topic", EdgeKind::within_topic},
                                 {"between_topic", EdgeKind::between_topic},
                                 {"matching", EdgeKind::matching}});
}

json config_json(const BuildConfig& c) {
  return {{"corpusPath", c.corpusPath},
          {"gazetteerPath", c.gazetteerPath},
          {"eatPath", c.eatPath},
          {"vocabularies", c.vocabularies},
          {"thgMode", c.thgMode == ThgMode::manual ? "manual" : "data"},
          {"threshold", c.threshold},
          {"pyramid", c.pyramid},
          {"padding", c.padding},
          {"entityRadius", c.entityRadius},
          {"gridWidth", c.gridWidth},
          {"gridHeight", c.gridHeight},
          {"bandwidth", c.bandwidth},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"isoLevels", c.isoLevels},
          {"seed", c.seed}};
}

BuildConfig config_from(const json& j) {
  BuildConfig c;
  c.corpusPath = j.at("corpusPath").get<std::string>();
  c.gazetteerPath = j.at("gazetteerPath").get<std::string>();
  c.eatPath = j.at("eatPath").get<std::string>();
  c.vocabularies = j.at("vocabularies").get<std::vector<std::string>>();
  c.thgMode = enum_from<ThgMode>(j.at("thgMode").get<std::string>(),
                                 {{"manual", ThgMode::manual}, {"data", ThgMode::data}});
  c.threshold = j.at("threshold").get<int>();
  c.pyramid = j.at("pyramid").get<std::vector<int>>();
  c.padding = j.at("padding").get<double>();
  c.entityRadius = j.at("entityRadius").get<double>();
  c.gridWidth = j.at("gridWidth").get<int>();
  c.gridHeight = j.at("gridHeight").get<int>();
  c.bandwidth = j.at("bandwidth").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.isoLevels = j.at("isoLevels").get<std::vector<double>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json record_json(const EntityRecord& r) {
  json j = {{"id", r.id},           {"title", r.title},     {"abstract", r.abstract},
            {"authors", r.authors}, {"year", r.year},       {"folders", r.folderPaths},
            {"concepts", r.concepts}};
  j["venue"] = r.venue ? json(*r.venue) : json(nullptr);
  j["doi"] = r.doi ? json(*r.doi) : json(nullptr);
  j["url"] = r.url ? json(*r.url) : json(nullptr);
  return j;
}

std::optional<std::string> opt_string(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<std::string>(j.get<std::string>());
}

EntityRecord record_from(const json& j) {
  EntityRecord r;
  r.id = j.at("id").get<std::string>();
  r.title = j.at("title").get<std::string>();
  r.abstract = j.at("abstract").get<std::string>();
  r.authors = j.at("authors").get<std::vector<std::string>>();
  r.year = j.at("year").get<std::int64_t>();
  r.folderPaths = j.at("folders").get<std::vector<std::string>>();
  r.concepts = j.at("concepts").get<std::set<ConceptId>>();
  r.venue = opt_string(j.at("venue"));
  r.doi = opt_string(j.at("doi"));
  r.url = opt_string(j.at("url"));
  return r;
}

json polylines_json(const std::vector<Polyline>& lines) {
  json out = json::array();
  for (const auto& line : lines) {
    json pts = json::array();
    for (const auto& p : line.points) {
      pts.push_back(p.x());
      pts.push_back(p.y());
    }
    out.push_back({{"closed", line.closed}, {"points", std::move(pts)}});
  }
  return out;
}

std::vector<Polyline> polylines_from(const json& j) {
  std::vector<Polyline> out;
  for (const auto& item : j) {
    Polyline line;
    line.closed = item.at("closed").get<bool>();
    const auto& pts = item.at("points");
    if (pts.size() % 2) corrupt("odd coordinate count in polyline");
    for (std::size_t k = 0; k < pts.size(); k += 2)
      line.points.emplace_back(pts[k].get<double>(), pts[k + 1].get<double>());
    out.push_back(std::move(line));
  }
  return out;
}

json bundle_json(const GraphBundle& b) {
  json j;
  j["formatVersion"] = b.formatVersion;
  j["config"] = config_json(b.config);

  j["corpus"] = json::array();
  for (const auto& r : b.corpus) j["corpus"].push_back(record_json(r));
  j["conceptNames"] = b.conceptNames;
  j["eat"] = b.eat.rows;

  json ceg = {{"threshold", b.ceg.threshold}, {"nodes", b.ceg.nodes}, {"edges", json::array()}};
  for (const auto& e : b.ceg.edges) ceg["edges"].push_back(json::array({e.a, e.b, e.weight, e.synthetic}));
  j["ceg"] = std::move(ceg);

  json thg = json::array();
  for (const auto& [id, n] : b.thg.nodes())
    thg.push_back({{"id", n.topicId},
                   {"label", n.label},
                   {"level", n.level},
                   {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                   {"children", n.children},
                   {"signature", n.conceptSignature}});
  j["thg"] = std::move(thg);

  json byLevel = json::object();
  for (const auto& [level, entities] : b.assignment.byLevel)
    byLevel[std::to_string(level)] = entities;
  json provenance = json::array();
  for (const auto& [key, tag] : b.assignment.provenance)
    provenance.push_back(json::array({key.first, key.second, to_string(tag)}));
  j["assignment"] = {{"byLevel", std::move(byLevel)},
                     {"provenance", std::move(provenance)},
                     {"primaryPath", b.assignment.primaryPath}};

  json tog = json::object();
  for (const auto& [level, instances] : b.tog.instances) {
    json inst = json::array();
    for (const auto& n : instances)
      inst.push_back(json::array({n.instanceId, n.entityId, n.topicId, n.level, to_string(n.kind), to_string(n.tag)}));
    json edges = json::array();
    if (auto it = b.tog.edges.find(level); it != b.tog.edges.end())
      for (const auto& e : it->second) edges.push_back(json::array({e.a, e.b, to_string(e.kind), e.weight}));
    tog[std::to_string(level)] = {{"instances", std::move(inst)}, {"edges", std::move(edges)}};
  }
  j["tog"] = std::move(tog);

  json topics = json::object(), instances = json::object();
  for (const auto& [id, c] : b.layout.perTopic) topics[id] = circle_json(c);
  for (const auto& [id, c] : b.layout.perInstance) instances[id] = circle_json(c);
  j["layout"] = {{"worldRadius", b.layout.worldRadius},
                 {"paddingRatio", b.layout.paddingRatio},
                 {"entityRadius", b.layout.entityRadius},
                 {"topics", std::move(topics)},
                 {"instances", std::move(instances)}};

  std::vector<double> values(b.elevation.values.data(),
                             b.elevation.values.data() + b.elevation.values.size());
  j["elevation"] = {{"worldRadius", b.elevation.worldRadius},
                    {"width", b.elevation.width()},
                    {"height", b.elevation.height()},
                    {"values", std::move(values)}};

  json levels = json::array();
  for (const auto& lines : b.contours.polylines) levels.push_back(polylines_json(lines));
  j["contours"] = {{"isoLevels", b.contours.isoLevels}, {"polylines", std::move(levels)}};

  json stops = json::array();
  for (const auto& s : b.colorScale.stops)
    stops.push_back(json::array({s.elevation, s.color.x(), s.color.y(), s.color.z()}));
  j["colorScale"] = {{"seaLevel", b.colorScale.seaLevel}, {"stops", std::move(stops)}};
  return j;
}

GraphBundle bundle_from(const json& j) {
  GraphBundle b;
  b.formatVersion = j.at("formatVersion").get<int>();
  if (b.formatVersion != kBundleFormatVersion)
    throw Error(Errc::VersionMismatch, kModule,
                "bundle format " + std::to_string(b.formatVersion) + ", expected " +
                    std::to_string(kBundleFormatVersion));
  b.config = config_from(j.at("config"));
  for (const auto& r : j.at("corpus")) b.corpus.push_back(record_from(r));
  b.conceptNames = j.at("conceptNames").get<std::map<ConceptId, std::string>>();
  b.eat.rows = j.at("eat").get<std::map<EntityId, std::map<ConceptId, int>>>();

  const auto& ceg = j.at("ceg");
  b.ceg.threshold = ceg.at("threshold").get<int>();
  b.ceg.nodes = ceg.at("nodes").get<std::vector<EntityId>>();
  for (const auto& e : ceg.at("edges"))
    b.ceg.edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(), e.at(2).get<int>(),
                           e.at(3).get<bool>()});

  std::vector<TopicNode> nodes;
  for (const auto& n : j.at("thg")) {
    TopicNode node;
    node.topicId = n.at("id").get<std::string>();
    node.label = n.at("label").get<std::string>();
    node.level = n.at("level").get<int>();
    if (!n.at("parent").is_null()) node.parent = n.at("parent").get<std::string>();
    node.children = n.at("children").get<std::vector<TopicId>>();
    node.conceptSignature = n.at("signature").get<std::set<ConceptId>>();
    nodes.push_back(std::move(node));
  }
  try {
    b.thg = TopicHierarchy::from_nodes(std::move(nodes));
  } catch (const Error& e) {
    corrupt(std::string("topic hierarchy: ") + e.what());
  }

  const auto& a = j.at("assignment");
  for (const auto& [level, entities] : a.at("byLevel").items())
    b.assignment.byLevel[std::stoi(level)] =
        entities.get<std::map<EntityId, std::set<TopicId>>>();
  for (const auto& p : a.at("provenance"))
    b.assignment.provenance[{p.at(0).get<std::string>(), p.at(1).get<std::string>()}] =
        tag_from(p.at(2).get<std::string>());
  b.assignment.primaryPath = a.at("primaryPath").get<std::map<EntityId, TopicId>>();

  for (const auto& [levelKey, body] : j.at("tog").items()) {
    const int level = std::stoi(levelKey);
    auto& inst = b.tog.instances[level];
    for (const auto& n : body.at("instances"))
      inst.push_back({n.at(0).get<std::string>(), n.at(1).get<std::string>(), n.at(2).get<std::string>(),
                      n.at(3).get<int>(), kind_from(n.at(4).get<std::string>()),
                      tag_from(n.at(5).get<std::string>())});
    auto& edges = b.tog.edges[level];
    for (const auto& e : body.at("edges"))
      edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                       edge_kind_from(e.at(2).get<std::string>()), e.at(3).get<int>()});
  }

  const auto& l = j.at("layout");
  b.layout.worldRadius = l.at("worldRadius").get<double>();
  b.layout.paddingRatio = l.at("paddingRatio").get<double>();
  b.layout.entityRadius = l.at("entityRadius").get<double>();
  for (const auto& [id, c] : l.at("topics").items()) b.layout.perTopic[id] = circle_from(c);
  for (const auto& [id, c] : l.at("instances").items()) b.layout.perInstance[id] = circle_from(c);

  const auto& el = j.at("elevation");
  b.elevation.worldRadius = el.at("worldRadius").get<double>();
  const auto w = el.at("width").get<Eigen::Index>();
  const auto h = el.at("height").get<Eigen::Index>();
  const auto values = el.at("values").get<std::vector<double>>();
  if (w < 0 || h < 0 || static_cast<std::size_t>(w * h) != values.size())
    corrupt("elevation grid size does not match its values");
  b.elevation.values = Eigen::Map<const GridValues>(values.data(), h, w);

  const auto& ct = j.at("contours");
  b.contours.isoLevels = ct.at("isoLevels").get<std::vector<double>>();
  for (const auto& lines : ct.at("polylines")) b.contours.polylines.push_back(polylines_from(lines));

  const auto& cs = j.at("colorScale");
  b.colorScale.seaLevel = cs.at("seaLevel").get<double>();
  b.colorScale.stops.clear();
  for (const auto& s : cs.at("stops"))
    b.colorScale.stops.push_back({s.at(0).get<double>(),
                                  Rgb(s.at(1).get<double>(), s.at(2).get<double>(), s.at(3).get<double>())});
  return b;
}

std::string cypher_string(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string bundle_to_json(const GraphBundle& bundle) { return bundle_json(bundle).dump(); }

GraphBundle bundle_from_json(std::string_view text) {
  GraphBundle b;
  try {
    b = bundle_from(json::parse(text));
  } catch (const json::exception& e) {
    corrupt(e.what());
  }
  validate_bundle(b);
  return b;
}

std::string encode_bundle(const GraphBundle& bundle) { return gzip_compress(bundle_to_json(bundle)); }

GraphBundle decode_bundle(std::string_view bytes) {
  return bundle_from_json(gzip_decompress(bytes));
}

void save_bundle(const GraphBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, encode_bundle(bundle), kModule);
}

GraphBundle load_bundle(const std::filesystem::path& path) {
  return decode_bundle(detail::read_file(path, kModule));
}

void validate_bundle(const GraphBundle& b) {
  std::set<EntityId> ids;
  for (const auto& r : b.corpus)
    if (!ids.insert(r.id).second) corrupt("duplicate entity " + r.id);
  for (const auto& [entity, counts] : b.eat.rows) {
    if (!ids.count(entity)) corrupt("annotation row for unknown entity " + entity);
    for (const auto& [c, n] : counts)
      if (n < 1) corrupt("non-positive annotation count for " + entity);
  }
  for (const auto& n : b.ceg.nodes)
    if (!ids.count(n)) corrupt("graph node for unknown entity " + n);
  for (const auto& e : b.ceg.edges) {
    if (!ids.count(e.a) || !ids.count(e.b)) corrupt("similarity edge with dangling endpoint");
    if (!(e.a < e.b)) corrupt("similarity edge endpoints out of order");
    if (!e.synthetic && e.weight < b.ceg.threshold) corrupt("sub-threshold edge not marked synthetic");
  }
  for (const auto& [level, entities] : b.assignment.byLevel)
    for (const auto& [entity, topics] : entities) {
      if (!ids.count(entity)) corrupt("assignment for unknown entity " + entity);
      for (const auto& t : topics)
        if (!b.thg.contains(t) || b.thg.at(t).level != level)
          corrupt("assignment to unknown topic " + t + " at level " + std::to_string(level));
    }
  for (const auto& [key, tag] : b.assignment.provenance)
    if (!ids.count(key.first) || !b.thg.contains(key.second)) corrupt("dangling provenance entry");
  for (const auto& [entity, topic] : b.assignment.primaryPath)
    if (!ids.count(entity) || !b.thg.contains(topic)) corrupt("dangling primary path");

  for (const auto& [level, instances] : b.tog.instances) {
    std::unordered_set<InstanceId> here;
    for (const auto& n : instances) {
      if (!ids.count(n.entityId) || !b.thg.contains(n.topicId) || n.level != level)
        corrupt("dangling instance " + n.instanceId);
      if (n.instanceId != make_instance_id(n.entityId, n.topicId))
        corrupt("malformed instance id " + n.instanceId);
      if (!here.insert(n.instanceId).second) corrupt("duplicate instance " + n.instanceId);
      if (!b.layout.perInstance.count(n.instanceId)) corrupt("instance without layout " + n.instanceId);
    }
    if (auto it = b.tog.edges.find(level); it != b.tog.edges.end())
      for (const auto& e : it->second)
        if (!here.count(e.a) || !here.count(e.b))
          corrupt("instance edge with dangling endpoint at level " + std::to_string(level));
  }
  for (const auto& [id, node] : b.thg.nodes())
    if (!b.layout.perTopic.count(id)) corrupt("topic without layout " + id);
  for (const auto& [id, c] : b.layout.perTopic)
    if (!b.thg.contains(id)) corrupt("layout for unknown topic " + id);
  for (std::size_t k = 1; k < b.contours.isoLevels.size(); ++k)
    if (!(b.contours.isoLevels[k] > b.contours.isoLevels[k - 1])) corrupt("iso levels not ascending");
  if (b.contours.polylines.size() != b.contours.isoLevels.size())
    corrupt("contour levels do not match iso levels");
  try {
    validate(b.colorScale);
  } catch (const Error& e) {
    corrupt(e.what());
  }
}

ScriptTally graphdb_tally(const GraphBundle& b) {
  ScriptTally t;
  t.nodes = b.corpus.size();
  if (!b.corpus.empty() || b.thg.size() > 1) t.nodes += b.thg.size();
  for (const auto& [level, instances] : b.tog.instances) t.nodes += instances.size();
  t.relationships = b.ceg.edges.size() + (b.thg.size() - 1);
  for (const auto& [level, entities] : b.assignment.byLevel)
    for (const auto& [entity, topics] : entities) t.relationships += topics.size();
  for (const auto& [level, edges] : b.tog.edges) t.relationships += edges.size();
  return t;
}

std::string graphdb_script(const GraphBundle& b) {
  const auto tally = graphdb_tally(b);
  std::string out = "// knowledge map import script\n// " + std::to_string(tally.nodes) + " nodes, " +
                    std::to_string(tally.relationships) + " relationships\n";
  if (tally.nodes == 0) return out;
  const auto q = cypher_string;

  for (const auto& r : b.corpus)
    out += "MERGE (n:Entity {id: " + q(r.id) + "}) SET n.title = " + q(r.title) +
           ", n.year = " + std::to_string(r.year) + ";\n";
  if (!b.corpus.empty() || b.thg.size() > 1)
    for (const auto& [id, n] : b.thg.nodes())
      out += "MERGE (n:Topic {id: " + q(id) + "}) SET n.label = " + q(n.label) +
             ", n.level = " + std::to_string(n.level) + ";\n";
  for (const auto& [level, instances] : b.tog.instances)
    for (const auto& n : instances)
      out += "MERGE (n:Instance {id: " + q(n.instanceId) + "}) SET n.entityId = " + q(n.entityId) +
             ", n.topicId = " + q(n.topicId) + ", n.level = " + std::to_string(n.level) +
             ", n.kind = " + q(std::string(to_string(n.kind))) +
             ", n.tag = " + q(std::string(to_string(n.tag))) + ";\n";

  for (const auto& e : b.ceg.edges)
    out += "MATCH (a:Entity {id: " + q(e.a) + "}), (b:Entity {id: " + q(e.b) +
           "}) MERGE (a)-[r:SIMILAR]->(b) SET r.weight = " + std::to_string(e.weight) +
           ", r.synthetic = " + (e.synthetic ? "true" : "false") + ";\n";
  for (const auto& [id, n] : b.thg.nodes())
    if (n.parent)
      out += "MATCH (c:Topic {id: " + q(id) + "}), (p:Topic {id: " + q(*n.parent) +
             "}) MERGE (c)-[:CHILD_OF]->(p);\n";
  for (const auto& [level, entities] : b.assignment.byLevel)
    for (const auto& [entity, topics] : entities)
      for (const auto& t : topics) {
        auto tag = b.assignment.provenance.find({entity, t});
        const auto tagName = tag == b.assignment.provenance.end() ? AnnotationTag::induced : tag->second;
        out += "MATCH (e:Entity {id: " + q(entity) + "}), (t:Topic {id: " + q(t) +
               "}) MERGE (e)-[r:ANNOTATED_TO]->(t) SET r.tag = " + q(std::string(to_string(tagName))) + ";\n";
      }
  for (const auto& [level, edges] : b.tog.edges)
    for (const auto& e : edges) {
      const char* rel = e.kind == EdgeKind::matching ? "MATCHING" : "LINKED";
      out += "MATCH (a:Instance {id: " + q(e.a) + "}), (b:Instance {id: " + q(e.b) + "}) MERGE (a)-[r:" +
             rel + "]->(b) SET r.kind = " + q(std::string(to_string(e.kind))) +
             ", r.weight = " + std::to_string(e.weight) + ";\n";
    }
  return out;
}

void export_graphdb_script(const GraphBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, graphdb_script(bundle), kModule);
}

}  // namespace atlas
