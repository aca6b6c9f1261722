#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "atlas/api.hpp"
#include "atlas/error.hpp"
#include "atlas/gzip.hpp"
#include "text_util.hpp"

namespace atlas {

using nlohmann::json;

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

json circle_json(const Circled& c) { return json::array({c.x(), c.y(), c.r}); }

/// 0: no match, 1: substring, 2: starts a word.
int match(const std::string& field, const std::string& query) {
  int best = 0;
  for (auto pos = field.find(query); pos != std::string::npos; pos = field.find(query, pos + 1)) {
    if (pos == 0 || field[pos - 1] == ' ' || field[pos - 1] == '\n') return 2;
    best = 1;
  }
  return best;
}

void index_tokens(std::map<std::string, std::vector<std::size_t>>& postings, const std::string& text,
                  std::size_t doc) {
  for (const auto& token : normalise_tokens(text)) {
    auto& list = postings[token];
    if (list.empty() || list.back() != doc) list.push_back(doc);
  }
}

std::set<std::size_t> candidates(const std::map<std::string, std::vector<std::size_t>>& postings,
                                 const std::string& firstToken) {
  std::set<std::size_t> out;
  for (const auto& [token, docs] : postings)
    if (token.find(firstToken) != std::string::npos) out.insert(docs.begin(), docs.end());
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_map_payload(const GraphBundle& b, int depth) {
  json p;
  p["depth"] = depth;
  p["maxDepth"] = b.thg.max_depth();
  p["worldRadius"] = b.layout.worldRadius;

  json topics = json::array();
  for (const auto& [id, node] : b.thg.nodes()) {
    if (node.level < 1 || node.level > depth) continue;
    topics.push_back({{"id", id},
                      {"label", node.label},
                      {"level", node.level},
                      {"parent", *node.parent},
                      {"circle", circle_json(b.layout.perTopic.at(id))}});
  }
  p["topics"] = std::move(topics);

  std::map<EntityId, const EntityRecord*> records;
  for (const auto& r : b.corpus) records[r.id] = &r;
  json instances = json::array();
  if (auto it = b.tog.instances.find(depth); it != b.tog.instances.end())
    for (const auto& n : it->second) {
      auto rec = records.find(n.entityId);
      instances.push_back({{"id", n.instanceId},
                           {"entityId", n.entityId},
                           {"topicId", n.topicId},
                           {"kind", to_string(n.kind)},
                           {"tag", to_string(n.tag)},
                           {"title", rec == records.end() ? "" : rec->second->title},
                           {"circle", circle_json(b.layout.perInstance.at(n.instanceId))}});
    }
  p["instances"] = std::move(instances);

  json edges = json::array();
  if (auto it = b.tog.edges.find(depth); it != b.tog.edges.end())
    for (const auto& e : it->second)
      edges.push_back({{"a", e.a}, {"b", e.b}, {"kind", to_string(e.kind)}, {"weight", e.weight}});
  p["edges"] = std::move(edges);

  json contours = json::array();
  const auto world = contours_in_world(b.contours, b.elevation);
  for (std::size_t k = 0; k < world.size(); ++k) {
    json lines = json::array();
    for (const auto& line : world[k]) {
      json pts = json::array();
      for (const auto& pt : line.points) {
        pts.push_back(round4(pt.x()));
        pts.push_back(round4(pt.y()));
      }
      lines.push_back({{"closed", line.closed}, {"points", std::move(pts)}});
    }
    const double iso = b.contours.isoLevels[k];
    contours.push_back({{"level", iso},
                        {"color", to_hex(colorize(std::clamp(iso, 0.0, 1.0), b.colorScale))},
                        {"polylines", std::move(lines)}});
  }
  p["contours"] = std::move(contours);

  json stops = json::array();
  for (const auto& s : b.colorScale.stops) stops.push_back({{"elevation", s.elevation}, {"color", to_hex(s.color)}});
  p["colorScale"] = {{"seaLevel", b.colorScale.seaLevel}, {"stops", std::move(stops)}};
  return p.dump();
}

Snapshot::Snapshot(GraphBundle bundle) : bundle_(std::move(bundle)) {
  maxDepth_ = bundle_.thg.max_depth();
  for (int d = 1; d <= std::max(1, maxDepth_); ++d) {
    auto body = render_payload(d);
    auto gz = gzip_compress(body, 6);
    perDepth_.emplace(d, std::pair{std::move(body), std::move(gz)});
  }

  for (std::size_t i = 0; i < bundle_.corpus.size(); ++i) {
    const auto& r = bundle_.corpus[i];
    recordIndex_[r.id] = i;
    EntityText text{normalise(r.title), normalise(r.abstract), ""};
    for (const auto& a : r.authors) text.authors += (text.authors.empty() ? "" : "\n") + normalise(a);
    index_tokens(entityPostings_, r.title, i);
    index_tokens(entityPostings_, r.abstract, i);
    for (const auto& a : r.authors) index_tokens(entityPostings_, a, i);
    entityText_.push_back(std::move(text));
  }
  for (const auto& [id, node] : bundle_.thg.nodes()) {
    if (node.level == 0) continue;
    index_tokens(topicPostings_, node.label, topicIds_.size());
    topicIds_.push_back(id);
    topicText_.push_back(normalise(node.label));
  }
  for (const auto& [level, instances] : bundle_.tog.instances)
    for (const auto& n : instances) instancesByEntity_[n.entityId].push_back(&n);
}

std::string Snapshot::render_payload(int depth) const { return render_map_payload(bundle_, depth); }

const std::string* Snapshot::payload(int depth) const {
  auto it = perDepth_.find(depth);
  return it == perDepth_.end() ? nullptr : &it->second.first;
}

const std::string* Snapshot::payload_gzip(int depth) const {
  auto it = perDepth_.find(depth);
  return it == perDepth_.end() ? nullptr : &it->second.second;
}

std::vector<int> Snapshot::depths() const {
  std::vector<int> out;
  for (const auto& [d, _] : perDepth_) out.push_back(d);
  return out;
}

SearchResult Snapshot::search(std::string_view query, std::size_t limit) const {
  const auto tokens = normalise_tokens(query);
  if (tokens.empty()) throw Error(Errc::EmptyInput, "api", "empty query");
  const auto q = detail::join(tokens, " ");
  SearchResult out;

  for (auto t : candidates(topicPostings_, tokens.front())) {
    const int m = match(topicText_[t], q);
    if (!m) continue;
    const auto& node = bundle_.thg.at(topicIds_[t]);
    const int score = 2 + (m == 2 ? 1 : 0) + (topicText_[t] == q ? 1 : 0);
    out.topics.push_back({node.topicId, node.label, node.level, score});
  }
  for (auto e : candidates(entityPostings_, tokens.front())) {
    const auto& text = entityText_[e];
    const int mt = match(text.title, q);
    const int ma = match(text.abstract, q);
    const int mu = match(text.authors, q);
    if (!mt && !ma && !mu) continue;
    const int score = 3 * (mt > 0) + ((ma > 0 || mu > 0) ? 1 : 0) +
                      ((mt == 2 || ma == 2 || mu == 2) ? 1 : 0);
    const auto& r = bundle_.corpus[e];
    out.entities.push_back({r.id, r.title, r.year, score});
  }

  std::sort(out.topics.begin(), out.topics.end(), [](const TopicHit& a, const TopicHit& b) {
    return a.score != b.score ? a.score > b.score : a.topicId < b.topicId;
  });
  std::sort(out.entities.begin(), out.entities.end(), [](const EntityHit& a, const EntityHit& b) {
    return a.score != b.score ? a.score > b.score : a.entityId < b.entityId;
  });
  if (out.topics.size() > limit) out.topics.resize(limit);
  if (out.entities.size() > limit) out.entities.resize(limit);
  return out;
}

std::optional<std::string> Snapshot::entity_detail(const EntityId& id) const {
  auto it = recordIndex_.find(id);
  if (it == recordIndex_.end()) return std::nullopt;
  const auto& r = bundle_.corpus[it->second];
  json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["authors"] = r.authors;
  j["year"] = r.year;
  j["venue"] = r.venue ? json(*r.venue) : json(nullptr);
  j["doi"] = r.doi ? json(*r.doi) : json(nullptr);
  j["url"] = r.url ? json(*r.url) : json(nullptr);
  j["folders"] = r.folderPaths;
  json concepts = json::array();
  for (const auto& c : r.concepts) {
    auto name = bundle_.conceptNames.find(c);
    concepts.push_back({{"id", c}, {"name", name == bundle_.conceptNames.end() ? c : name->second}});
  }
  j["concepts"] = std::move(concepts);
  json instances = json::array();
  if (auto inst = instancesByEntity_.find(id); inst != instancesByEntity_.end())
    for (const auto* n : inst->second)
      instances.push_back({{"level", n->level},
                           {"instanceId", n->instanceId},
                           {"topicId", n->topicId},
                           {"topicLabel", bundle_.thg.at(n->topicId).label},
                           {"kind", to_string(n->kind)},
                           {"tag", to_string(n->tag)},
                           {"circle", circle_json(bundle_.layout.perInstance.at(n->instanceId))}});
  j["instances"] = std::move(instances);
  return j.dump();
}

std::string Snapshot::export_csv(const std::vector<EntityId>& ids, std::vector<EntityId>& unknown) const {
  std::string out = "id,title,authors,year,venue,doi,url\r\n";
  for (const auto& id : ids) {
    auto it = recordIndex_.find(id);
    if (it == recordIndex_.end()) {
      unknown.push_back(id);
      continue;
    }
    const auto& r = bundle_.corpus[it->second];
    out += csv_field(r.id) + ',' + csv_field(r.title) + ',' + csv_field(detail::join(r.authors, "; ")) +
           ',' + std::to_string(r.year) + ',' + csv_field(r.venue.value_or("")) + ',' +
           csv_field(r.doi.value_or("")) + ',' + csv_field(r.url.value_or("")) + "\r\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Routing

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  for (const auto& [k, v] : headers)
    if (k == name) return v;
  return std::nullopt;
}

bool accepts_gzip(const std::map<std::string, std::string>& headers) {
  auto it = headers.find("accept-encoding");
  if (it == headers.end()) return false;
  for (auto part : detail::split(it->second, ',')) {
    auto coding = detail::trim(part.substr(0, part.find(';')));
    if (coding != "gzip" && coding != "*") continue;
    auto q = part.find("q=");
    if (q != std::string_view::npos && detail::trim(part.substr(q + 2)).substr(0, 1) == "0" &&
        detail::trim(part.substr(q + 2)).find_first_not_of("0.") == std::string_view::npos)
      continue;
    return true;
  }
  return false;
}

void ApiService::set_snapshot(std::shared_ptr<const Snapshot> snapshot) {
  std::lock_guard lock(mutex_);
  snapshot_ = std::move(snapshot);
}

std::shared_ptr<const Snapshot> ApiService::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

namespace {

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
  HttpResponse r;
  r.status = status;
  r.body = json{{"error", code}, {"message", message}}.dump();
  return r;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

HttpResponse search_response(const Snapshot& snap, const HttpRequest& req) {
  auto q = req.query.find("q");
  if (q == req.query.end() || normalise(q->second).empty())
    return error_response(400, "EmptyQuery", "query must not be empty");
  std::size_t limit = 20;
  if (auto l = req.query.find("limit"); l != req.query.end()) {
    auto v = parse_int(l->second);
    if (!v || *v < 1) return error_response(400, "InvalidLimit", "limit must be a positive integer");
    limit = static_cast<std::size_t>(std::min<long long>(*v, 1000));
  }
  const auto result = snap.search(q->second, limit);
  json topics = json::array(), entities = json::array();
  for (const auto& t : result.topics)
    topics.push_back({{"topicId", t.topicId}, {"label", t.label}, {"level", t.level}, {"score", t.score}});
  for (const auto& e : result.entities)
    entities.push_back({{"entityId", e.entityId}, {"title", e.title}, {"year", e.year}, {"score", e.score}});
  HttpResponse r;
  r.body = json{{"topics", std::move(topics)}, {"entities", std::move(entities)}}.dump();
  return r;
}

HttpResponse export_response(const Snapshot& snap, const HttpRequest& req) {
  std::vector<EntityId> ids;
  try {
    auto body = json::parse(req.body);
    const json& list = body.is_object() ? body.at("ids") : body;
    ids = list.get<std::vector<EntityId>>();
  } catch (const json::exception&) {
    return error_response(400, "MalformedBody", "expected a JSON array of entity ids");
  }
  if (ids.empty()) return error_response(400, "EmptyList", "no entity ids given");
  std::vector<EntityId> unknown;
  HttpResponse r;
  r.contentType = "text/csv; charset=utf-8";
  r.body = snap.export_csv(ids, unknown);
  r.headers.emplace_back("Content-Disposition", "attachment; filename=\"selection.csv\"");
  if (!unknown.empty())
    r.headers.emplace_back("X-Export-Warning", "unknown ids skipped: " + detail::join(unknown, ","));
  return r;
}

}  // namespace

HttpResponse ApiService::handle(const HttpRequest& req) const {
  const auto snap = snapshot();
  HttpResponse r;
  bool precompressed = false;

  if (req.path == "/healthz") {
    r.contentType = "text/plain";
    r.body = snap ? "ok" : "starting";
    r.status = snap ? 200 : 503;
    return r;
  }
  if (!snap) return error_response(503, "SnapshotNotReady", "no snapshot loaded");

  const bool gzip = accepts_gzip(req.headers);
  if (req.method == "GET" && req.path == "/api/map") {
    auto d = req.query.find("depth");
    auto depth = d == req.query.end() ? std::optional<long long>(1) : parse_int(d->second);
    const std::string* body = depth && *depth >= 1 && *depth <= snap->max_depth()
                                  ? snap->payload(static_cast<int>(*depth))
                                  : nullptr;
    if (!body)
      return error_response(400, "InvalidDepth",
                            "depth must be between 1 and " + std::to_string(snap->max_depth()));
    r.headers.emplace_back("X-Cache", "HIT");
    if (gzip) {
      r.body = *snap->payload_gzip(static_cast<int>(*depth));
      precompressed = true;
    } else {
      r.body = *body;
    }
  } else if (req.method == "GET" && req.path == "/api/meta") {
    r.body = json{{"maxDepth", snap->max_depth()},
                  {"depths", snap->depths()},
                  {"worldRadius", snap->bundle().layout.worldRadius},
                  {"entities", snap->bundle().corpus.size()}}
                 .dump();
  } else if (req.method == "GET" && req.path == "/api/search") {
    r = search_response(*snap, req);
  } else if (req.method == "GET" && req.path.rfind("/api/entity/", 0) == 0) {
    auto detail = snap->entity_detail(req.path.substr(std::string_view("/api/entity/").size()));
    if (!detail) return error_response(404, "UnknownEntity", "no such entity");
    r.body = std::move(*detail);
  } else if (req.method == "POST" && req.path == "/api/export") {
    r = export_response(*snap, req);
  } else {
    return error_response(404, "NotFound", "no route for " + req.method + " " + req.path);
  }

  if (r.status == 200) {
    r.headers.emplace_back("Vary", "Accept-Encoding");
    if (gzip) {
      if (!precompressed) r.body = gzip_compress(r.body, 6);
      r.headers.emplace_back("Content-Encoding", "gzip");
    }
  }
  return r;
}

}  // namespace atlas
