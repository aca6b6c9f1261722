#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atlas/store.hpp"

namespace atlas {

struct TopicHit {
  TopicId topicId;
  std::string label;
  int level = 0;
  int score = 0;

  bool operator==(const TopicHit&) const = default;
};

struct EntityHit {
  EntityId entityId;
  std::string title;
  std::int64_t year = 0;
  int score = 0;

  bool operator==(const EntityHit&) const = default;
};

struct SearchResult {
  std::vector<TopicHit> topics;
  std::vector<EntityHit> entities;

  bool operator==(const SearchResult&) const = default;
};

/// Immutable, fully pre-rendered view of one bundle. Map payloads for every
/// depth are serialised (and gzipped) once, at construction.
class Snapshot {
 public:
  explicit Snapshot(GraphBundle bundle);

  const GraphBundle& bundle() const noexcept { return bundle_; }
  int max_depth() const noexcept { return maxDepth_; }

  /// Pre-encoded JSON payload; nullptr when the depth is out of range.
  const std::string* payload(int depth) const;
  const std::string* payload_gzip(int depth) const;
  std::vector<int> depths() const;

  /// Case-insensitive substring search; word-prefix hits score a bonus.
  /// Empty (after trimming) queries throw Error(EmptyInput).
  SearchResult search(std::string_view query, std::size_t limit = 20) const;

  std::optional<std::string> entity_detail(const EntityId& id) const;

  /// CSV with header id,title,authors,year,venue,doi,url in request order.
  /// Unknown ids are skipped and returned through `unknown`.
  std::string export_csv(const std::vector<EntityId>& ids, std::vector<EntityId>& unknown) const;

 private:
  struct EntityText {
    std::string title, abstract, authors;
  };

  std::string render_payload(int depth) const;

  GraphBundle bundle_;
  int maxDepth_ = 0;
  std::map<int, std::pair<std::string, std::string>> perDepth_;  // json, gzip
  std::map<EntityId, std::size_t> recordIndex_;
  std::map<EntityId, std::vector<const InstanceNode*>> instancesByEntity_;
  std::vector<EntityText> entityText_;
  std::vector<std::string> topicText_;
  std::vector<TopicId> topicIds_;
  std::map<std::string, std::vector<std::size_t>> entityPostings_;
  std::map<std::string, std::vector<std::size_t>> topicPostings_;
};

/// Renders one depth's map payload directly from a bundle (no caching).
std::string render_map_payload(const GraphBundle& bundle, int depth);

struct HttpRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string contentType = "application/json";
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

/// Routes API requests against the current snapshot. The snapshot pointer is
/// swapped atomically; a request keeps the snapshot it started with.
class ApiService {
 public:
  ApiService() = default;
  explicit ApiService(std::shared_ptr<const Snapshot> snapshot) : snapshot_(std::move(snapshot)) {}

  void set_snapshot(std::shared_ptr<const Snapshot> snapshot);
  std::shared_ptr<const Snapshot> snapshot() const;

  HttpResponse handle(const HttpRequest& request) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

bool accepts_gzip(const std::map<std::string, std::string>& headers);

}  // namespace atlas
