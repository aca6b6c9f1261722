#include "atlas/thg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <tuple>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr const char* kModule = "thg";

TopicId data_topic_id(int level, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%d-T%03zu", level, index);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// TopicHierarchy

TopicHierarchy::TopicHierarchy() {
  TopicNode root;
  root.topicId = kRootTopic;
  root.label = "";
  root.level = 0;
  nodes_.emplace(kRootTopic, std::move(root));
}

TopicNode& TopicHierarchy::add(const TopicId& id, std::string label, const TopicId& parent) {
  auto pit = nodes_.find(parent);
  if (pit == nodes_.end()) throw Error(Errc::UnknownTopic, kModule, "unknown parent " + parent);
  if (nodes_.count(id)) throw Error(Errc::UnknownTopic, kModule, "duplicate topic " + id);
  for (const auto& sibling : pit->second.children)
    if (nodes_.at(sibling).label == label)
      throw Error(Errc::UnknownTopic, kModule, "duplicate sibling label '" + label + "'");
  TopicNode node;
  node.topicId = id;
  node.label = std::move(label);
  node.level = pit->second.level + 1;
  node.parent = parent;
  auto& children = pit->second.children;
  children.insert(std::upper_bound(children.begin(), children.end(), id), id);
  maxDepth_ = std::max(maxDepth_, node.level);
  return nodes_.emplace(id, std::move(node)).first->second;
}

const TopicNode& TopicHierarchy::at(const TopicId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::UnknownTopic, kModule, id);
  return it->second;
}

std::vector<TopicId> TopicHierarchy::level(int l) const {
  std::vector<TopicId> out;
  for (const auto& [id, node] : nodes_)
    if (node.level == l) out.push_back(id);
  return out;
}

std::vector<TopicId> TopicHierarchy::path_to_root(const TopicId& id) const {
  std::vector<TopicId> path;
  const TopicNode* node = &at(id);
  while (true) {
    path.push_back(node->topicId);
    if (!node->parent) break;
    node = &at(*node->parent);
  }
  return path;
}

TopicId TopicHierarchy::ancestor_at(const TopicId& id, int level) const {
  const TopicNode* node = &at(id);
  while (node->level > level) node = &at(*node->parent);
  return node->topicId;
}

bool TopicHierarchy::is_ancestor_or_self(const TopicId& ancestor, const TopicId& id) const {
  const auto& a = at(ancestor);
  const auto& n = at(id);
  return n.level >= a.level && ancestor_at(id, a.level) == ancestor;
}

void TopicHierarchy::set_signature(const TopicId& id, std::set<ConceptId> signature) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::UnknownTopic, kModule, id);
  it->second.conceptSignature = std::move(signature);
}

TopicHierarchy TopicHierarchy::from_nodes(std::vector<TopicNode> nodes) {
  std::map<TopicId, TopicNode> byId;
  for (auto& n : nodes) {
    auto id = n.topicId;
    if (!byId.emplace(id, std::move(n)).second)
      throw Error(Errc::UnknownTopic, kModule, "duplicate topic " + id);
  }
  auto rootIt = byId.find(kRootTopic);
  if (rootIt == byId.end() || rootIt->second.parent || rootIt->second.level != 0)
    throw Error(Errc::UnknownTopic, kModule, "hierarchy has no valid root");
  // Insert breadth-first so every parent exists before its children.
  TopicHierarchy h;
  h.nodes_.at(kRootTopic).label = rootIt->second.label;
  h.nodes_.at(kRootTopic).conceptSignature = rootIt->second.conceptSignature;
  std::vector<TopicId> frontier = {kRootTopic};
  std::size_t placed = 1;
  while (!frontier.empty()) {
    std::vector<TopicId> next;
    for (const auto& parentId : frontier) {
      for (const auto& childId : byId.at(parentId).children) {
        auto it = byId.find(childId);
        if (it == byId.end() || it->second.parent != parentId)
          throw Error(Errc::UnknownTopic, kModule, "dangling child " + childId);
        auto& added = h.add(childId, it->second.label, parentId);
        if (added.level != it->second.level)
          throw Error(Errc::UnknownTopic, kModule, "inconsistent level for " + childId);
        added.conceptSignature = it->second.conceptSignature;
        next.push_back(childId);
        ++placed;
      }
    }
    frontier = std::move(next);
  }
  if (placed != byId.size())
    throw Error(Errc::UnknownTopic, kModule, "topics unreachable from the root");
  return h;
}

// ---------------------------------------------------------------------------
// Assignments

const std::set<TopicId>* TopicAssignment::topics(const EntityId& entity, int level) const {
  auto lit = byLevel.find(level);
  if (lit == byLevel.end()) return nullptr;
  auto eit = lit->second.find(entity);
  return eit == lit->second.end() ? nullptr : &eit->second;
}

bool TopicAssignment::assigned(const EntityId& entity, const TopicId& topic, int level) const {
  const auto* set = topics(entity, level);
  return set && set->count(topic);
}

std::map<TopicId, std::set<EntityId>> members_by_topic(const TopicAssignment& a, int level) {
  std::map<TopicId, std::set<EntityId>> out;
  if (auto it = a.byLevel.find(level); it != a.byLevel.end())
    for (const auto& [entity, topics] : it->second)
      for (const auto& t : topics) out[t].insert(entity);
  return out;
}

TopicHierarchy build_mthg(const FolderTree& tree) {
  TopicHierarchy h;
  std::vector<std::pair<std::string, TopicId>> frontier;
  for (const auto& child : tree.rootChildren) frontier.emplace_back(child, kRootTopic);
  while (!frontier.empty()) {
    std::vector<std::pair<std::string, TopicId>> next;
    for (const auto& [path, parent] : frontier) {
      const auto& node = tree.nodes.at(path);
      h.add(path, node.label, parent);
      for (const auto& c : node.childPaths) next.emplace_back(c, path);
    }
    frontier = std::move(next);
  }
  return h;
}

std::map<EntityId, std::vector<TopicId>> direct_topics_from_folders(
    std::span<const EntityRecord> records) {
  std::map<EntityId, std::vector<TopicId>> direct;
  for (const auto& r : records) direct[r.id] = r.folderPaths;
  return direct;
}

TopicAssignment backpropagate(const std::map<EntityId, std::vector<TopicId>>& direct,
                              const TopicHierarchy& thg) {
  TopicAssignment out;
  for (const auto& [entity, topics] : direct) {
    for (const auto& t : topics)
      if (!thg.contains(t)) throw Error(Errc::UnknownTopic, kModule, t);
    out.byLevel[0][entity].insert(kRootTopic);
    out.provenance.emplace(std::pair{entity, kRootTopic}, AnnotationTag::induced);
    if (!topics.empty()) out.primaryPath[entity] = topics.front();
    for (const auto& t : topics) {
      for (const auto& ancestor : thg.path_to_root(t)) {
        out.byLevel[thg.at(ancestor).level][entity].insert(ancestor);
        out.provenance.emplace(std::pair{entity, ancestor}, AnnotationTag::induced);
      }
    }
    for (const auto& t : topics) out.provenance[{entity, t}] = AnnotationTag::direct;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Data-driven hierarchy

DocConceptMatrix DocConceptMatrix::from_table(const AnnotationTable& eat, const Gazetteer* names) {
  DocConceptMatrix m;
  std::set<ConceptId> concepts;
  for (const auto& [entity, counts] : eat.rows) {
    m.entities.push_back(entity);
    for (const auto& [c, n] : counts) concepts.insert(c);
  }
  m.concepts.assign(concepts.begin(), concepts.end());
  for (const auto& c : m.concepts) {
    const ConceptEntry* e = names ? names->find(c) : nullptr;
    m.conceptLabels.push_back(e ? e->preferredName : c);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t row = 0; row < m.entities.size(); ++row) {
    for (const auto& [c, n] : eat.rows.at(m.entities[row])) {
      auto col = std::lower_bound(m.concepts.begin(), m.concepts.end(), c) - m.concepts.begin();
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), 1.0);
    }
  }
  m.values.resize(static_cast<Eigen::Index>(m.entities.size()),
                  static_cast<Eigen::Index>(m.concepts.size()));
  m.values.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

DocConceptMatrix DocConceptMatrix::from_dense(std::vector<EntityId> entities,
                                              std::vector<ConceptId> concepts,
                                              const Eigen::MatrixXd& dense) {
  DocConceptMatrix m;
  m.entities = std::move(entities);
  m.concepts = std::move(concepts);
  m.conceptLabels = m.concepts;
  m.values = (dense.array() != 0.0).cast<double>().matrix().sparseView();
  return m;
}

Eigen::MatrixXd npmi_matrix(const DocConceptMatrix& m) {
  const double n = static_cast<double>(m.values.rows());
  const Eigen::Index c = m.values.cols();
  Eigen::SparseMatrix<double> x = m.values;
  Eigen::MatrixXd co = Eigen::MatrixXd(x.transpose() * x);
  Eigen::MatrixXd out(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const double cij = co(i, j);
      if (cij <= 0.0) {
        out(i, j) = -1.0;
        continue;
      }
      const double pij = cij / n;
      const double pi = co(i, i) / n;
      const double pj = co(j, j) / n;
      const double denom = -std::log(pij);
      out(i, j) = denom <= 0.0 ? 1.0 : std::log(pij / (pi * pj)) / denom;
    }
  }
  return out;
}

namespace {

/// Agglomerates once and records the partition when the cluster count first
/// reaches each requested k (or the count it ends at, if k exceeds the columns).
std::map<int, std::vector<std::vector<int>>> agglomerate(const DocConceptMatrix& m,
                                                         std::set<int> ks) {
  const int c = static_cast<int>(m.values.cols());
  const Eigen::MatrixXd npmi = npmi_matrix(m);
  Eigen::SparseMatrix<double> x = m.values;
  Eigen::MatrixXd co = Eigen::MatrixXd(x.transpose() * x);

  // Singletons that co-occur with nothing else are merged last.
  std::vector<int> isolated(static_cast<std::size_t>(c), 0);
  for (int i = 0; i < c; ++i) {
    bool any = false;
    for (int j = 0; j < c && !any; ++j) any = j != i && co(i, j) > 0.0;
    isolated[static_cast<std::size_t>(i)] = any ? 0 : 1;
  }

  std::vector<std::vector<int>> members(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) members[static_cast<std::size_t>(i)] = {i};
  Eigen::MatrixXd linkSum = npmi;
  std::vector<int> active(static_cast<std::size_t>(c));
  std::iota(active.begin(), active.end(), 0);

  std::map<int, std::vector<std::vector<int>>> out;
  auto snapshot = [&] {
    std::vector<std::vector<int>> parts;
    for (int a : active) {
      auto v = members[static_cast<std::size_t>(a)];
      std::sort(v.begin(), v.end());
      parts.push_back(std::move(v));
    }
    std::sort(parts.begin(), parts.end());
    return parts;
  };
  auto isolation = [&](int a) {
    const auto& mem = members[static_cast<std::size_t>(a)];
    return mem.size() == 1 ? isolated[static_cast<std::size_t>(mem.front())] : 0;
  };

  while (!ks.empty()) {
    const int count = static_cast<int>(active.size());
    while (!ks.empty() && *ks.rbegin() >= count) {
      out[*ks.rbegin()] = snapshot();
      ks.erase(std::prev(ks.end()));
    }
    if (ks.empty() || count <= 1) break;

    // Active clusters are kept ordered by smallest member, so (x, y) with
    // x < y compares cluster keys lexicographically.
    double bestScore = -std::numeric_limits<double>::infinity();
    int bestIso = 3;
    std::size_t bx = 0, by = 0;
    for (std::size_t xi = 0; xi < active.size(); ++xi) {
      const int a = active[xi];
      const double na = static_cast<double>(members[static_cast<std::size_t>(a)].size());
      const int isoA = isolation(a);
      for (std::size_t yi = xi + 1; yi < active.size(); ++yi) {
        const int b = active[yi];
        const double nb = static_cast<double>(members[static_cast<std::size_t>(b)].size());
        const double score = linkSum(a, b) / (na * nb);
        const int iso = isoA + isolation(b);
        if (score > bestScore || (score == bestScore && iso < bestIso)) {
          bestScore = score;
          bestIso = iso;
          bx = xi;
          by = yi;
        }
      }
    }
    const int a = active[bx];
    const int b = active[by];
    linkSum.row(a) += linkSum.row(b);
    linkSum.col(a) += linkSum.col(b);
    auto& ma = members[static_cast<std::size_t>(a)];
    auto& mb = members[static_cast<std::size_t>(b)];
    ma.insert(ma.end(), mb.begin(), mb.end());
    mb.clear();
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(by));
  }
  return out;
}

DiscoveredTopics topics_from_clusters(const DocConceptMatrix& m,
                                      const std::vector<std::vector<int>>& clusters, int level) {
  DiscoveredTopics out;
  const auto c = static_cast<std::size_t>(m.values.cols());
  const Eigen::RowVectorXd df = Eigen::RowVectorXd::Ones(m.values.rows()) * m.values;
  std::vector<std::size_t> clusterOf(c, 0);
  for (std::size_t t = 0; t < clusters.size(); ++t) {
    TopicNode node;
    node.topicId = data_topic_id(level, t);
    node.level = level;
    auto ranked = clusters[t];
    std::stable_sort(ranked.begin(), ranked.end(), [&](int x, int y) { return df(x) > df(y); });
    std::vector<std::string> top;
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i)
      top.push_back(m.conceptLabels[static_cast<std::size_t>(ranked[i])]);
    for (std::size_t i = 0; i < top.size(); ++i) node.label += (i ? ", " : "") + top[i];
    for (int col : clusters[t]) {
      node.conceptSignature.insert(m.concepts[static_cast<std::size_t>(col)]);
      clusterOf[static_cast<std::size_t>(col)] = t;
    }
    out.topics.push_back(std::move(node));
  }

  for (Eigen::Index row = 0; row < m.values.outerSize(); ++row) {
    std::vector<int> score(clusters.size(), 0);
    for (decltype(m.values)::InnerIterator it(m.values, row); it; ++it)
      ++score[clusterOf[static_cast<std::size_t>(it.col())]];
    auto& assigned = out.assignments[m.entities[static_cast<std::size_t>(row)]];
    std::size_t best = 0;
    for (std::size_t t = 0; t < clusters.size(); ++t) {
      if (score[t] >= 2) assigned.insert(out.topics[t].topicId);
      if (score[t] > score[best]) best = t;
    }
    assigned.insert(out.topics[best].topicId);
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> cluster_concepts(const DocConceptMatrix& m, int k) {
  if (m.values.rows() == 0 || m.values.cols() == 0)
    throw Error(Errc::EmptyMatrix, kModule, "document-concept matrix is empty");
  if (k < 1) throw Error(Errc::OutOfRange, kModule, "k must be >= 1");
  return agglomerate(m, {k}).begin()->second;
}

DiscoveredTopics discover_topics(const DocConceptMatrix& m, int k, int level) {
  return topics_from_clusters(m, cluster_concepts(m, k), level);
}

std::map<TopicId, TopicId> link_levels(const std::map<TopicId, std::set<EntityId>>& lower,
                                       const std::map<TopicId, std::set<EntityId>>& upper) {
  std::map<TopicId, TopicId> parent;
  if (upper.empty()) return parent;
  for (const auto& [low, lowSet] : lower) {
    const TopicId* best = nullptr;
    double bestScore = -1.0;
    for (const auto& [up, upSet] : upper) {
      std::size_t inter = 0;
      for (const auto& e : lowSet) inter += upSet.count(e);
      const std::size_t uni = lowSet.size() + upSet.size() - inter;
      const double j = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
      if (j > bestScore) {
        bestScore = j;
        best = &up;
      }
    }
    parent[low] = *best;
  }
  return parent;
}

DataHierarchy build_dthg(const DocConceptMatrix& m, const std::vector<int>& pyramid) {
  if (pyramid.empty()) throw Error(Errc::InvalidPyramid, kModule, "pyramid is empty");
  for (std::size_t i = 0; i < pyramid.size(); ++i) {
    if (pyramid[i] < 1 || (i > 0 && pyramid[i] <= pyramid[i - 1]))
      throw Error(Errc::InvalidPyramid, kModule,
                  "topic counts must be positive and strictly increase towards the leaves");
  }
  if (m.values.rows() == 0 || m.values.cols() == 0)
    throw Error(Errc::EmptyMatrix, kModule, "document-concept matrix is empty");

  const auto partitions = agglomerate(m, std::set<int>(pyramid.begin(), pyramid.end()));
  const int depth = static_cast<int>(pyramid.size());
  std::vector<DiscoveredTopics> levels;
  for (int l = 1; l <= depth; ++l)
    levels.push_back(topics_from_clusters(m, partitions.at(pyramid[static_cast<std::size_t>(l - 1)]), l));

  auto members = [](const DiscoveredTopics& d) {
    std::map<TopicId, std::set<EntityId>> out;
    for (const auto& t : d.topics) out[t.topicId];
    for (const auto& [e, topics] : d.assignments)
      for (const auto& t : topics) out[t].insert(e);
    return out;
  };

  std::vector<std::map<TopicId, TopicId>> parents(static_cast<std::size_t>(depth));
  for (int l = depth; l >= 2; --l)
    parents[static_cast<std::size_t>(l - 1)] =
        link_levels(members(levels[static_cast<std::size_t>(l - 1)]),
                    members(levels[static_cast<std::size_t>(l - 2)]));

  DataHierarchy out;
  for (int l = 1; l <= depth; ++l) {
    for (const auto& t : levels[static_cast<std::size_t>(l - 1)].topics) {
      const TopicId& parent = l == 1 ? kRootTopic : parents[static_cast<std::size_t>(l - 1)].at(t.topicId);
      out.thg.add(t.topicId, t.label, parent).conceptSignature = t.conceptSignature;
    }
  }

  std::map<EntityId, std::vector<TopicId>> direct;
  for (const auto& e : m.entities) direct[e];
  for (const auto& level : levels)
    for (const auto& [e, topics] : level.assignments)
      direct[e].insert(direct[e].end(), topics.begin(), topics.end());
  out.assignment = backpropagate(direct, out.thg);
  out.assignment.primaryPath.clear();
  return out;
}

}  // namespace atlas
