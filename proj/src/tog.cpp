#include "atlas/tog.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "atlas/error.hpp"

namespace atlas {

std::string_view to_string(InstanceKind k) noexcept {
  return k == InstanceKind::original ? "original" : "clone";
}

std::string_view to_string(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::within_topic: return "within_topic";
    case EdgeKind::between_topic: return "between_topic";
    case EdgeKind::matching: return "matching";
  }
  return "";
}

std::string_view to_string(AnnotationTag t) noexcept {
  return t == AnnotationTag::direct ? "direct" : "induced";
}

std::vector<TopicId> effective_topics(const TopicAssignment& assignment,
                                      const TopicHierarchy& thg, const EntityId& entity,
                                      int level) {
  std::set<TopicId> current;
  if (const auto* first = assignment.topics(entity, 1)) current = *first;
  for (int l = 2; l <= level && !current.empty(); ++l) {
    const auto* assigned = assignment.topics(entity, l);
    std::set<TopicId> next;
    for (const auto& t : current) {
      bool descended = false;
      if (assigned)
        for (const auto& child : thg.at(t).children)
          if (assigned->count(child)) {
            next.insert(child);
            descended = true;
          }
      if (!descended) next.insert(t);
    }
    current = std::move(next);
  }
  return {current.begin(), current.end()};
}

TopicId primary_topic(const EntityId& entity, int level, const std::vector<TopicId>& candidates,
                      const TopicAssignment& assignment, const TopicHierarchy& thg,
                      const std::set<ConceptId>& concepts) {
  if (auto it = assignment.primaryPath.find(entity); it != assignment.primaryPath.end()) {
    const auto onPath = thg.ancestor_at(it->second, level);
    if (std::find(candidates.begin(), candidates.end(), onPath) != candidates.end())
      return onPath;
  }
  const TopicId* best = &candidates.front();
  int bestScore = -1;
  for (const auto& c : candidates) {
    const int score = shared_concepts(concepts, thg.at(c).conceptSignature);
    if (score > bestScore) {
      bestScore = score;
      best = &c;
    }
  }
  return *best;
}

std::vector<InstanceNode> spawn_instances(const EntityId& entity,
                                          const TopicAssignment& assignment,
                                          const TopicHierarchy& thg,
                                          const std::set<ConceptId>& concepts) {
  std::vector<InstanceNode> out;
  for (int level = 1; level <= thg.max_depth(); ++level) {
    auto topics = effective_topics(assignment, thg, entity, level);
    if (topics.empty())
      throw Error(Errc::MissingLevel, "tog",
                  "entity '" + entity + "' has no topic at level " + std::to_string(level));
    const auto primary = primary_topic(entity, level, topics, assignment, thg, concepts);
    for (const auto& t : topics) {
      InstanceNode node;
      node.instanceId = make_instance_id(entity, t);
      node.entityId = entity;
      node.topicId = t;
      node.level = level;
      node.kind = t == primary ? InstanceKind::original : InstanceKind::clone;
      auto tag = assignment.provenance.find({entity, t});
      node.tag = tag == assignment.provenance.end() ? AnnotationTag::induced : tag->second;
      out.push_back(std::move(node));
    }
  }
  return out;
}

std::vector<InstanceEdge> matching_edges(std::span<const InstanceNode> instances) {
  std::vector<InstanceEdge> out;
  auto original = std::find_if(instances.begin(), instances.end(), [](const InstanceNode& n) {
    return n.kind == InstanceKind::original;
  });
  if (original == instances.end()) return out;
  for (const auto& n : instances)
    if (n.kind == InstanceKind::clone)
      out.push_back({original->instanceId, n.instanceId, EdgeKind::matching, 0});
  return out;
}

std::vector<InstanceEdge> expand_edges(const SimilarityEdge& edge,
                                       std::span<const InstanceNode> instancesOfA,
                                       std::span<const InstanceNode> instancesOfB) {
  std::vector<InstanceEdge> out;
  out.reserve(instancesOfA.size() * instancesOfB.size());
  for (const auto& ia : instancesOfA)
    for (const auto& ib : instancesOfB)
      out.push_back({ia.instanceId, ib.instanceId,
                     ia.topicId == ib.topicId ? EdgeKind::within_topic : EdgeKind::between_topic,
                     edge.weight});
  return out;
}

OccupancyGraph build_tog(const CoreGraph& ceg, const TopicAssignment& assignment,
                         const TopicHierarchy& thg, const AnnotationTable& eat) {
  OccupancyGraph g;
  // (level, entity) -> instances, kept in spawn order.
  std::map<int, std::unordered_map<EntityId, std::vector<InstanceNode>>> byEntity;
  static const std::map<ConceptId, int> kNoConcepts;
  for (const auto& entity : ceg.nodes) {
    std::set<ConceptId> concepts;
    auto row = eat.rows.find(entity);
    for (const auto& [c, n] : row == eat.rows.end() ? kNoConcepts : row->second) concepts.insert(c);
    for (auto& inst : spawn_instances(entity, assignment, thg, concepts))
      byEntity[inst.level][entity].push_back(std::move(inst));
  }

  for (auto& [level, entities] : byEntity) {
    auto& instances = g.instances[level];
    auto& edges = g.edges[level];
    for (const auto& entity : ceg.nodes) {
      const auto& list = entities.at(entity);
      instances.insert(instances.end(), list.begin(), list.end());
      auto star = matching_edges(list);
      edges.insert(edges.end(), star.begin(), star.end());
    }
    for (const auto& e : ceg.edges) {
      auto expanded = expand_edges(e, entities.at(e.a), entities.at(e.b));
      edges.insert(edges.end(), expanded.begin(), expanded.end());
    }
    std::sort(instances.begin(), instances.end(),
              [](const InstanceNode& x, const InstanceNode& y) { return x.instanceId < y.instanceId; });
    std::sort(edges.begin(), edges.end(), [](const InstanceEdge& x, const InstanceEdge& y) {
      return std::tie(x.a, x.b, x.kind) < std::tie(y.a, y.b, y.kind);
    });
  }
  return g;
}

}  // namespace atlas
