#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "atlas/ceg.hpp"
#include "atlas/thg.hpp"

namespace atlas {

using InstanceId = std::string;

enum class InstanceKind { original, clone };
enum class EdgeKind { within_topic, between_topic, matching };

inline InstanceId make_instance_id(const EntityId& entity, const TopicId& topic) {
  return entity + "::" + topic;
}

/// An entity placed in exactly one topic at one level.
struct InstanceNode {
  InstanceId instanceId;
  EntityId entityId;
  TopicId topicId;
  int level = 0;
  InstanceKind kind = InstanceKind::original;
  AnnotationTag tag = AnnotationTag::direct;

  bool operator==(const InstanceNode&) const = default;
};

struct InstanceEdge {
  InstanceId a;
  InstanceId b;
  EdgeKind kind = EdgeKind::within_topic;
  int weight = 0;

  bool operator==(const InstanceEdge&) const = default;
};

/// Instances and edges per level (1..maxDepth), each sorted by id.
struct OccupancyGraph {
  std::map<int, std::vector<InstanceNode>> instances;
  std::map<int, std::vector<InstanceEdge>> edges;

  int max_level() const { return instances.empty() ? 0 : instances.rbegin()->first; }

  bool operator==(const OccupancyGraph&) const = default;
};

/// The entity's topics at `level`. A branch of its topic paths that ends above
/// `level` is carried down: its deepest topic stands in for the missing ones,
/// so every level at or below the entity's first assigned level is populated.
std::vector<TopicId> effective_topics(const TopicAssignment& assignment,
                                      const TopicHierarchy& thg, const EntityId& entity,
                                      int level);

/// Primary topic among `candidates`: the one on the entity's first direct path
/// when known, otherwise the best concept-signature overlap; ties to smaller id.
TopicId primary_topic(const EntityId& entity, int level, const std::vector<TopicId>& candidates,
                      const TopicAssignment& assignment, const TopicHierarchy& thg,
                      const std::set<ConceptId>& concepts);

/// All instances of one entity over levels 1..thg.max_depth().
std::vector<InstanceNode> spawn_instances(const EntityId& entity,
                                          const TopicAssignment& assignment,
                                          const TopicHierarchy& thg,
                                          const std::set<ConceptId>& concepts);

/// Star from the original to every clone. Input: one entity at one level.
std::vector<InstanceEdge> matching_edges(std::span<const InstanceNode> instances);

/// Full bipartite expansion of one similarity edge between instance lists.
std::vector<InstanceEdge> expand_edges(const SimilarityEdge& edge,
                                       std::span<const InstanceNode> instancesOfA,
                                       std::span<const InstanceNode> instancesOfB);

OccupancyGraph build_tog(const CoreGraph& ceg, const TopicAssignment& assignment,
                         const TopicHierarchy& thg, const AnnotationTable& eat);

std::string_view to_string(InstanceKind k) noexcept;
std::string_view to_string(EdgeKind k) noexcept;
std::string_view to_string(AnnotationTag t) noexcept;

}  // namespace atlas
