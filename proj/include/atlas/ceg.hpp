#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "atlas/ingestion.hpp"

namespace atlas {

/// Undirected similarity edge with a < b.
struct SimilarityEdge {
  EntityId a;
  EntityId b;
  int weight = 0;
  bool synthetic = false;

  bool operator==(const SimilarityEdge&) const = default;
};

/// Core entity graph. Nodes are sorted ids, edges sorted by (a, b).
struct CoreGraph {
  std::vector<EntityId> nodes;
  std::vector<SimilarityEdge> edges;
  int threshold = 5;

  bool operator==(const CoreGraph&) const = default;
};

int shared_concepts(const std::set<ConceptId>& a, const std::set<ConceptId>& b);

/// Edges between every pair sharing at least `threshold` concepts. Pair weights
/// are accumulated through a concept -> entities inverted index.
CoreGraph build_ceg(const AnnotationTable& eat, int threshold = 5);

/// Component label per node (index into g.nodes), labels dense from 0 in order
/// of first appearance.
std::vector<int> connected_components(const CoreGraph& g);
int component_count(const CoreGraph& g);

/// Joins components by maximum-weight sub-threshold edges (a maximum spanning
/// forest over components); anything still apart is attached with weight-0
/// edges to the entity with the longest common folder-path prefix. Added edges
/// are flagged synthetic. `records` supplies folder paths and may be empty.
CoreGraph ensure_connected(CoreGraph g, const AnnotationTable& eat,
                           std::span<const EntityRecord> records = {});

}  // namespace atlas
