#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "atlas/ingestion.hpp"

namespace atlas {

using TopicId = std::string;

/// Topic id of the hierarchy root. Folder paths never start with '/', so this
/// cannot collide with a manual topic.
inline const TopicId kRootTopic = "/";

struct TopicNode {
  TopicId topicId;
  std::string label;
  int level = 0;
  std::optional<TopicId> parent;
  std::vector<TopicId> children;
  std::set<ConceptId> conceptSignature;

  bool operator==(const TopicNode&) const = default;
};

/// Rooted topic tree keyed by topic id. Children are kept sorted by id.
class TopicHierarchy {
 public:
  TopicHierarchy();

  /// Adds a topic below `parent` at parent.level + 1.
  TopicNode& add(const TopicId& id, std::string label, const TopicId& parent);

  bool contains(const TopicId& id) const { return nodes_.count(id) != 0; }
  const TopicNode& at(const TopicId& id) const;
  const TopicNode& root() const { return at(kRootTopic); }
  const std::map<TopicId, TopicNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int max_depth() const noexcept { return maxDepth_; }

  /// Topics at one level, sorted by id.
  std::vector<TopicId> level(int l) const;

  /// `id` followed by its ancestors up to and including the root.
  std::vector<TopicId> path_to_root(const TopicId& id) const;

  /// Ancestor of `id` at `level`, or `id` itself when it is not deeper than `level`.
  TopicId ancestor_at(const TopicId& id, int level) const;

  bool is_ancestor_or_self(const TopicId& ancestor, const TopicId& id) const;

  void set_signature(const TopicId& id, std::set<ConceptId> signature);

  /// Rebuilds a hierarchy from stored nodes; validates the tree invariants.
  static TopicHierarchy from_nodes(std::vector<TopicNode> nodes);

  bool operator==(const TopicHierarchy&) const = default;

 private:
  std::map<TopicId, TopicNode> nodes_;
  int maxDepth_ = 0;
};

enum class AnnotationTag { direct, induced };

/// Entity-to-topic membership per level, level 0 being the root.
struct TopicAssignment {
  std::map<int, std::map<EntityId, std::set<TopicId>>> byLevel;
  std::map<std::pair<EntityId, TopicId>, AnnotationTag> provenance;
  /// Topic of the entity's first direct path (manual hierarchies); decides
  /// where the original instance lives.
  std::map<EntityId, TopicId> primaryPath;

  const std::set<TopicId>* topics(const EntityId& entity, int level) const;
  bool assigned(const EntityId& entity, const TopicId& topic, int level) const;

  bool operator==(const TopicAssignment&) const = default;
};

/// One topic per folder; ids are the full folder path.
TopicHierarchy build_mthg(const FolderTree& tree);

/// Direct annotations from folder paths, in record order.
std::map<EntityId, std::vector<TopicId>> direct_topics_from_folders(
    std::span<const EntityRecord> records);

/// Annotates each entity to every ancestor of each direct topic. Every entity
/// in `direct` is also assigned to the root.
TopicAssignment backpropagate(const std::map<EntityId, std::vector<TopicId>>& direct,
                              const TopicHierarchy& thg);

/// Binary entity x concept matrix. Rows follow `entities`, columns `concepts`.
struct DocConceptMatrix {
  std::vector<EntityId> entities;
  std::vector<ConceptId> concepts;
  /// Display names per column; defaults to the concept ids.
  std::vector<std::string> conceptLabels;
  Eigen::SparseMatrix<double, Eigen::RowMajor> values;

  static DocConceptMatrix from_table(const AnnotationTable& eat,
                                     const Gazetteer* names = nullptr);
  static DocConceptMatrix from_dense(std::vector<EntityId> entities,
                                     std::vector<ConceptId> concepts,
                                     const Eigen::MatrixXd& dense);
};

struct DiscoveredTopics {
  std::vector<TopicNode> topics;  // sorted by id, level set, no parent yet
  std::map<EntityId, std::set<TopicId>> assignments;
};

/// Normalised pointwise mutual information between all concept columns.
/// Pairs that never co-occur score -1; columns present in every row score 1
/// against each other.
Eigen::MatrixXd npmi_matrix(const DocConceptMatrix& m);

/// Greedy average-linkage agglomeration of concepts on NPMI down to at most k
/// clusters. Returns clusters as sorted column-index lists ordered by their
/// smallest column.
std::vector<std::vector<int>> cluster_concepts(const DocConceptMatrix& m, int k);

/// Topics for one level: clusters become topics labelled by their three most
/// frequent concepts. An entity joins every topic it shares >= 2 concepts with
/// and always its best-scoring topic.
DiscoveredTopics discover_topics(const DocConceptMatrix& m, int k, int level = 1);

/// Parent per lower topic: the upper topic with the highest Jaccard similarity
/// of entity sets, ties to the smaller id.
std::map<TopicId, TopicId> link_levels(
    const std::map<TopicId, std::set<EntityId>>& lower,
    const std::map<TopicId, std::set<EntityId>>& upper);

struct DataHierarchy {
  TopicHierarchy thg;
  TopicAssignment assignment;
};

inline const std::vector<int> kDefaultPyramid = {10, 25, 60, 120, 200};

/// Topic counts are listed top level first and must strictly increase.
DataHierarchy build_dthg(const DocConceptMatrix& m,
                         const std::vector<int>& pyramid = kDefaultPyramid);

/// Topic -> entity sets at one level.
std::map<TopicId, std::set<EntityId>> members_by_topic(const TopicAssignment& a, int level);

}  // namespace atlas
