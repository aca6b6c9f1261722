#include "atlas/ceg.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "atlas/error.hpp"
#include "text_util.hpp"

namespace atlas {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::size_t index_of(const std::vector<EntityId>& sorted, const EntityId& id) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), id) -
                                  sorted.begin());
}

/// Number of leading path segments two folder paths share.
int common_prefix(const std::string& p, const std::string& q) {
  auto a = detail::split(p, '/');
  auto b = detail::split(q, '/');
  int n = 0;
  while (n < static_cast<int>(std::min(a.size(), b.size())) && a[n] == b[n]) ++n;
  return n;
}

/// Pair weights for all pairs sharing at least one concept, keyed by (i, j), i < j.
std::map<std::pair<std::size_t, std::size_t>, int> pair_weights(
    const AnnotationTable& eat, const std::vector<EntityId>& nodes) {
  std::map<ConceptId, std::vector<std::size_t>> postings;
  for (const auto& [entity, counts] : eat.rows) {
    auto i = index_of(nodes, entity);
    for (const auto& [concept_id, n] : counts) postings[concept_id].push_back(i);
  }
  std::map<std::pair<std::size_t, std::size_t>, int> weights;
  for (auto& [concept_id, list] : postings) {
    std::sort(list.begin(), list.end());
    for (std::size_t x = 0; x < list.size(); ++x)
      for (std::size_t y = x + 1; y < list.size(); ++y) ++weights[{list[x], list[y]}];
  }
  return weights;
}

}  // namespace

int shared_concepts(const std::set<ConceptId>& a, const std::set<ConceptId>& b) {
  int n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

CoreGraph build_ceg(const AnnotationTable& eat, int threshold) {
  if (threshold < 1) throw Error(Errc::OutOfRange, "ceg", "threshold must be >= 1");
  if (eat.rows.empty()) throw Error(Errc::EmptyCorpus, "ceg", "annotation table has no entities");
  CoreGraph g;
  g.threshold = threshold;
  for (const auto& [entity, counts] : eat.rows) g.nodes.push_back(entity);
  for (const auto& [pair, w] : pair_weights(eat, g.nodes))
    if (w >= threshold) g.edges.push_back({g.nodes[pair.first], g.nodes[pair.second], w, false});
  return g;
}

std::vector<int> connected_components(const CoreGraph& g) {
  DisjointSets sets(g.nodes.size());
  for (const auto& e : g.edges) sets.unite(index_of(g.nodes, e.a), index_of(g.nodes, e.b));
  std::vector<int> label(g.nodes.size(), -1);
  std::unordered_map<std::size_t, int> rootLabel;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto [it, inserted] = rootLabel.emplace(sets.find(i), static_cast<int>(rootLabel.size()));
    label[i] = it->second;
  }
  return label;
}

int component_count(const CoreGraph& g) {
  auto labels = connected_components(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

CoreGraph ensure_connected(CoreGraph g, const AnnotationTable& eat,
                           std::span<const EntityRecord> records) {
  const auto n = g.nodes.size();
  if (n < 2) return g;
  DisjointSets sets(n);
  for (const auto& e : g.edges) sets.unite(index_of(g.nodes, e.a), index_of(g.nodes, e.b));
  std::size_t components = 0;
  for (std::size_t i = 0; i < n; ++i) components += sets.find(i) == i;
  if (components == 1) return g;

  std::vector<SimilarityEdge> added;

  // Phase 1: Kruskal over positive-weight pairs, heaviest first, ties by (a, b).
  struct Candidate {
    int weight;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (const auto& [pair, w] : pair_weights(eat, g.nodes))
    if (sets.find(pair.first) != sets.find(pair.second))
      candidates.push_back({w, pair.first, pair.second});
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.weight, x.i, x.j) < std::tie(x.weight, y.i, y.j);
  });
  for (const auto& c : candidates) {
    if (components == 1) break;
    if (sets.unite(c.i, c.j)) {
      added.push_back({g.nodes[c.i], g.nodes[c.j], c.weight, true});
      --components;
    }
  }

  // Phase 2: components with nothing in common; join by folder-path proximity.
  if (components > 1) {
    std::unordered_map<EntityId, const EntityRecord*> byId;
    for (const auto& r : records) byId.emplace(r.id, &r);
    auto prefix = [&](std::size_t i, std::size_t j) {
      auto ri = byId.find(g.nodes[i]);
      auto rj = byId.find(g.nodes[j]);
      if (ri == byId.end() || rj == byId.end()) return 0;
      int best = 0;
      for (const auto& p : ri->second->folderPaths)
        for (const auto& q : rj->second->folderPaths) best = std::max(best, common_prefix(p, q));
      return best;
    };
    std::vector<Candidate> fallback;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (sets.find(i) != sets.find(j)) fallback.push_back({prefix(i, j), i, j});
    std::sort(fallback.begin(), fallback.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(y.weight, x.i, x.j) < std::tie(x.weight, y.i, y.j);
    });
    for (const auto& c : fallback) {
      if (components == 1) break;
      if (sets.unite(c.i, c.j)) {
        added.push_back({g.nodes[c.i], g.nodes[c.j], 0, true});
        --components;
      }
    }
  }

  g.edges.insert(g.edges.end(), added.begin(), added.end());
  std::sort(g.edges.begin(), g.edges.end(), [](const SimilarityEdge& x, const SimilarityEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return g;
}

}  // namespace atlas
