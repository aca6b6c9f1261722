#pragma once

// Deterministic synthetic corpora for the demo and for property tests. Only
// raw mt19937_64 output is used, so results do not depend on the standard
// library's distribution implementations.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atlas/ingestion.hpp"

namespace atlas {

struct DemoCorpus {
  std::vector<EntityRecord> records;  // concepts left empty
  std::vector<ConceptEntry> concepts;
};

/// 200 entities over a 3-level folder tree (4 x 3 x 2 leaves), 500 concepts.
/// About one entity in six sits in a second leaf.
DemoCorpus demo_corpus(std::uint64_t seed = 7);

std::string gazetteer_tsv(std::span<const ConceptEntry> concepts);

/// Entities e000.. each annotated with 1..maxConcepts distinct concepts drawn
/// from a vocabulary of `vocabulary` ids (counts 1..3).
AnnotationTable random_annotations(std::uint64_t seed, int entities, int vocabulary,
                                   int maxConcepts);

/// Entities with 1..3 folder paths in a random tree of the given depth and
/// branching, and concepts drawn from a vocabulary biased by leaf.
std::vector<EntityRecord> random_foldered_corpus(std::uint64_t seed, int entities, int depth,
                                                 int maxBranching, int vocabulary = 60);

/// The records' concept sets as an annotation table (count 1 each).
AnnotationTable table_from_concepts(std::span<const EntityRecord> records);

}  // namespace atlas
