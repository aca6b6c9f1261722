#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "atlas/ceg.hpp"
#include "atlas/config.hpp"
#include "atlas/layout.hpp"
#include "atlas/thg.hpp"
#include "atlas/tog.hpp"
#include "atlas/topography.hpp"

namespace atlas {

inline constexpr int kBundleFormatVersion = 1;

/// The complete build artefact.
struct GraphBundle {
  int formatVersion = kBundleFormatVersion;
  std::vector<EntityRecord> corpus;
  std::map<ConceptId, std::string> conceptNames;
  AnnotationTable eat;
  CoreGraph ceg;
  TopicHierarchy thg;
  TopicAssignment assignment;
  OccupancyGraph tog;
  LayoutTree layout;
  ElevationGrid elevation;
  ContourSet contours;
  ColorScale colorScale = default_color_scale();
  BuildConfig config;

  bool operator==(const GraphBundle&) const = default;
};

/// Bundle as canonical JSON text (sorted keys, shortest round-trip doubles).
std::string bundle_to_json(const GraphBundle& bundle);
GraphBundle bundle_from_json(std::string_view json);

/// Gzip-wrapped JSON; the same bundle always produces the same bytes.
std::string encode_bundle(const GraphBundle& bundle);
GraphBundle decode_bundle(std::string_view bytes);

void save_bundle(const GraphBundle& bundle, const std::filesystem::path& path);
GraphBundle load_bundle(const std::filesystem::path& path);

/// Throws CorruptBundle on the first dangling reference or broken invariant.
void validate_bundle(const GraphBundle& bundle);

/// Cypher MERGE statements, one per line after a comment header: nodes for
/// entities, topics and instances, then relationships for similarity,
/// hierarchy, annotation and instance edges.
std::string graphdb_script(const GraphBundle& bundle);
void export_graphdb_script(const GraphBundle& bundle, const std::filesystem::path& path);

struct ScriptTally {
  std::size_t nodes = 0;
  std::size_t relationships = 0;
};

/// Closed-form statement counts for graphdb_script.
ScriptTally graphdb_tally(const GraphBundle& bundle);

}  // namespace atlas
