#include "atlas/pipeline.hpp"

#include <ostream>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr const char* kModule = "cli";

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

}  // namespace

GraphBundle build_bundle(const BuildConfig& config, std::ostream* log) {
  if (config.corpusPath.empty()) throw Error(Errc::ConfigError, kModule, "corpus path is required");
  if (config.gazetteerPath.empty() == config.eatPath.empty())
    throw Error(Errc::ConfigError, kModule, "exactly one of gazetteer or eat must be given");

  GraphBundle b;
  b.config = config;
  b.corpus = parse_corpus(config.corpusPath);

  if (!config.gazetteerPath.empty()) {
    const auto gaz = load_gazetteer(config.gazetteerPath, config.vocabularies);
    b.eat = build_annotation_table(b.corpus, gaz);
    for (const auto& [entity, row] : b.eat.rows)
      for (const auto& [concept_, count] : row) b.conceptNames[concept_] = gaz.find(concept_)->preferredName;
  } else {
    auto imported = import_eat(config.eatPath, &b.corpus);
    for (const auto& w : imported.warnings) say(log, "warning: " + w);
    b.eat = std::move(imported.table);
    apply_annotations(b.corpus, b.eat);
    for (const auto& [entity, row] : b.eat.rows)
      for (const auto& [concept_, count] : row) b.conceptNames[concept_] = concept_;
  }

  b.ceg = build_ceg(b.eat, config.threshold);
  const auto before = component_count(b.ceg);
  b.ceg = ensure_connected(std::move(b.ceg), b.eat, b.corpus);

  if (config.thgMode == ThgMode::manual) {
    for (const auto& r : b.corpus)
      if (r.folderPaths.empty())
        throw Error(Errc::ConfigError, kModule, "manual mode needs folder paths; entity " + r.id + " has none");
    b.thg = build_mthg(parse_folder_tree(b.corpus));
    b.assignment = backpropagate(direct_topics_from_folders(b.corpus), b.thg);
  } else {
    if (config.pyramid.empty()) {
      b.config.pyramid = kDefaultPyramid;
      say(log, "pyramid not set; using default 10,25,60,120,200");
    }
    auto matrix = DocConceptMatrix::from_table(b.eat);
    for (std::size_t c = 0; c < matrix.concepts.size(); ++c)
      matrix.conceptLabels[c] = b.conceptNames.at(matrix.concepts[c]);
    auto data = build_dthg(matrix, b.config.pyramid);
    b.thg = std::move(data.thg);
    b.assignment = std::move(data.assignment);
  }

  b.tog = build_tog(b.ceg, b.assignment, b.thg, b.eat);
  b.layout = layout_hierarchy(b.thg, b.tog, {config.padding, config.entityRadius, config.seed});
  b.elevation = elevation_grid(b.layout, b.thg, b.tog,
                               {config.gridWidth, config.gridHeight, config.bandwidth, config.alpha, config.beta});
  b.contours = extract_contours(b.elevation.values, std::span<const double>(config.isoLevels));
  validate_bundle(b);

  std::size_t synthetic = 0;
  for (const auto& e : b.ceg.edges) synthetic += e.synthetic;
  say(log, "entities: " + std::to_string(b.corpus.size()));
  say(log, "concepts: " + std::to_string(b.conceptNames.size()));
  say(log, "ceg edges: " + std::to_string(b.ceg.edges.size()) + " (" + std::to_string(synthetic) +
               " added to join " + std::to_string(before) + " components)");
  say(log, "topics: " + std::to_string(b.thg.size() - 1) + " over " + std::to_string(b.thg.max_depth()) +
               " levels");
  for (const auto& [level, instances] : b.tog.instances)
    say(log, "level " + std::to_string(level) + ": " + std::to_string(instances.size()) + " instances, " +
                 std::to_string(b.tog.edges[level].size()) + " edges");
  return b;
}

}  // namespace atlas
