#pragma once

// Builds the demo corpus into a bundle through temp files, once per process.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "atlas/pipeline.hpp"
#include "atlas/synth.hpp"

namespace fixture {

inline std::filesystem::path temp_dir(const std::string& tag) {
  std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() /
             ("atlas-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline atlas::BuildConfig write_demo(const std::filesystem::path& dir) {
  const auto demo = atlas::demo_corpus();
  std::ofstream(dir / "corpus.jsonl", std::ios::binary) << atlas::serialise_corpus(demo.records);
  std::ofstream(dir / "gazetteer.tsv", std::ios::binary) << atlas::gazetteer_tsv(demo.concepts);
  atlas::BuildConfig c;
  c.corpusPath = (dir / "corpus.jsonl").string();
  c.gazetteerPath = (dir / "gazetteer.tsv").string();
  return c;
}

/// Demo build at a reduced grid size; `grid` = 0 keeps the default.
inline const atlas::GraphBundle& demo_bundle(int grid = 128) {
  static const atlas::GraphBundle bundle = [grid] {
    const auto dir = temp_dir("demo");
    auto c = write_demo(dir);
    if (grid > 0) c.gridWidth = c.gridHeight = grid;
    auto b = atlas::build_bundle(c);
    std::filesystem::remove_all(dir);
    return b;
  }();
  return bundle;
}

}  // namespace fixture
