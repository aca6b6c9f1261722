#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atlas/thg.hpp"
#include "atlas/topography.hpp"

namespace atlas {

enum class ThgMode { manual, data };

/// Everything that determines a build. Stored inside the bundle.
struct BuildConfig {
  std::string corpusPath;
  std::string gazetteerPath;  // exactly one of gazetteerPath / eatPath
  std::string eatPath;
  std::vector<std::string> vocabularies;
  ThgMode thgMode = ThgMode::manual;
  int threshold = 5;
  std::vector<int> pyramid = kDefaultPyramid;
  double padding = 0.08;
  double entityRadius = 1.0;
  int gridWidth = 512;
  int gridHeight = 512;
  double bandwidth = 1.5;
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<double> isoLevels = default_iso_levels();
  std::uint64_t seed = 0x5eed;

  bool operator==(const BuildConfig&) const = default;
};

}  // namespace atlas
