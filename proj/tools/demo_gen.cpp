// Writes the demo corpus, gazetteer and build config into a directory.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "atlas/synth.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data/demo";
  std::filesystem::create_directories(dir);
  const auto demo = atlas::demo_corpus();

  std::ofstream(dir / "corpus.jsonl", std::ios::binary) << atlas::serialise_corpus(demo.records);
  std::ofstream(dir / "gazetteer.tsv", std::ios::binary) << atlas::gazetteer_tsv(demo.concepts);
  std::ofstream(dir / "demo.toml", std::ios::binary)
      << "# Paths are relative to the working directory (the repository root).\n"
         "[build]\n"
         "corpus = \"" << (dir / "corpus.jsonl").generic_string() << "\"\n"
         "gazetteer = \"" << (dir / "gazetteer.tsv").generic_string() << "\"\n"
         "mode = \"manual\"\n"
         "threshold = 5\n"
         "padding = 0.08\n"
         "grid-width = 512\n"
         "grid-height = 512\n"
         "bandwidth = 1.5\n"
         "alpha = 0.5\n"
         "beta = 0.5\n"
         "out = \"" << (dir / "demo.kcb").generic_string() << "\"\n"
         "\n[serve]\n"
         "bundle = \"" << (dir / "demo.kcb").generic_string() << "\"\n"
         "port = 8080\n";
  std::cout << "wrote " << demo.records.size() << " entities and " << demo.concepts.size()
            << " concepts to " << dir.string() << '\n';
}
