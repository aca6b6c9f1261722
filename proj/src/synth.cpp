#include "atlas/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "text_util.hpp"

namespace atlas {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename T>
const T& choose(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

std::string id_of(const char* prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
  return buf;
}

constexpr std::array<const char*, 20> kOnsets = {"ka", "lo", "mi", "ne", "pu", "ra", "si", "to", "vu", "ze",
                                                 "bra", "cle", "dro", "fli", "gra", "ple", "sto", "tri", "vo", "xa"};
constexpr std::array<const char*, 25> kCodas = {"lin", "mor", "tase", "zene", "dol", "phan", "rix", "tor", "vane",
                                                "cyte", "gen", "mab", "nib", "sol", "tide", "ose", "ine", "ane",
                                                "ase", "ium", "oid", "ran", "sin", "tal", "xin"};

std::string concept_word(int i) {
  return std::string(kOnsets[static_cast<std::size_t>(i) % kOnsets.size()]) +
         kCodas[static_cast<std::size_t>(i) / kOnsets.size() % kCodas.size()];
}

const std::vector<std::string> kTopLabels = {"Oncology", "Neurology", "Cardiology", "Immunology"};
const std::vector<std::string> kMidLabels = {"Biomarkers", "Imaging", "Therapeutics"};
const std::vector<std::string> kLeafLabels = {"Clinical", "Preclinical"};
const std::vector<std::string> kFiller = {"of", "in", "and", "with", "for", "via", "under", "across"};
const std::vector<std::string> kSurnames = {"Abe", "Berg", "Costa", "Dahl", "Evans", "Fischer", "Garcia",
                                            "Huang", "Ito", "Jensen", "Kowalski", "Lopez", "Meyer",
                                            "Novak", "Okafor", "Patel", "Quinn", "Rossi", "Sato", "Weber"};
const std::vector<std::string> kVenues = {"J Transl Med", "Nat Methods", "Bioinformatics", "Lancet",
                                          "PLoS Comput Biol", "Sci Rep"};

std::string sentence(std::mt19937_64& rng, const std::vector<std::string>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " " + choose(rng, kFiller) + " ";
    out += terms[i];
  }
  return out;
}

}  // namespace

DemoCorpus demo_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DemoCorpus out;

  constexpr int kConcepts = 500;
  for (int i = 0; i < kConcepts; ++i) {
    ConceptEntry c;
    c.conceptId = id_of("C", i, 4);
    c.preferredName = concept_word(i);
    if (i % 5 == 0) c.synonyms.push_back(c.preferredName + " factor");
    if (i % 7 == 0) c.synonyms.push_back(c.preferredName + "-like protein");
    c.sourceVocab = i % 3 == 0 ? "MSH" : "SNOMED";
    out.concepts.push_back(std::move(c));
  }

  std::vector<std::string> leaves;
  for (const auto& top : kTopLabels)
    for (const auto& mid : kMidLabels)
      for (const auto& leaf : kLeafLabels) leaves.push_back(top + "/" + mid + "/" + leaf);

  // Each leaf owns a contiguous block of concepts; the tail is shared by all.
  const int perLeaf = 18;
  const int shared = kConcepts - perLeaf * static_cast<int>(leaves.size());
  auto leaf_concept = [&](std::size_t leaf) {
    return static_cast<int>(leaf) * perLeaf + static_cast<int>(pick(rng, perLeaf));
  };

  constexpr int kEntities = 200;
  for (int e = 0; e < kEntities; ++e) {
    EntityRecord r;
    r.id = id_of("P", e, 3);
    const std::size_t leaf = static_cast<std::size_t>(e) % leaves.size();
    r.folderPaths.push_back(leaves[leaf]);
    if (pick(rng, 6) == 0) {
      std::size_t other = pick(rng, leaves.size());
      if (other == leaf) other = (other + 1) % leaves.size();
      r.folderPaths.push_back(leaves[other]);
    }

    std::set<int> picked;
    while (picked.size() < 9) picked.insert(leaf_concept(leaf));
    // Neighbouring leaf under the same parent folder.
    picked.insert(leaf_concept(leaf ^ 1));
    if (r.folderPaths.size() > 1) {
      const std::size_t other = static_cast<std::size_t>(
          std::find(leaves.begin(), leaves.end(), r.folderPaths[1]) - leaves.begin());
      for (int k = 0; k < 4; ++k) picked.insert(leaf_concept(other));
    }
    for (int k = 0; k < 2; ++k)
      picked.insert(kConcepts - shared + static_cast<int>(pick(rng, static_cast<std::size_t>(shared))));

    std::vector<std::string> terms;
    for (int c : picked) {
      const auto& entry = out.concepts[static_cast<std::size_t>(c)];
      terms.push_back(entry.synonyms.empty() || pick(rng, 2) ? entry.preferredName
                                                             : entry.synonyms.front());
    }
    std::vector<std::string> shuffled = terms;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[pick(rng, i)]);

    const std::vector<std::string> titleTerms(shuffled.begin(), shuffled.begin() + 3);
    r.title = sentence(rng, titleTerms);
    r.title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(r.title[0])));
    r.abstract = "We study " + sentence(rng, std::vector<std::string>(shuffled.begin() + 3, shuffled.end())) +
                 ". Results are reported for the " + r.folderPaths[0] + " cohort.";
    const std::size_t nAuthors = 1 + pick(rng, 4);
    for (std::size_t a = 0; a < nAuthors; ++a)
      r.authors.push_back(choose(rng, kSurnames) + " " + static_cast<char>('A' + pick(rng, 26)));
    r.year = 2000 + static_cast<std::int64_t>(pick(rng, 25));
    r.venue = choose(rng, kVenues);
    r.doi = "10.5555/demo." + r.id;
    r.url = "https://example.org/papers/" + r.id;
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string gazetteer_tsv(std::span<const ConceptEntry> concepts) {
  std::string out = "# conceptId\tpreferredName\tsynonyms\tsourceVocab\n";
  for (const auto& c : concepts)
    out += c.conceptId + '\t' + c.preferredName + '\t' + detail::join(c.synonyms, "|") + '\t' +
           c.sourceVocab + '\n';
  return out;
}

AnnotationTable random_annotations(std::uint64_t seed, int entities, int vocabulary, int maxConcepts) {
  std::mt19937_64 rng(seed);
  AnnotationTable t;
  for (int e = 0; e < entities; ++e) {
    auto& row = t.rows[id_of("e", e, 3)];
    const auto n = 1 + pick(rng, static_cast<std::size_t>(maxConcepts));
    while (row.size() < std::min<std::size_t>(n, static_cast<std::size_t>(vocabulary)))
      row[id_of("c", static_cast<int>(pick(rng, static_cast<std::size_t>(vocabulary))), 3)] =
          1 + static_cast<int>(pick(rng, 3));
  }
  return t;
}

std::vector<EntityRecord> random_foldered_corpus(std::uint64_t seed, int entities, int depth,
                                                 int maxBranching, int vocabulary) {
  std::mt19937_64 rng(seed);
  // Random tree; paths of every node, leaves deeper than 0 collected.
  std::vector<std::string> nodes;
  std::vector<std::string> frontier = {""};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::string> next;
    for (const auto& parent : frontier) {
      const auto fan = 1 + pick(rng, static_cast<std::size_t>(maxBranching));
      for (std::size_t k = 0; k < fan; ++k) {
        const auto path = (parent.empty() ? "" : parent + "/") + "t" + std::to_string(k);
        nodes.push_back(path);
        // Some branches stop early, giving uneven depth.
        if (d + 1 < depth && pick(rng, 5) == 0) continue;
        next.push_back(path);
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }

  std::vector<EntityRecord> out;
  for (int e = 0; e < entities; ++e) {
    EntityRecord r;
    r.id = id_of("e", e, 3);
    r.title = "entity " + std::to_string(e);
    const auto paths = 1 + pick(rng, 3);
    for (std::size_t k = 0; k < paths; ++k) {
      const auto& p = choose(rng, nodes);
      if (std::find(r.folderPaths.begin(), r.folderPaths.end(), p) == r.folderPaths.end())
        r.folderPaths.push_back(p);
    }
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char ch : r.folderPaths.front()) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
    const auto bias = static_cast<int>(h % 7);
    const auto n = 3 + pick(rng, 8);
    while (r.concepts.size() < n) {
      const int c = pick(rng, 2) ? (bias * 5 + static_cast<int>(pick(rng, 10))) % vocabulary
                                 : static_cast<int>(pick(rng, static_cast<std::size_t>(vocabulary)));
      r.concepts.insert(id_of("c", c, 3));
    }
    out.push_back(std::move(r));
  }
  return out;
}

AnnotationTable table_from_concepts(std::span<const EntityRecord> records) {
  AnnotationTable t;
  for (const auto& r : records) {
    auto& row = t.rows[r.id];
    for (const auto& c : r.concepts) row[c] = 1;
  }
  return t;
}

}  // namespace atlas
