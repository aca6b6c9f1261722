#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace atlas {

using EntityId = std::string;
using ConceptId = std::string;

/// One corpus document.
struct EntityRecord {
  EntityId id;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;
  std::int64_t year = 0;
  std::optional<std::string> venue;
  std::optional<std::string> doi;
  std::optional<std::string> url;
  /// Slash-delimited topic paths, e.g. "Oncology/Biomarkers/IHC".
  std::vector<std::string> folderPaths;
  std::set<ConceptId> concepts;

  bool operator==(const EntityRecord&) const = default;
};

struct ConceptEntry {
  ConceptId conceptId;
  std::string preferredName;
  std::vector<std::string> synonyms;
  std::string sourceVocab;

  bool operator==(const ConceptEntry&) const = default;
};

/// Entity annotation table: entity -> concept -> occurrence count (>= 1).
struct AnnotationTable {
  std::map<EntityId, std::map<ConceptId, int>> rows;

  bool operator==(const AnnotationTable&) const = default;
};

struct FolderNode {
  std::string label;
  std::string parentPath;  // "" for children of the root
  std::vector<std::string> childPaths;

  bool operator==(const FolderNode&) const = default;
};

/// Union of all folder paths. The root is implicit and has path "".
struct FolderTree {
  std::map<std::string, FolderNode> nodes;
  std::vector<std::string> rootChildren;

  bool operator==(const FolderTree&) const = default;
};

/// Case-folds, turns punctuation into separators and collapses whitespace.
/// Non-ASCII bytes are kept verbatim so UTF-8 terms still match themselves.
std::vector<std::string> normalise_tokens(std::string_view text);
std::string normalise(std::string_view text);

/// Splits a folder path on '/', dropping empty segments and trimming blanks.
/// Returns "" when nothing is left.
std::string clean_folder_path(std::string_view path);

std::vector<EntityRecord> parse_corpus(const std::filesystem::path& path);
std::vector<EntityRecord> parse_corpus_text(std::string_view text);

/// One JSON object per line; parse_corpus_text(serialise_corpus(r)) == r
/// (concepts are not part of the corpus format and are dropped).
std::string serialise_corpus(std::span<const EntityRecord> records);

FolderTree parse_folder_tree(std::span<const EntityRecord> records);

/// Gazetteer with a normalised-phrase index for longest-match lookup.
class Gazetteer {
 public:
  static constexpr std::size_t kMaxPhraseTokens = 6;

  Gazetteer() = default;
  explicit Gazetteer(std::vector<ConceptEntry> entries);

  const std::vector<ConceptEntry>& entries() const noexcept { return entries_; }
  const ConceptEntry* find(const ConceptId& id) const;

  /// Concept for an already-normalised phrase, if any.
  const ConceptId* lookup(const std::string& normalisedPhrase) const;

  /// Distinct normalised surface forms of one entry.
  std::vector<std::string> forms(const ConceptEntry& entry) const;

 private:
  std::vector<ConceptEntry> entries_;
  std::unordered_map<ConceptId, std::size_t> byId_;
  std::unordered_map<std::string, ConceptId> phrases_;
};

/// TSV `conceptId \t preferredName \t syn1|syn2|... \t sourceVocab`.
/// `vocabularies`, when non-empty, keeps only rows whose sourceVocab is listed.
Gazetteer load_gazetteer(const std::filesystem::path& path,
                         const std::vector<std::string>& vocabularies = {});
Gazetteer parse_gazetteer_text(std::string_view text,
                               const std::vector<std::string>& vocabularies = {});

std::map<ConceptId, int> extract_concepts(std::string_view text,
                                          const Gazetteer& gazetteer);

/// Annotates title + " " + abstract of every record and fills record.concepts.
AnnotationTable build_annotation_table(std::span<EntityRecord> records,
                                       const Gazetteer& gazetteer);

struct EatImport {
  AnnotationTable table;
  std::vector<std::string> warnings;
};

/// TSV `entityId \t conceptId \t count`; duplicate pairs are summed. When
/// `corpus` is given, rows for unknown entities are dropped with a warning and
/// corpus entities without rows get an empty row.
EatImport import_eat(const std::filesystem::path& path,
                     const std::vector<EntityRecord>* corpus = nullptr);
EatImport parse_eat_text(std::string_view text,
                         const std::vector<EntityRecord>* corpus = nullptr);

std::string serialise_eat(const AnnotationTable& table);

/// Copies the table's concept keys into each record's concept set.
void apply_annotations(std::span<EntityRecord> records, const AnnotationTable& table);

}  // namespace atlas
