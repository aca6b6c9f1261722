#include "atlas/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "atlas/error.hpp"
#include "text_util.hpp"

namespace atlas {

namespace {

constexpr const char* kModule = "ingestion";

[[noreturn]] void fail(Errc code, const std::string& what) {
  throw Error(code, kModule, what);
}

bool is_separator(unsigned char c) {
  if (c >= 0x80) return false;
  return !std::isalnum(c);
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    fail(Errc::MalformedRecord, "line " + std::to_string(line) + ": field '" + key +
                                    "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& obj, const char* key,
                                     std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array())
    fail(Errc::MalformedRecord,
         "line " + std::to_string(line) + ": field '" + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string())
      fail(Errc::MalformedRecord, "line " + std::to_string(line) + ": field '" + key +
                                      "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<std::string> normalise_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string normalise(std::string_view text) {
  return detail::join(normalise_tokens(text), " ");
}

std::string clean_folder_path(std::string_view path) {
  std::vector<std::string> segments;
  for (auto& seg : detail::split(path, '/')) {
    auto trimmed = detail::trim(seg);
    if (!trimmed.empty()) segments.emplace_back(trimmed);
  }
  return detail::join(segments, "/");
}

std::vector<EntityRecord> parse_corpus_text(std::string_view text) {
  std::vector<EntityRecord> records;
  std::set<EntityId> seen;
  std::size_t lineNo = 0;
  for (auto& line : detail::split(text, '\n')) {
    ++lineNo;
    if (detail::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::MalformedRecord, "line " + std::to_string(lineNo) + ": " + e.what());
    }
    if (!obj.is_object())
      fail(Errc::MalformedRecord, "line " + std::to_string(lineNo) + ": not an object");
    auto id = optional_string(obj, "id", lineNo);
    if (!id || id->empty())
      fail(Errc::MalformedRecord, "line " + std::to_string(lineNo) + ": missing id");

    EntityRecord rec;
    rec.id = *id;
    rec.title = optional_string(obj, "title", lineNo).value_or("");
    rec.abstract = optional_string(obj, "abstract", lineNo).value_or("");
    rec.authors = string_list(obj, "authors", lineNo);
    if (auto it = obj.find("year"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
        fail(Errc::MalformedRecord,
             "line " + std::to_string(lineNo) + ": year must be a non-negative integer");
      rec.year = it->get<std::int64_t>();
    }
    rec.venue = optional_string(obj, "venue", lineNo);
    rec.doi = optional_string(obj, "doi", lineNo);
    rec.url = optional_string(obj, "url", lineNo);
    for (auto& folder : string_list(obj, "folders", lineNo)) {
      auto cleaned = clean_folder_path(folder);
      if (!cleaned.empty() &&
          std::find(rec.folderPaths.begin(), rec.folderPaths.end(), cleaned) ==
              rec.folderPaths.end())
        rec.folderPaths.push_back(std::move(cleaned));
    }
    if (!seen.insert(rec.id).second) fail(Errc::DuplicateId, rec.id);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<EntityRecord> parse_corpus(const std::filesystem::path& path) {
  return parse_corpus_text(detail::read_file(path, kModule));
}

std::string serialise_corpus(std::span<const EntityRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json obj;
    obj["id"] = r.id;
    obj["title"] = r.title;
    obj["abstract"] = r.abstract;
    obj["authors"] = r.authors;
    obj["year"] = r.year;
    if (r.venue) obj["venue"] = *r.venue;
    if (r.doi) obj["doi"] = *r.doi;
    if (r.url) obj["url"] = *r.url;
    obj["folders"] = r.folderPaths;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

FolderTree parse_folder_tree(std::span<const EntityRecord> records) {
  FolderTree tree;
  for (const auto& rec : records) {
    for (const auto& path : rec.folderPaths) {
      std::string parent;
      std::string current;
      for (auto& seg : detail::split(path, '/')) {
        if (seg.empty()) continue;
        current = parent.empty() ? std::string(seg) : parent + "/" + std::string(seg);
        auto [it, inserted] = tree.nodes.try_emplace(current);
        if (inserted) {
          it->second.label = std::string(seg);
          it->second.parentPath = parent;
          auto& siblings =
              parent.empty() ? tree.rootChildren : tree.nodes.at(parent).childPaths;
          siblings.insert(std::upper_bound(siblings.begin(), siblings.end(), current),
                          current);
        }
        parent = current;
      }
    }
  }
  return tree;
}

Gazetteer::Gazetteer(std::vector<ConceptEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!byId_.emplace(entries_[i].conceptId, i).second)
      fail(Errc::DuplicateConceptId, entries_[i].conceptId);
  }
  for (const auto& entry : entries_) {
    for (auto& form : forms(entry)) {
      // A surface form claimed by several concepts resolves to the smallest id,
      // so the index does not depend on row order.
      auto [it, inserted] = phrases_.emplace(form, entry.conceptId);
      if (!inserted && entry.conceptId < it->second) it->second = entry.conceptId;
    }
  }
}

const ConceptEntry* Gazetteer::find(const ConceptId& id) const {
  auto it = byId_.find(id);
  return it == byId_.end() ? nullptr : &entries_[it->second];
}

const ConceptId* Gazetteer::lookup(const std::string& normalisedPhrase) const {
  auto it = phrases_.find(normalisedPhrase);
  return it == phrases_.end() ? nullptr : &it->second;
}

std::vector<std::string> Gazetteer::forms(const ConceptEntry& entry) const {
  std::vector<std::string> out;
  auto add = [&](const std::string& surface) {
    auto tokens = normalise_tokens(surface);
    if (tokens.empty() || tokens.size() > kMaxPhraseTokens) return;
    auto form = detail::join(tokens, " ");
    if (std::find(out.begin(), out.end(), form) == out.end()) out.push_back(form);
  };
  add(entry.preferredName);
  for (const auto& s : entry.synonyms) add(s);
  return out;
}

Gazetteer parse_gazetteer_text(std::string_view text,
                               const std::vector<std::string>& vocabularies) {
  std::vector<ConceptEntry> entries;
  std::set<ConceptId> ids;
  std::size_t lineNo = 0;
  for (auto& raw : detail::split(text, '\n')) {
    ++lineNo;
    auto line = detail::strip_cr(raw);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4)
      fail(Errc::MalformedRow, "gazetteer line " + std::to_string(lineNo) +
                                   ": expected 3 or 4 tab-separated columns");
    ConceptEntry entry;
    entry.conceptId = std::string(detail::trim(cols[0]));
    entry.preferredName = std::string(detail::trim(cols[1]));
    if (entry.conceptId.empty() || normalise(entry.preferredName).empty())
      fail(Errc::MalformedRow, "gazetteer line " + std::to_string(lineNo) +
                                   ": empty concept id or preferred name");
    for (auto& syn : detail::split(cols[2], '|')) {
      auto trimmed = std::string(detail::trim(syn));
      if (trimmed.empty()) continue;
      if (normalise(trimmed).empty())
        fail(Errc::MalformedRow, "gazetteer line " + std::to_string(lineNo) +
                                     ": synonym '" + trimmed + "' is empty after normalisation");
      entry.synonyms.push_back(std::move(trimmed));
    }
    if (cols.size() == 4) entry.sourceVocab = std::string(detail::trim(cols[3]));
    if (!ids.insert(entry.conceptId).second) fail(Errc::DuplicateConceptId, entry.conceptId);
    if (!vocabularies.empty() &&
        std::find(vocabularies.begin(), vocabularies.end(), entry.sourceVocab) ==
            vocabularies.end())
      continue;
    entries.push_back(std::move(entry));
  }
  return Gazetteer(std::move(entries));
}

Gazetteer load_gazetteer(const std::filesystem::path& path,
                         const std::vector<std::string>& vocabularies) {
  return parse_gazetteer_text(detail::read_file(path, kModule), vocabularies);
}

std::map<ConceptId, int> extract_concepts(std::string_view text, const Gazetteer& gazetteer) {
  std::map<ConceptId, int> counts;
  const auto tokens = normalise_tokens(text);
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const std::size_t longest = std::min(Gazetteer::kMaxPhraseTokens, tokens.size() - pos);
    std::size_t matched = 0;
    std::string phrase;
    for (std::size_t len = longest; len >= 1; --len) {
      phrase = tokens[pos];
      for (std::size_t k = 1; k < len; ++k) phrase += ' ' + tokens[pos + k];
      if (const auto* id = gazetteer.lookup(phrase)) {
        ++counts[*id];
        matched = len;
        break;
      }
    }
    pos += matched ? matched : 1;
  }
  return counts;
}

AnnotationTable build_annotation_table(std::span<EntityRecord> records,
                                       const Gazetteer& gazetteer) {
  AnnotationTable table;
  for (auto& rec : records) {
    auto counts = extract_concepts(rec.title + " " + rec.abstract, gazetteer);
    rec.concepts.clear();
    for (const auto& [id, n] : counts) rec.concepts.insert(id);
    table.rows[rec.id] = std::move(counts);
  }
  return table;
}

EatImport parse_eat_text(std::string_view text, const std::vector<EntityRecord>* corpus) {
  EatImport result;
  std::set<EntityId> known;
  if (corpus)
    for (const auto& r : *corpus) known.insert(r.id);
  std::set<EntityId> warned;
  std::size_t lineNo = 0;
  for (auto& raw : detail::split(text, '\n')) {
    ++lineNo;
    auto line = detail::strip_cr(raw);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3)
      fail(Errc::MalformedRow,
           "EAT line " + std::to_string(lineNo) + ": expected 3 tab-separated columns");
    auto entity = std::string(detail::trim(cols[0]));
    auto concept_id = std::string(detail::trim(cols[1]));
    auto countText = detail::trim(cols[2]);
    long long count = 0;
    auto [end, ec] = std::from_chars(countText.data(), countText.data() + countText.size(), count);
    if (entity.empty() || concept_id.empty() || ec != std::errc() ||
        end != countText.data() + countText.size())
      fail(Errc::MalformedRow, "EAT line " + std::to_string(lineNo) + ": bad row");
    if (count <= 0)
      fail(Errc::NonPositiveCount, "EAT line " + std::to_string(lineNo) + ": count " +
                                       std::string(countText));
    if (corpus && !known.count(entity)) {
      if (warned.insert(entity).second)
        result.warnings.push_back("unknown entity '" + entity + "' in EAT (line " +
                                  std::to_string(lineNo) + "), rows skipped");
      continue;
    }
    result.table.rows[entity][concept_id] += static_cast<int>(count);
  }
  if (corpus)
    for (const auto& r : *corpus) result.table.rows.try_emplace(r.id);
  return result;
}

EatImport import_eat(const std::filesystem::path& path,
                     const std::vector<EntityRecord>* corpus) {
  return parse_eat_text(detail::read_file(path, kModule), corpus);
}

std::string serialise_eat(const AnnotationTable& table) {
  std::string out;
  for (const auto& [entity, counts] : table.rows)
    for (const auto& [concept_id, n] : counts)
      out += entity + '\t' + concept_id + '\t' + std::to_string(n) + '\n';
  return out;
}

void apply_annotations(std::span<EntityRecord> records, const AnnotationTable& table) {
  for (auto& rec : records) {
    rec.concepts.clear();
    if (auto it = table.rows.find(rec.id); it != table.rows.end())
      for (const auto& [id, n] : it->second) rec.concepts.insert(id);
  }
}

}  // namespace atlas
