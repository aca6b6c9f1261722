#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atlas {

enum class Errc {
  MalformedRecord,
  DuplicateId,
  MalformedRow,
  DuplicateConceptId,
  NonPositiveCount,
  EmptyCorpus,
  UnknownTopic,
  EmptyMatrix,
  InvalidPyramid,
  MissingLevel,
  EmptyInput,
  MalformedFragment,
  OutOfRange,
  IoError,
  VersionMismatch,
  CorruptBundle,
  ConfigError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library. `module()` names the pipeline stage
/// that produced it so the CLI can print module-tagged messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, const std::string& what)
      : std::runtime_error(what), code_(code), module_(std::move(module)) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  std::string module_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateConceptId: return "DuplicateConceptId";
    case Errc::NonPositiveCount: return "NonPositiveCount";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::UnknownTopic: return "UnknownTopic";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::InvalidPyramid: return "InvalidPyramid";
    case Errc::MissingLevel: return "MissingLevel";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MalformedFragment: return "MalformedFragment";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::IoError: return "IoError";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptBundle: return "CorruptBundle";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace atlas
