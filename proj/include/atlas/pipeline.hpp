#pragma once

#include <iosfwd>

#include "atlas/store.hpp"

namespace atlas {

/// ingestion -> ceg -> thg -> tog -> layout -> topography. Paths in the config
/// are used as given. Summary lines go to `log` when it is non-null.
GraphBundle build_bundle(const BuildConfig& config, std::ostream* log = nullptr);

}  // namespace atlas
