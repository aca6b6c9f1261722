#pragma once

#include <string>
#include <string_view>

namespace atlas {

/// Gzip container with a zeroed timestamp, so equal input gives equal bytes.
std::string gzip_compress(std::string_view data, int level = 9);

/// Throws Error(CorruptBundle) on malformed or truncated input.
std::string gzip_decompress(std::string_view data);

}  // namespace atlas
