#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace kolmac {

/// Which compressor approximates description complexity, and how hard it
/// tries. The default is the zlib stream format (DEFLATE, RFC 1950) at its
/// highest level; the measured length includes the stream header and trailer.
struct CompressorProfile {
    std::string algorithm = "deflate";
    int level = 9;

    /// Stable id used in cache keys and report echoes, e.g. "deflate-9".
    std::string id() const { return algorithm + "-" + std::to_string(level); }

    bool operator==(const CompressorProfile&) const = default;
};

/// Length in bytes of the full compressed stream for `data`. Deterministic
/// for a fixed profile. Throws on unknown algorithms, levels outside 0..9,
/// and compressor backend failures.
std::size_t compressed_length(const CompressorProfile& profile, std::string_view data);

}  // namespace kolmac
