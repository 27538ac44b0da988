#include "kolmac/compressor.hpp"

#include <zlib.h>

#include <stdexcept>
#include <vector>

namespace kolmac {

std::size_t compressed_length(const CompressorProfile& profile, std::string_view data) {
    if (profile.algorithm != "deflate")
        throw std::invalid_argument("unsupported compressor algorithm: " + profile.algorithm);
    if (profile.level < 0 || profile.level > 9)
        throw std::invalid_argument("compression level " + std::to_string(profile.level) +
                                    " outside 0..9");

    // One scratch buffer per thread; similarity builds call this in tight loops.
    thread_local std::vector<unsigned char> buffer;
    uLong bound = compressBound(static_cast<uLong>(data.size()));
    if (buffer.size() < bound) buffer.resize(bound);

    uLongf out_len = static_cast<uLongf>(buffer.size());
    int rc = compress2(buffer.data(), &out_len,
                       reinterpret_cast<const Bytef*>(data.data()),
                       static_cast<uLong>(data.size()), profile.level);
    if (rc != Z_OK)
        throw std::runtime_error("zlib compress2 failed with code " + std::to_string(rc));
    return static_cast<std::size_t>(out_len);
}

}  // namespace kolmac
