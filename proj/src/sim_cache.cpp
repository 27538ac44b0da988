#include "kolmac/sim_cache.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace kolmac {

namespace {

constexpr char kMagic[8] = {'K', 'S', 'I', 'M', 'C', '1', 0, 0};

void hash_mix(std::uint64_t& h, std::uint64_t v) {
    // FNV-1a over 8-byte words
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xff;
        h *= 1099511628211ULL;
    }
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

struct CacheHeader {
    char magic[8];
    std::uint64_t dataset;
    std::uint32_t axis;
    std::uint32_t measure;
    std::uint64_t order;
    std::uint32_t profile_len;
};

}  // namespace

std::uint64_t dataset_hash(const RatingMatrix& m) {
    std::uint64_t h = 1469598103934665603ULL;
    hash_mix(h, m.n_users());
    hash_mix(h, m.n_items());
    hash_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(m.rating_min())));
    hash_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(m.rating_max())));
    for (std::uint32_t u = 0; u < m.n_users(); ++u)
        for (const Entry& e : m.row(u)) {
            hash_mix(h, (static_cast<std::uint64_t>(u) << 32) | e.index);
            hash_mix(h, static_cast<std::uint64_t>(e.rating));
        }
    return h;
}

std::string similarity_cache_key(std::uint64_t dataset_hash, Axis axis, Measure measure,
                                 const CompressorProfile& profile) {
    return hex64(dataset_hash) + "-" + (axis == Axis::users ? "users" : "items") + "-" +
           measure_name(measure) + "-" + profile.id();
}

std::optional<SimilarityMatrix> load_cached_similarity(const std::string& cache_dir,
                                                       std::uint64_t dataset, Axis axis,
                                                       Measure measure,
                                                       const CompressorProfile& profile) {
    namespace fs = std::filesystem;
    fs::path path = fs::path(cache_dir) /
                    (similarity_cache_key(dataset, axis, measure, profile) + ".simcache");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;

    CacheHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || std::string_view(h.magic, 8) != std::string_view(kMagic, 8)) return std::nullopt;
    if (h.dataset != dataset || h.axis != static_cast<std::uint32_t>(axis) ||
        h.measure != static_cast<std::uint32_t>(measure))
        return std::nullopt;
    if (h.profile_len > 256) return std::nullopt;  // corrupt header
    std::string profile_id(h.profile_len, '\0');
    in.read(profile_id.data(), h.profile_len);
    if (!in || profile_id != profile.id()) return std::nullopt;

    SimilarityMatrix sim(axis, h.order);
    auto packed = sim.packed_mutable();
    in.read(reinterpret_cast<char*>(packed.data()),
            static_cast<std::streamsize>(packed.size() * sizeof(double)));
    if (!in) return std::nullopt;
    return sim;
}

void store_cached_similarity(const std::string& cache_dir, std::uint64_t dataset,
                             const CompressorProfile& profile, Measure measure,
                             const SimilarityMatrix& sim) {
    namespace fs = std::filesystem;
    fs::create_directories(cache_dir);
    fs::path path = fs::path(cache_dir) /
                    (similarity_cache_key(dataset, sim.axis(), measure, profile) + ".simcache");

    CacheHeader h{};
    std::copy(std::begin(kMagic), std::end(kMagic), h.magic);
    h.dataset = dataset;
    h.axis = static_cast<std::uint32_t>(sim.axis());
    h.measure = static_cast<std::uint32_t>(measure);
    h.order = sim.order();
    std::string profile_id = profile.id();
    h.profile_len = static_cast<std::uint32_t>(profile_id.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write similarity cache: " + path.string());
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(profile_id.data(), static_cast<std::streamsize>(profile_id.size()));
    auto packed = sim.packed();
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SimilarityMatrix build_similarity_cached(const RatingMatrix& m, Axis axis, Measure measure,
                                         const CompressorProfile& profile, unsigned workers,
                                         const std::string& cache_dir, SimBuildStats* stats) {
    if (cache_dir.empty()) return build_similarity(m, axis, measure, profile, workers, stats);
    std::uint64_t h = dataset_hash(m);
    if (auto cached = load_cached_similarity(cache_dir, h, axis, measure, profile)) {
        if (stats) *stats = SimBuildStats{};  // served from cache, nothing compressed
        return *std::move(cached);
    }
    SimilarityMatrix sim = build_similarity(m, axis, measure, profile, workers, stats);
    store_cached_similarity(cache_dir, h, profile, measure, sim);
    return sim;
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim,
                          const std::vector<std::int64_t>* ids) {
    const std::size_t n = sim.order();
    for (std::size_t j = 0; j < n; ++j) {
        out << (j ? "," : "");
        out << (ids ? (*ids)[j] : static_cast<std::int64_t>(j));
    }
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ',';
            out << sim.at(i, j);
        }
        out << '\n';
    }
}

}  // namespace kolmac
