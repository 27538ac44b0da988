#include "kolmac/similarity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kolmac/description.hpp"
#include "kolmac/parallel.hpp"

namespace kolmac {

const char* measure_name(Measure m) { return m == Measure::ks ? "ks" : "cs"; }

double compression_similarity_from_lengths(double len_x, double len_y, double len_pair) {
    double lo = std::min(len_x, len_y);
    double hi = std::max(len_x, len_y);
    double score = 1.0 - (len_pair - lo) / hi;
    return std::clamp(score, 0.0, 1.0);
}

double kolmogorov_similarity_from_lengths(double len_x, double len_y) {
    return 1.0 / (1.0 + std::abs(len_x - len_y));
}

double compression_similarity(const CompressorProfile& profile, std::string_view x,
                              std::string_view y) {
    if (x.empty() && y.empty()) return 1.0;
    double len_x = static_cast<double>(compressed_length(profile, x));
    double len_y = static_cast<double>(compressed_length(profile, y));
    std::string xy;
    xy.reserve(x.size() + y.size());
    xy.append(x).append(y);
    double len_xy = static_cast<double>(compressed_length(profile, xy));
    xy.clear();
    xy.append(y).append(x);
    double len_yx = static_cast<double>(compressed_length(profile, xy));
    return compression_similarity_from_lengths(len_x, len_y, 0.5 * (len_xy + len_yx));
}

double kolmogorov_similarity(const CompressorProfile& profile, std::string_view x,
                             std::string_view y) {
    return kolmogorov_similarity_from_lengths(
        static_cast<double>(compressed_length(profile, x)),
        static_cast<double>(compressed_length(profile, y)));
}

SimilarityMatrix build_similarity(const RatingMatrix& m, Axis axis, Measure measure,
                                  const CompressorProfile& profile, unsigned workers,
                                  SimBuildStats* stats) {
    auto start = std::chrono::steady_clock::now();
    const std::size_t order = axis == Axis::users ? m.n_users() : m.n_items();
    SimilarityMatrix sim(axis, order);

    // Precompute every description and its compressed length once.
    std::vector<std::string> descriptions(order);
    std::vector<double> lengths(order);
    parallel_for(0, order, workers, [&](std::size_t i) {
        descriptions[i] = encode_entity(m, axis, i);
        lengths[i] = static_cast<double>(compressed_length(profile, descriptions[i]));
    });

    std::atomic<std::size_t> pair_count{0};
    // Row i of the triangle covers pairs (i, j > i); rows are farmed to
    // workers and every cell is written exactly once.
    parallel_for(0, order, workers, [&](std::size_t i) {
        sim.set(i, i, 1.0);
        if (measure == Measure::ks) {
            for (std::size_t j = i + 1; j < order; ++j)
                sim.set(i, j, kolmogorov_similarity_from_lengths(lengths[i], lengths[j]));
            return;
        }
        std::string buf;
        std::size_t pairs = 0;
        for (std::size_t j = i + 1; j < order; ++j) {
            const std::string& x = descriptions[i];
            const std::string& y = descriptions[j];
            if (x.empty() && y.empty()) {
                sim.set(i, j, 1.0);
                continue;
            }
            buf.clear();
            buf.reserve(x.size() + y.size());
            buf.append(x).append(y);
            double len_xy = static_cast<double>(compressed_length(profile, buf));
            buf.clear();
            buf.append(y).append(x);
            double len_yx = static_cast<double>(compressed_length(profile, buf));
            sim.set(i, j, compression_similarity_from_lengths(lengths[i], lengths[j],
                                                              0.5 * (len_xy + len_yx)));
            ++pairs;
        }
        pair_count.fetch_add(pairs, std::memory_order_relaxed);
    }, /*chunk=*/1);

    if (stats) {
        stats->entity_compressions = order;
        stats->pair_compressions = pair_count.load();
        stats->elapsed_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    }
    return sim;
}

}  // namespace kolmac
