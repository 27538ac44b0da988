#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kolmac/compressor.hpp"
#include "kolmac/rating_matrix.hpp"

namespace kolmac {

enum class Measure { ks, cs };

const char* measure_name(Measure m);

/// Symmetric dense matrix of similarity scores in [0, 1] with unit diagonal,
/// indexed over users or items. Stored as the packed upper triangle, so
/// symmetry is structural. Immutable once built.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(Axis axis, std::size_t order)
        : axis_(axis), order_(order), tri_(order * (order + 1) / 2, 0.0) {}

    Axis axis() const { return axis_; }
    std::size_t order() const { return order_; }

    double at(std::size_t i, std::size_t j) const { return tri_[offset(i, j)]; }
    void set(std::size_t i, std::size_t j, double value) { tri_[offset(i, j)] = value; }

    /// Packed triangle, row by row; exposed for caching and bit-level checks.
    std::span<const double> packed() const { return tri_; }
    std::span<double> packed_mutable() { return tri_; }

private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        // row i of the upper triangle starts after i*order - i*(i-1)/2 entries
        return i * order_ - i * (i - 1) / 2 + (j - i);
    }

    Axis axis_ = Axis::users;
    std::size_t order_ = 0;
    std::vector<double> tri_;
};

/// Compression similarity: 1 minus the normalized gap between the compressed
/// pair and the smaller single compression, clamped to [0, 1]. Real
/// compressors are order-sensitive, so the pair length is the mean of both
/// concatenation orders, which makes the score exactly symmetric. Two empty
/// strings compare as 1.
double compression_similarity(const CompressorProfile& profile, std::string_view x,
                              std::string_view y);

/// Kolmogorov similarity: (1 + |C(x) - C(y)|)^-1. Needs only the two
/// per-entity lengths; always in (0, 1].
double kolmogorov_similarity(const CompressorProfile& profile, std::string_view x,
                             std::string_view y);

/// Formula cores shared by the scalar measures and the matrix builds.
double compression_similarity_from_lengths(double len_x, double len_y, double len_pair);
double kolmogorov_similarity_from_lengths(double len_x, double len_y);

struct SimBuildStats {
    std::size_t entity_compressions = 0;  // one per user/item
    std::size_t pair_compressions = 0;    // CS only: one per unordered pair (both orders)
    double elapsed_ms = 0;
};

/// Builds the user/user or item/item similarity matrix. Per-entity lengths
/// are compressed once up front; CS additionally compresses each unordered
/// pair's concatenation in both orders. The diagonal is forced to 1. The
/// result is bitwise identical for any worker count.
SimilarityMatrix build_similarity(const RatingMatrix& m, Axis axis, Measure measure,
                                  const CompressorProfile& profile, unsigned workers = 1,
                                  SimBuildStats* stats = nullptr);

}  // namespace kolmac
