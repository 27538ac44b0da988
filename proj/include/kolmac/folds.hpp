#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "kolmac/rating_matrix.hpp"

namespace kolmac {

/// Partition of the observed entries of one matrix into k disjoint test folds.
/// Fold ids run from 1 to k.
struct FoldAssignment {
    int k = 0;
    std::unordered_map<std::uint64_t, int> assignment;

    static std::uint64_t key(std::uint32_t user, std::uint32_t item) {
        return (static_cast<std::uint64_t>(user) << 32) | item;
    }

    /// Fold id of an observed entry, or 0 when the pair is not assigned.
    int fold_of(std::uint32_t user, std::uint32_t item) const {
        auto it = assignment.find(key(user, item));
        return it == assignment.end() ? 0 : it->second;
    }

    std::size_t fold_size(int fold) const {
        std::size_t n = 0;
        for (const auto& [_, f] : assignment)
            if (f == fold) ++n;
        return n;
    }
};

/// Uniform random partition of the observed entries into k folds,
/// deterministic for a fixed seed. Fold sizes differ by at most one.
FoldAssignment split_folds(const RatingMatrix& m, int k, std::uint64_t seed);

struct MaskedFold {
    RatingMatrix train;            // m with the fold's entries set to absent
    std::vector<RatedEntry> test;  // ground truth of the held-out fold
};

/// Removes one fold from the matrix and returns it as the test set.
MaskedFold mask_fold(const RatingMatrix& m, const FoldAssignment& fa, int fold);

}  // namespace kolmac
