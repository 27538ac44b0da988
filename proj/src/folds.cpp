#include "kolmac/folds.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "kolmac/random.hpp"

namespace kolmac {

FoldAssignment split_folds(const RatingMatrix& m, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be >= 2, got " + std::to_string(k));
    if (m.observed_count() < static_cast<std::size_t>(k))
        throw std::invalid_argument("fold count " + std::to_string(k) + " exceeds observed entries " +
                                    std::to_string(m.observed_count()));

    std::vector<std::uint64_t> keys;
    keys.reserve(m.observed_count());
    for (std::uint32_t u = 0; u < m.n_users(); ++u)
        for (const Entry& e : m.row(u)) keys.push_back(FoldAssignment::key(u, e.index));

    // Fisher-Yates; position i modulo k picks the fold, so sizes differ by <= 1.
    std::mt19937_64 gen(seed);
    for (std::size_t i = keys.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(gen, i + 1));
        std::swap(keys[i], keys[j]);
    }

    FoldAssignment fa;
    fa.k = k;
    fa.assignment.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        fa.assignment.emplace(keys[i], static_cast<int>(i % k) + 1);
    return fa;
}

MaskedFold mask_fold(const RatingMatrix& m, const FoldAssignment& fa, int fold) {
    if (fold < 1 || fold > fa.k)
        throw std::invalid_argument("fold id " + std::to_string(fold) + " outside 1.." +
                                    std::to_string(fa.k));

    std::vector<RatedEntry> train_triplets, test;
    train_triplets.reserve(m.observed_count());
    for (std::uint32_t u = 0; u < m.n_users(); ++u) {
        for (const Entry& e : m.row(u)) {
            RatedEntry t{u, e.index, e.rating};
            if (fa.fold_of(u, e.index) == fold)
                test.push_back(t);
            else
                train_triplets.push_back(t);
        }
    }

    MaskedFold out;
    out.train = RatingMatrix::from_triplets(train_triplets, m.n_users(), m.n_items(), m.scale());
    out.test = std::move(test);
    return out;
}

}  // namespace kolmac
