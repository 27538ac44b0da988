#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kolmac {

/// Ratings are positive integers; 0 marks an absent entry and is never stored.
inline constexpr int kAbsentRating = 0;

enum class Axis { users, items };

struct RatingScale {
    int min = 1;
    int max = 5;
    double midpoint() const { return 0.5 * (min + max); }
};

/// One stored rating inside a row (index = item) or a column (index = user).
struct Entry {
    std::uint32_t index;
    std::int32_t rating;
    bool operator==(const Entry&) const = default;
};

/// A rating together with both of its coordinates.
struct RatedEntry {
    std::uint32_t user;
    std::uint32_t item;
    std::int32_t rating;
    bool operator==(const RatedEntry&) const = default;
};

/// Sparse rating matrix with dual (row-major and column-major) index access.
/// Immutable after construction; safe for concurrent reads.
class RatingMatrix {
public:
    RatingMatrix() = default;

    /// Builds the dual index from triplets. Rejects out-of-range indices,
    /// ratings outside the scale (or equal to 0), and duplicate (user, item)
    /// pairs.
    static RatingMatrix from_triplets(std::span<const RatedEntry> triplets,
                                      std::size_t n_users, std::size_t n_items,
                                      RatingScale scale = {});

    std::size_t n_users() const { return rows_.size(); }
    std::size_t n_items() const { return cols_.size(); }
    int rating_min() const { return scale_.min; }
    int rating_max() const { return scale_.max; }
    RatingScale scale() const { return scale_; }
    std::size_t observed_count() const { return observed_; }

    /// Entries of user u sorted by item index. Throws std::out_of_range.
    const std::vector<Entry>& row(std::size_t u) const;
    /// Entries of item o sorted by user index. Throws std::out_of_range.
    const std::vector<Entry>& col(std::size_t o) const;

    /// Stored rating, or 0 when the entry is absent.
    int at(std::size_t u, std::size_t o) const;

    std::optional<double> user_mean(std::size_t u) const;
    std::optional<double> item_mean(std::size_t o) const;
    std::optional<double> global_mean() const;

    /// All observed entries in row-major order.
    std::vector<RatedEntry> entries() const;

private:
    std::vector<std::vector<Entry>> rows_;
    std::vector<std::vector<Entry>> cols_;
    RatingScale scale_;
    std::size_t observed_ = 0;
};

/// Number of common indices of two strictly increasing entry lists
/// (the co-rating count; sorted-merge intersection).
std::size_t co_rated_count(std::span<const Entry> a, std::span<const Entry> b);

}  // namespace kolmac
