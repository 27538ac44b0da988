#include "kolmac/rating_matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace kolmac {

RatingMatrix RatingMatrix::from_triplets(std::span<const RatedEntry> triplets,
                                         std::size_t n_users, std::size_t n_items,
                                         RatingScale scale) {
    if (scale.min > scale.max)
        throw std::invalid_argument("rating scale: min > max");

    RatingMatrix m;
    m.scale_ = scale;
    m.rows_.resize(n_users);
    m.cols_.resize(n_items);

    for (const RatedEntry& t : triplets) {
        if (t.user >= n_users)
            throw std::invalid_argument("user index " + std::to_string(t.user) +
                                        " out of range [0, " + std::to_string(n_users) + ")");
        if (t.item >= n_items)
            throw std::invalid_argument("item index " + std::to_string(t.item) +
                                        " out of range [0, " + std::to_string(n_items) + ")");
        if (t.rating == kAbsentRating || t.rating < scale.min || t.rating > scale.max)
            throw std::invalid_argument("rating " + std::to_string(t.rating) +
                                        " outside scale [" + std::to_string(scale.min) + ", " +
                                        std::to_string(scale.max) + "]");
        m.rows_[t.user].push_back({t.item, t.rating});
        m.cols_[t.item].push_back({t.user, t.rating});
    }

    auto sort_and_check = [](std::vector<Entry>& v, const char* what, std::size_t at) {
        std::sort(v.begin(), v.end(),
                  [](const Entry& a, const Entry& b) { return a.index < b.index; });
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i].index == v[i - 1].index)
                throw std::invalid_argument("duplicate rating for " + std::string(what) + " " +
                                            std::to_string(at) + ", index " +
                                            std::to_string(v[i].index));
    };
    for (std::size_t u = 0; u < n_users; ++u) sort_and_check(m.rows_[u], "user", u);
    for (std::size_t o = 0; o < n_items; ++o) sort_and_check(m.cols_[o], "item", o);

    m.observed_ = triplets.size();
    return m;
}

const std::vector<Entry>& RatingMatrix::row(std::size_t u) const {
    if (u >= rows_.size())
        throw std::out_of_range("user index " + std::to_string(u) + " out of range");
    return rows_[u];
}

const std::vector<Entry>& RatingMatrix::col(std::size_t o) const {
    if (o >= cols_.size())
        throw std::out_of_range("item index " + std::to_string(o) + " out of range");
    return cols_[o];
}

int RatingMatrix::at(std::size_t u, std::size_t o) const {
    const std::vector<Entry>& r = row(u);
    auto it = std::lower_bound(r.begin(), r.end(), o, [](const Entry& e, std::size_t idx) {
        return e.index < idx;
    });
    if (it != r.end() && it->index == o) return it->rating;
    return kAbsentRating;
}

std::optional<double> RatingMatrix::user_mean(std::size_t u) const {
    const std::vector<Entry>& r = row(u);
    if (r.empty()) return std::nullopt;
    double sum = 0;
    for (const Entry& e : r) sum += e.rating;
    return sum / static_cast<double>(r.size());
}

std::optional<double> RatingMatrix::item_mean(std::size_t o) const {
    const std::vector<Entry>& c = col(o);
    if (c.empty()) return std::nullopt;
    double sum = 0;
    for (const Entry& e : c) sum += e.rating;
    return sum / static_cast<double>(c.size());
}

std::optional<double> RatingMatrix::global_mean() const {
    if (observed_ == 0) return std::nullopt;
    double sum = 0;
    for (const auto& r : rows_)
        for (const Entry& e : r) sum += e.rating;
    return sum / static_cast<double>(observed_);
}

std::vector<RatedEntry> RatingMatrix::entries() const {
    std::vector<RatedEntry> out;
    out.reserve(observed_);
    for (std::uint32_t u = 0; u < rows_.size(); ++u)
        for (const Entry& e : rows_[u]) out.push_back({u, e.index, e.rating});
    return out;
}

std::size_t co_rated_count(std::span<const Entry> a, std::span<const Entry> b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].index < b[j].index) {
            ++i;
        } else if (b[j].index < a[i].index) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace kolmac
