#include "kolmac/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kolmac/parallel.hpp"

namespace kolmac {

namespace {

// Co-rating counts against every other entity, computed in one pass over the
// dual index and reset in O(1) via epoch stamps.
struct CountArray {
    std::vector<std::uint32_t> count;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;

    void reset(std::size_t n) {
        if (count.size() != n) {
            count.assign(n, 0);
            stamp.assign(n, 0);
            epoch = 0;
        }
        if (++epoch == 0) {  // stamp wrap-around
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
    }
    void bump(std::size_t i) {
        if (stamp[i] != epoch) {
            stamp[i] = epoch;
            count[i] = 0;
        }
        ++count[i];
    }
    std::uint32_t get(std::size_t i) const { return stamp[i] == epoch ? count[i] : 0; }
};

struct RowWorkspace {
    CountArray user_co;       // co-rating counts of the row's user vs all users
    CountArray item_co;       // co-rater counts of one target item vs all items
    double user_z_all = 0.0;  // literal-denominator mass, constant per row
};

// cnt[u'] = number of items rated by both u and u'.
void count_user_co(const RatingMatrix& m, std::size_t u, CountArray& co) {
    co.reset(m.n_users());
    for (const Entry& e : m.row(u))
        for (const Entry& rater : m.col(e.index)) co.bump(rater.index);
}

// cnt[o'] = number of users who rated both o and o'.
void count_item_co(const RatingMatrix& m, std::size_t o, CountArray& co) {
    co.reset(m.n_items());
    for (const Entry& rater : m.col(o))
        for (const Entry& e : m.row(rater.index)) co.bump(e.index);
}

double literal_mass(const CountArray& co, const SimilarityMatrix& sim, std::size_t self) {
    double z = 0.0;
    for (std::size_t i = 0; i < sim.order(); ++i) {
        if (i == self) continue;
        std::uint32_t c = co.get(i);
        if (c == 0) continue;
        z += sim.at(self, i) * static_cast<double>(c) * static_cast<double>(c);
    }
    return z;
}

TermValue user_term_counted(const RatingMatrix& m, const SimilarityMatrix& s_users,
                            std::size_t u, std::size_t o, const CountArray& co,
                            bool literal, double z_literal) {
    double num = 0.0, z = 0.0;
    for (const Entry& rater : m.col(o)) {
        if (rater.index == u) continue;
        std::uint32_t c = co.get(rater.index);
        if (c == 0) continue;
        double w = s_users.at(u, rater.index) * static_cast<double>(c) * static_cast<double>(c);
        num += w * rater.rating;
        z += w;
    }
    double mass = literal ? z_literal : z;
    return {mass > 0.0 ? num / mass : 0.0, mass};
}

TermValue item_term_counted(const RatingMatrix& m, const SimilarityMatrix& s_items,
                            std::size_t u, std::size_t o, const CountArray& co, bool literal) {
    double num = 0.0, z = 0.0;
    for (const Entry& rated : m.row(u)) {
        if (rated.index == o) continue;
        std::uint32_t c = co.get(rated.index);
        if (c == 0) continue;
        double w = s_items.at(o, rated.index) * static_cast<double>(c) * static_cast<double>(c);
        num += w * rated.rating;
        z += w;
    }
    double mass = literal ? literal_mass(co, s_items, o) : z;
    return {mass > 0.0 ? num / mass : 0.0, mass};
}

std::pair<TermValue, TermValue> cell_terms(const RatingMatrix& m,
                                           const SimilarityMatrix& s_users,
                                           const SimilarityMatrix& s_items, std::size_t u,
                                           std::size_t o, bool literal, RowWorkspace& ws) {
    TermValue ut = user_term_counted(m, s_users, u, o, ws.user_co, literal, ws.user_z_all);
    count_item_co(m, o, ws.item_co);
    TermValue it = item_term_counted(m, s_items, u, o, ws.item_co, literal);
    return {ut, it};
}

void prepare_row(const RatingMatrix& m, const SimilarityMatrix& s_users, std::size_t u,
                 bool literal, RowWorkspace& ws) {
    count_user_co(m, u, ws.user_co);
    ws.user_z_all = literal ? literal_mass(ws.user_co, s_users, u) : 0.0;
}

void check_orders(const RatingMatrix& m, const SimilarityMatrix& s_users,
                  const SimilarityMatrix& s_items) {
    if (s_users.order() != m.n_users())
        throw std::invalid_argument("user similarity order does not match the matrix");
    if (s_items.order() != m.n_items())
        throw std::invalid_argument("item similarity order does not match the matrix");
}

}  // namespace

std::vector<FallbackStage> default_fallback_chain() {
    return {FallbackStage::user_mean, FallbackStage::item_mean, FallbackStage::global_mean,
            FallbackStage::scale_midpoint};
}

TermValue user_term(const RatingMatrix& m, const SimilarityMatrix& s_users, std::size_t u,
                    std::size_t o, bool literal_denominator) {
    if (s_users.order() != m.n_users())
        throw std::invalid_argument("user similarity order does not match the matrix");
    RowWorkspace ws;
    prepare_row(m, s_users, u, literal_denominator, ws);
    return user_term_counted(m, s_users, u, o, ws.user_co, literal_denominator, ws.user_z_all);
}

TermValue item_term(const RatingMatrix& m, const SimilarityMatrix& s_items, std::size_t u,
                    std::size_t o, bool literal_denominator) {
    if (s_items.order() != m.n_items())
        throw std::invalid_argument("item similarity order does not match the matrix");
    RowWorkspace ws;
    count_item_co(m, o, ws.item_co);
    return item_term_counted(m, s_items, u, o, ws.item_co, literal_denominator);
}

std::string prediction_source_name(PredictionSource s) {
    switch (s) {
        case PredictionSource::observed: return "observed";
        case PredictionSource::user_term: return "user_term";
        case PredictionSource::item_term: return "item_term";
        case PredictionSource::blend: return "blend";
        case PredictionSource::fallback_user_mean: return "fallback:user_mean";
        case PredictionSource::fallback_item_mean: return "fallback:item_mean";
        case PredictionSource::fallback_global_mean: return "fallback:global_mean";
        case PredictionSource::fallback_midpoint: return "fallback:midpoint";
    }
    return "unknown";
}

FallbackTable FallbackTable::build(const RatingMatrix& m) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    FallbackTable t;
    t.user_mean_.resize(m.n_users());
    t.item_mean_.resize(m.n_items());
    for (std::size_t u = 0; u < m.n_users(); ++u)
        t.user_mean_[u] = m.user_mean(u).value_or(nan);
    for (std::size_t o = 0; o < m.n_items(); ++o)
        t.item_mean_[o] = m.item_mean(o).value_or(nan);
    if (auto g = m.global_mean()) {
        t.global_mean_ = *g;
        t.has_global_ = true;
    }
    t.midpoint_ = m.scale().midpoint();
    return t;
}

Prediction FallbackTable::resolve(std::span<const FallbackStage> chain, std::size_t u,
                                  std::size_t o) const {
    for (FallbackStage stage : chain) {
        switch (stage) {
            case FallbackStage::user_mean:
                if (!std::isnan(user_mean_[u]))
                    return {user_mean_[u], PredictionSource::fallback_user_mean};
                break;
            case FallbackStage::item_mean:
                if (!std::isnan(item_mean_[o]))
                    return {item_mean_[o], PredictionSource::fallback_item_mean};
                break;
            case FallbackStage::global_mean:
                if (has_global_) return {global_mean_, PredictionSource::fallback_global_mean};
                break;
            case FallbackStage::scale_midpoint:
                return {midpoint_, PredictionSource::fallback_midpoint};
        }
    }
    return {midpoint_, PredictionSource::fallback_midpoint};
}

Prediction combine_terms(const TermValue& user_t, const TermValue& item_t,
                         const CompletionConfig& cfg, const FallbackTable& fallback,
                         std::size_t u, std::size_t o, RatingScale scale) {
    Prediction p;
    if (user_t.weight_mass > 0.0 && item_t.weight_mass > 0.0) {
        p.score = cfg.alpha * user_t.value + (1.0 - cfg.alpha) * item_t.value;
        p.source = PredictionSource::blend;
    } else if (user_t.weight_mass > 0.0) {
        p.score = user_t.value;
        p.source = PredictionSource::user_term;
    } else if (item_t.weight_mass > 0.0) {
        p.score = item_t.value;
        p.source = PredictionSource::item_term;
    } else {
        p = fallback.resolve(cfg.fallback_chain, u, o);
    }
    p.score = std::clamp(p.score, static_cast<double>(scale.min), static_cast<double>(scale.max));
    return p;
}

Prediction predict(const RatingMatrix& m, const SimilarityMatrix& s_users,
                   const SimilarityMatrix& s_items, const CompletionConfig& cfg, std::size_t u,
                   std::size_t o) {
    if (m.at(u, o) != kAbsentRating)
        throw std::invalid_argument("predict called on an observed entry");
    TermValue ut = user_term(m, s_users, u, o, cfg.literal_denominator);
    TermValue it = item_term(m, s_items, u, o, cfg.literal_denominator);
    return combine_terms(ut, it, cfg, FallbackTable::build(m), u, o, m.scale());
}

double CompletedMatrix::at(std::size_t u, std::size_t o) const {
    int r = base_.at(u, o);
    if (r != kAbsentRating) return r;
    PredictedCell probe{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(o), {}};
    auto it = std::lower_bound(predictions_.begin(), predictions_.end(), probe,
                               [](const PredictedCell& a, const PredictedCell& b) {
                                   return a.user != b.user ? a.user < b.user : a.item < b.item;
                               });
    if (it == predictions_.end() || it->user != probe.user || it->item != probe.item)
        throw std::out_of_range("no prediction for the requested cell");
    return it->prediction.score;
}

namespace {

std::vector<PredictedCell> complete_row_with(const RatingMatrix& m,
                                             const SimilarityMatrix& s_users,
                                             const SimilarityMatrix& s_items,
                                             const CompletionConfig& cfg,
                                             const FallbackTable& fallback, std::size_t u,
                                             RowWorkspace& ws) {
    std::vector<PredictedCell> out;
    const std::vector<Entry>& rated = m.row(u);
    if (rated.size() == m.n_items()) return out;  // fully-rated user
    out.reserve(m.n_items() - rated.size());

    prepare_row(m, s_users, u, cfg.literal_denominator, ws);
    auto it = rated.begin();
    for (std::uint32_t o = 0; o < m.n_items(); ++o) {
        if (it != rated.end() && it->index == o) {
            ++it;
            continue;
        }
        auto [ut, itv] = cell_terms(m, s_users, s_items, u, o, cfg.literal_denominator, ws);
        out.push_back({static_cast<std::uint32_t>(u), o,
                       combine_terms(ut, itv, cfg, fallback, u, o, m.scale())});
    }
    return out;
}

}  // namespace

std::vector<PredictedCell> complete_row(const RatingMatrix& m, const SimilarityMatrix& s_users,
                                        const SimilarityMatrix& s_items,
                                        const CompletionConfig& cfg, std::size_t u) {
    check_orders(m, s_users, s_items);
    RowWorkspace ws;
    return complete_row_with(m, s_users, s_items, cfg, FallbackTable::build(m), u, ws);
}

CompletedMatrix complete_matrix(const RatingMatrix& m, const SimilarityMatrix& s_users,
                                const SimilarityMatrix& s_items, const CompletionConfig& cfg,
                                unsigned workers) {
    check_orders(m, s_users, s_items);
    FallbackTable fallback = FallbackTable::build(m);
    std::vector<std::vector<PredictedCell>> per_user(m.n_users());

    parallel_for(0, m.n_users(), workers, [&](std::size_t u) {
        thread_local RowWorkspace ws;  // one workspace per worker thread
        per_user[u] = complete_row_with(m, s_users, s_items, cfg, fallback, u, ws);
    });

    std::size_t total = 0;
    for (const auto& v : per_user) total += v.size();
    std::vector<PredictedCell> flat;
    flat.reserve(total);
    for (auto& v : per_user) flat.insert(flat.end(), v.begin(), v.end());
    return CompletedMatrix(m, std::move(flat));
}

std::vector<std::pair<TermValue, TermValue>> compute_terms(
    const RatingMatrix& m, const SimilarityMatrix& s_users, const SimilarityMatrix& s_items,
    std::span<const RatedEntry> cells, bool literal_denominator, unsigned workers) {
    check_orders(m, s_users, s_items);
    // Group consecutive cells of the same user so the user co-rating pass is
    // shared across the group.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i + 1;
        while (j < cells.size() && cells[j].user == cells[i].user) ++j;
        groups.emplace_back(i, j);
        i = j;
    }

    std::vector<std::pair<TermValue, TermValue>> out(cells.size());
    parallel_for(0, groups.size(), workers, [&](std::size_t g) {
        thread_local RowWorkspace ws;
        auto [lo, hi] = groups[g];
        prepare_row(m, s_users, cells[lo].user, literal_denominator, ws);
        for (std::size_t i = lo; i < hi; ++i)
            out[i] = cell_terms(m, s_users, s_items, cells[i].user, cells[i].item,
                                literal_denominator, ws);
    });
    return out;
}

std::vector<PredictedCell> recommend_top_k(const RatingMatrix& m,
                                           const SimilarityMatrix& s_users,
                                           const SimilarityMatrix& s_items,
                                           const CompletionConfig& cfg, std::size_t u,
                                           std::size_t top_k) {
    std::vector<PredictedCell> row = complete_row(m, s_users, s_items, cfg, u);
    std::sort(row.begin(), row.end(), [](const PredictedCell& a, const PredictedCell& b) {
        if (a.prediction.score != b.prediction.score) return a.prediction.score > b.prediction.score;
        return a.item < b.item;
    });
    if (row.size() > top_k) row.resize(top_k);
    return row;
}

}  // namespace kolmac
