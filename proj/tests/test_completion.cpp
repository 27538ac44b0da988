#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "kolmac/completion.hpp"
#include "kolmac/folds.hpp"
#include "kolmac/similarity.hpp"
#include "kolmac/synthetic.hpp"

using namespace kolmac;

namespace {

RatingMatrix random_sparse(std::uint64_t seed, std::size_t n, std::size_t m,
                           double density = 0.5) {
    std::mt19937_64 gen(seed);
    std::vector<RatedEntry> triplets;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t o = 0; o < m; ++o)
            if (std::uniform_real_distribution<>(0, 1)(gen) < density)
                triplets.push_back({u, o, std::uniform_int_distribution<>(1, 5)(gen)});
    return RatingMatrix::from_triplets(triplets, n, m);
}

std::vector<int> to_dense(const RatingMatrix& m) {
    std::vector<int> dense(m.n_users() * m.n_items(), 0);
    for (std::size_t u = 0; u < m.n_users(); ++u)
        for (const Entry& e : m.row(u)) dense[u * m.n_items() + e.index] = e.rating;
    return dense;
}

// Term-by-term oracle over the dense matrix: double loops, no sparse merges.
TermValue user_term_oracle(const std::vector<int>& dense, std::size_t n, std::size_t m,
                           const SimilarityMatrix& s_users, std::size_t u, std::size_t o,
                           bool literal = false) {
    double num = 0, z = 0, z_all = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (v == u) continue;
        std::size_t c = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (dense[u * m + j] != 0 && dense[v * m + j] != 0) ++c;
        double w = s_users.at(u, v) * static_cast<double>(c) * static_cast<double>(c);
        int r = dense[v * m + o];
        if (r != 0) {
            num += w * r;
            z += w;
        }
        z_all += w;
    }
    double mass = literal ? z_all : z;
    return {mass > 0 ? num / mass : 0.0, mass};
}

TermValue item_term_oracle(const std::vector<int>& dense, std::size_t n, std::size_t m,
                           const SimilarityMatrix& s_items, std::size_t u, std::size_t o,
                           bool literal = false) {
    double num = 0, z = 0, z_all = 0;
    for (std::size_t q = 0; q < m; ++q) {
        if (q == o) continue;
        std::size_t c = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (dense[v * m + o] != 0 && dense[v * m + q] != 0) ++c;
        double w = s_items.at(o, q) * static_cast<double>(c) * static_cast<double>(c);
        int r = dense[u * m + q];
        if (r != 0) {
            num += w * r;
            z += w;
        }
        z_all += w;
    }
    double mass = literal ? z_all : z;
    return {mass > 0 ? num / mass : 0.0, mass};
}

}  // namespace

TEST_CASE("user_term: worked three-user example") {
    // target cell (0, 0); user 1 rated it 4, user 2 rated it 2.
    // user 0 co-rates two items with user 1 and one with user 2;
    // similarities to both are 1, so the weights are 4 and 1.
    std::vector<RatedEntry> t{
        {0, 1, 3}, {0, 2, 3}, {0, 3, 3},            // user 0: items 1,2,3
        {1, 0, 4}, {1, 1, 2}, {1, 2, 5},            // user 1: target + items 1,2
        {2, 0, 2}, {2, 3, 1},                       // user 2: target + item 3
    };
    RatingMatrix m = RatingMatrix::from_triplets(t, 3, 4);
    SimilarityMatrix s(Axis::users, 3);
    for (std::size_t i = 0; i < 3; ++i) s.set(i, i, 1.0);
    s.set(0, 1, 1.0);
    s.set(0, 2, 1.0);
    s.set(1, 2, 0.5);

    TermValue term = user_term(m, s, 0, 0);
    CHECK(term.value == doctest::Approx((4.0 * 4 + 1.0 * 2) / 5.0));  // 3.6
    CHECK(term.value == doctest::Approx(3.6));
    CHECK(term.weight_mass == doctest::Approx(5.0));
}

TEST_CASE("user_term: zero mass when nobody else rated the item") {
    std::vector<RatedEntry> t{{0, 1, 3}, {1, 1, 4}};
    RatingMatrix m = RatingMatrix::from_triplets(t, 2, 2);
    SimilarityMatrix s(Axis::users, 2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 1.0);
    s.set(0, 1, 0.7);
    TermValue term = user_term(m, s, 0, 0);
    CHECK(term.weight_mass == 0.0);
}

TEST_CASE("user_term: constant ratings give that constant") {
    // every other user rated the target with 4
    std::vector<RatedEntry> t{{0, 1, 2}, {1, 0, 4}, {1, 1, 5}, {2, 0, 4}, {2, 1, 1}};
    RatingMatrix m = RatingMatrix::from_triplets(t, 3, 2);
    SimilarityMatrix s = build_similarity(m, Axis::users, Measure::ks, {});
    TermValue term = user_term(m, s, 0, 0);
    CHECK(term.weight_mass > 0.0);
    CHECK(term.value == doctest::Approx(4.0));
}

TEST_CASE("item_term: single other item dominates") {
    std::vector<RatedEntry> t{{0, 1, 5}, {1, 0, 2}, {1, 1, 3}};
    RatingMatrix m = RatingMatrix::from_triplets(t, 2, 2);
    SimilarityMatrix s(Axis::items, 2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 1.0);
    s.set(0, 1, 0.9);
    TermValue term = item_term(m, s, 0, 0);
    CHECK(term.weight_mass > 0.0);
    CHECK(term.value == doctest::Approx(5.0));

    // user 0 rated nothing else -> empty sum
    std::vector<RatedEntry> t2{{1, 0, 2}, {1, 1, 3}};
    RatingMatrix m2 = RatingMatrix::from_triplets(t2, 2, 2);
    CHECK(item_term(m2, s, 0, 0).weight_mass == 0.0);
}

TEST_CASE("terms match the dense oracle on random matrices") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        RatingMatrix m = random_sparse(seed, 8, 9, 0.45);
        std::vector<int> dense = to_dense(m);
        SimilarityMatrix su = build_similarity(m, Axis::users, Measure::cs, {});
        SimilarityMatrix si = build_similarity(m, Axis::items, Measure::cs, {});
        for (bool literal : {false, true}) {
            for (std::size_t u = 0; u < m.n_users(); ++u) {
                for (std::size_t o = 0; o < m.n_items(); ++o) {
                    TermValue ut = user_term(m, su, u, o, literal);
                    TermValue ut_ref = user_term_oracle(dense, 8, 9, su, u, o, literal);
                    CHECK(ut.value == ut_ref.value);
                    CHECK(ut.weight_mass == ut_ref.weight_mass);
                    TermValue it = item_term(m, si, u, o, literal);
                    TermValue it_ref = item_term_oracle(dense, 8, 9, si, u, o, literal);
                    CHECK(it.value == it_ref.value);
                    CHECK(it.weight_mass == it_ref.weight_mass);
                }
            }
        }
    }
}

TEST_CASE("predict and the oracle agree cell by cell on a 10x12 toy matrix") {
    RatingMatrix m = random_sparse(42, 10, 12, 0.5);
    std::vector<int> dense = to_dense(m);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletionConfig cfg;
    cfg.alpha = 0.3;
    FallbackTable fallback = FallbackTable::build(m);

    std::mt19937_64 gen(7);
    int checked = 0;
    while (checked < 100) {
        std::size_t u = gen() % 10, o = gen() % 12;
        if (m.at(u, o) != kAbsentRating) continue;
        ++checked;
        Prediction p = predict(m, su, si, cfg, u, o);
        TermValue ut = user_term_oracle(dense, 10, 12, su, u, o);
        TermValue it = item_term_oracle(dense, 10, 12, si, u, o);
        Prediction ref = combine_terms(ut, it, cfg, fallback, u, o, m.scale());
        CHECK(p.score == ref.score);
        CHECK(p.source == ref.source);
    }
}

TEST_CASE("combine_terms: blend arithmetic and endpoints") {
    RatingMatrix empty = RatingMatrix::from_triplets({}, 1, 1);
    FallbackTable fb = FallbackTable::build(empty);
    CompletionConfig cfg;

    TermValue ut{3.6, 1.0}, it{4.0, 1.0};
    cfg.alpha = 0.5;
    CHECK(combine_terms(ut, it, cfg, fb, 0, 0, {1, 5}).score == doctest::Approx(3.8));
    cfg.alpha = 1.0;
    CHECK(combine_terms(ut, it, cfg, fb, 0, 0, {1, 5}).score == 3.6);
    cfg.alpha = 0.0;
    CHECK(combine_terms(ut, it, cfg, fb, 0, 0, {1, 5}).score == 4.0);

    // one-sided masses ignore alpha
    cfg.alpha = 0.0;
    Prediction only_user = combine_terms(ut, TermValue{0, 0}, cfg, fb, 0, 0, {1, 5});
    CHECK(only_user.score == 3.6);
    CHECK(only_user.source == PredictionSource::user_term);
    cfg.alpha = 1.0;
    Prediction only_item = combine_terms(TermValue{0, 0}, it, cfg, fb, 0, 0, {1, 5});
    CHECK(only_item.score == 4.0);
    CHECK(only_item.source == PredictionSource::item_term);

    // literal denominators can push a mean below the scale; it clamps
    cfg.alpha = 0.5;
    Prediction clamped = combine_terms(TermValue{0.4, 1.0}, TermValue{0.2, 1.0}, cfg, fb, 0, 0,
                                       {1, 5});
    CHECK(clamped.score == 1.0);
}

TEST_CASE("fallback chain walks user mean, item mean, global mean, midpoint") {
    // user 0 has ratings -> user mean wins
    std::vector<RatedEntry> t{{0, 1, 4}, {0, 2, 2}, {1, 3, 5}};
    RatingMatrix m = RatingMatrix::from_triplets(t, 3, 4);
    FallbackTable fb = FallbackTable::build(m);
    auto chain = default_fallback_chain();

    Prediction p = fb.resolve(chain, 0, 0);
    CHECK(p.score == doctest::Approx(3.0));
    CHECK(p.source == PredictionSource::fallback_user_mean);

    // user 2 empty, item 3 has a rating -> item mean
    p = fb.resolve(chain, 2, 3);
    CHECK(p.score == doctest::Approx(5.0));
    CHECK(p.source == PredictionSource::fallback_item_mean);

    // user 2 empty, item 0 empty -> global mean
    p = fb.resolve(chain, 2, 0);
    CHECK(p.score == doctest::Approx(11.0 / 3.0));
    CHECK(p.source == PredictionSource::fallback_global_mean);

    // empty matrix -> scale midpoint
    RatingMatrix empty = RatingMatrix::from_triplets({}, 2, 2);
    FallbackTable fb_empty = FallbackTable::build(empty);
    p = fb_empty.resolve(chain, 1, 1);
    CHECK(p.score == 3.0);
    CHECK(p.source == PredictionSource::fallback_midpoint);
}

TEST_CASE("predict: requires an absent cell") {
    std::vector<RatedEntry> t{{0, 0, 3}};
    RatingMatrix m = RatingMatrix::from_triplets(t, 1, 2);
    SimilarityMatrix su(Axis::users, 1), si(Axis::items, 2);
    CHECK_THROWS_AS((void)predict(m, su, si, {}, 0, 0), std::invalid_argument);
}

TEST_CASE("complete_matrix: fully observed matrix stays untouched") {
    RatingMatrix m = generate_synthetic(4, 5, {1, 5}, 9);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletedMatrix done = complete_matrix(m, su, si, {});
    CHECK(done.predictions().empty());
    for (std::size_t u = 0; u < 4; ++u)
        for (const Entry& e : m.row(u)) CHECK(done.at(u, e.index) == e.rating);
}

TEST_CASE("complete_matrix: all-missing matrix falls back to the midpoint") {
    RatingMatrix m = RatingMatrix::from_triplets({}, 2, 2);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletedMatrix done = complete_matrix(m, su, si, {});
    REQUIRE(done.predictions().size() == 4);
    for (const PredictedCell& c : done.predictions()) {
        CHECK(c.prediction.score == 3.0);
        CHECK(c.prediction.source == PredictionSource::fallback_midpoint);
    }
}

TEST_CASE("complete_matrix: every masked cell equals predict() in isolation") {
    RatingMatrix full = generate_synthetic(20, 30, {1, 5}, 321);
    FoldAssignment fa = split_folds(full, 5, 11);  // fold 1 masks 20%
    MaskedFold masked = mask_fold(full, fa, 1);
    const RatingMatrix& train = masked.train;

    SimilarityMatrix su = build_similarity(train, Axis::users, Measure::cs, {});
    SimilarityMatrix si = build_similarity(train, Axis::items, Measure::cs, {});
    CompletionConfig cfg;
    cfg.alpha = 0.5;
    CompletedMatrix done = complete_matrix(train, su, si, cfg);
    REQUIRE(done.predictions().size() == masked.test.size());

    for (const RatedEntry& cell : masked.test) {
        Prediction isolated = predict(train, su, si, cfg, cell.user, cell.item);
        CHECK(done.at(cell.user, cell.item) == isolated.score);
    }
}

TEST_CASE("complete_row: slices and edge cases") {
    RatingMatrix m = random_sparse(15, 7, 9, 0.5);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletionConfig cfg;

    CompletedMatrix done = complete_matrix(m, su, si, cfg);
    for (std::size_t u = 0; u < m.n_users(); ++u) {
        std::vector<PredictedCell> row = complete_row(m, su, si, cfg, u);
        CHECK(row.size() == m.n_items() - m.row(u).size());
        // ascending by item, matching the full completion slice
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) CHECK(row[i].item > row[i - 1].item);
            CHECK(row[i].prediction.score == done.at(u, row[i].item));
        }
    }

    // fully-rated user yields nothing
    RatingMatrix full = generate_synthetic(3, 3, {1, 5}, 2);
    SimilarityMatrix su2 = build_similarity(full, Axis::users, Measure::ks, {});
    SimilarityMatrix si2 = build_similarity(full, Axis::items, Measure::ks, {});
    CHECK(complete_row(full, su2, si2, cfg, 0).empty());
}

TEST_CASE("complete_matrix: predictions bounded by the rating scale") {
    for (std::uint64_t seed : {5u, 6u}) {
        RatingMatrix m = random_sparse(seed, 12, 10, 0.3);
        for (Measure measure : {Measure::ks, Measure::cs}) {
            SimilarityMatrix su = build_similarity(m, Axis::users, measure, {});
            SimilarityMatrix si = build_similarity(m, Axis::items, measure, {});
            for (double alpha : {0.0, 0.3, 1.0}) {
                CompletionConfig cfg;
                cfg.alpha = alpha;
                CompletedMatrix done = complete_matrix(m, su, si, cfg);
                REQUIRE(done.predictions().size() == 12 * 10 - m.observed_count());
                for (const PredictedCell& c : done.predictions()) {
                    CHECK(c.prediction.score >= 1.0);
                    CHECK(c.prediction.score <= 5.0);
                }
            }
        }
    }
}

TEST_CASE("complete_matrix: alpha endpoints reduce to single-sided passes") {
    RatingMatrix m = random_sparse(77, 11, 13, 0.4);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::cs, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::cs, {});
    FallbackTable fb = FallbackTable::build(m);
    auto chain = default_fallback_chain();

    auto reference = [&](std::size_t u, std::size_t o, bool user_based) {
        TermValue ut = user_term(m, su, u, o);
        TermValue it = item_term(m, si, u, o);
        double score;
        if (user_based)
            score = ut.weight_mass > 0 ? ut.value
                                       : (it.weight_mass > 0 ? it.value : fb.resolve(chain, u, o).score);
        else
            score = it.weight_mass > 0 ? it.value
                                       : (ut.weight_mass > 0 ? ut.value : fb.resolve(chain, u, o).score);
        return std::clamp(score, 1.0, 5.0);
    };

    CompletionConfig user_cfg;
    user_cfg.alpha = 1.0;
    CompletedMatrix user_based = complete_matrix(m, su, si, user_cfg);
    for (const PredictedCell& c : user_based.predictions())
        CHECK(c.prediction.score == reference(c.user, c.item, true));

    CompletionConfig item_cfg;
    item_cfg.alpha = 0.0;
    CompletedMatrix item_based = complete_matrix(m, su, si, item_cfg);
    for (const PredictedCell& c : item_based.predictions())
        CHECK(c.prediction.score == reference(c.user, c.item, false));
}

TEST_CASE("complete_matrix: bitwise identical across worker counts") {
    RatingMatrix m = random_sparse(13, 16, 14, 0.35);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletionConfig cfg;
    cfg.alpha = 0.4;

    CompletedMatrix one = complete_matrix(m, su, si, cfg, 1);
    CompletedMatrix four = complete_matrix(m, su, si, cfg, 4);
    REQUIRE(one.predictions().size() == four.predictions().size());
    for (std::size_t i = 0; i < one.predictions().size(); ++i) {
        CHECK(one.predictions()[i].user == four.predictions()[i].user);
        CHECK(one.predictions()[i].item == four.predictions()[i].item);
        CHECK(one.predictions()[i].prediction.score == four.predictions()[i].prediction.score);
        CHECK(one.predictions()[i].prediction.source == four.predictions()[i].prediction.source);
    }
}

TEST_CASE("complete_matrix: permuting users permutes predictions") {
    RatingMatrix m = random_sparse(19, 9, 11, 0.4);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletionConfig cfg;
    CompletedMatrix done = complete_matrix(m, su, si, cfg);

    // reversal permutation
    std::size_t n = m.n_users();
    std::vector<RatedEntry> permuted;
    for (const RatedEntry& e : m.entries())
        permuted.push_back({static_cast<std::uint32_t>(n - 1 - e.user), e.item, e.rating});
    RatingMatrix pm = RatingMatrix::from_triplets(permuted, n, m.n_items());
    SimilarityMatrix psu(Axis::users, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) psu.set(n - 1 - i, n - 1 - j, su.at(i, j));

    CompletedMatrix pdone = complete_matrix(pm, psu, si, cfg);
    REQUIRE(pdone.predictions().size() == done.predictions().size());
    for (const PredictedCell& c : done.predictions()) {
        double moved = pdone.at(n - 1 - c.user, c.item);
        CHECK(moved == doctest::Approx(c.prediction.score).epsilon(1e-12));
    }
}

TEST_CASE("recommend_top_k: ordering, tie-break, truncation") {
    RatingMatrix m = random_sparse(8, 7, 10, 0.45);
    SimilarityMatrix su = build_similarity(m, Axis::users, Measure::ks, {});
    SimilarityMatrix si = build_similarity(m, Axis::items, Measure::ks, {});
    CompletionConfig cfg;

    std::vector<PredictedCell> row = complete_row(m, su, si, cfg, 2);
    std::vector<PredictedCell> all = recommend_top_k(m, su, si, cfg, 2, 1000);
    CHECK(all.size() == row.size());  // top_k larger than the unrated count
    for (std::size_t i = 1; i < all.size(); ++i) {
        bool ordered = all[i - 1].prediction.score > all[i].prediction.score ||
                       (all[i - 1].prediction.score == all[i].prediction.score &&
                        all[i - 1].item < all[i].item);
        CHECK(ordered);
    }

    std::vector<PredictedCell> top3 = recommend_top_k(m, su, si, cfg, 2, 3);
    REQUIRE(top3.size() == std::min<std::size_t>(3, all.size()));
    for (std::size_t i = 0; i < top3.size(); ++i) {
        CHECK(top3[i].item == all[i].item);
        CHECK(top3[i].prediction.score == all[i].prediction.score);
    }

    // ties: an all-midpoint matrix ranks by ascending item id
    RatingMatrix empty = RatingMatrix::from_triplets({}, 2, 5);
    SimilarityMatrix esu = build_similarity(empty, Axis::users, Measure::ks, {});
    SimilarityMatrix esi = build_similarity(empty, Axis::items, Measure::ks, {});
    std::vector<PredictedCell> tied = recommend_top_k(empty, esu, esi, cfg, 0, 3);
    REQUIRE(tied.size() == 3);
    CHECK(tied[0].item == 0);
    CHECK(tied[1].item == 1);
    CHECK(tied[2].item == 2);

    // fully-rated user has nothing to recommend
    RatingMatrix full = generate_synthetic(2, 2, {1, 5}, 3);
    SimilarityMatrix fsu = build_similarity(full, Axis::users, Measure::ks, {});
    SimilarityMatrix fsi = build_similarity(full, Axis::items, Measure::ks, {});
    CHECK(recommend_top_k(full, fsu, fsi, cfg, 0, 5).empty());
}
