#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kolmac/rating_matrix.hpp"
#include "kolmac/similarity.hpp"

namespace kolmac {

enum class FallbackStage { user_mean, item_mean, global_mean, scale_midpoint };

std::vector<FallbackStage> default_fallback_chain();

struct CompletionConfig {
    /// Blend weight: 1 is pure user-based, 0 pure item-based.
    double alpha = 0.5;
    /// Divide by the weight sum over *all* other entities, as the displayed
    /// averaging formula reads literally, instead of restricting to entities
    /// that actually rated the target. Off by default; kept for comparison.
    bool literal_denominator = false;
    /// Tried in order when both weighted averages are empty.
    std::vector<FallbackStage> fallback_chain = default_fallback_chain();
};

/// A weighted average plus the weight mass behind it; mass 0 means the sum
/// was empty and the value carries no information.
struct TermValue {
    double value = 0.0;
    double weight_mass = 0.0;
};

/// Weighted average of other users' ratings of item o; each rating is
/// weighted by similarity to u times the squared co-rating count.
TermValue user_term(const RatingMatrix& m, const SimilarityMatrix& s_users, std::size_t u,
                    std::size_t o, bool literal_denominator = false);

/// Mirror of user_term across the item axis: weighted average of u's other
/// ratings by item similarity times squared co-rater count.
TermValue item_term(const RatingMatrix& m, const SimilarityMatrix& s_items, std::size_t u,
                    std::size_t o, bool literal_denominator = false);

enum class PredictionSource : std::uint8_t {
    observed,
    user_term,
    item_term,
    blend,
    fallback_user_mean,
    fallback_item_mean,
    fallback_global_mean,
    fallback_midpoint,
};

std::string prediction_source_name(PredictionSource s);

struct Prediction {
    double score = 0.0;
    PredictionSource source = PredictionSource::blend;
};

/// Row/column/global means of a train matrix, for cold-start cells.
class FallbackTable {
public:
    static FallbackTable build(const RatingMatrix& m);
    Prediction resolve(std::span<const FallbackStage> chain, std::size_t u, std::size_t o) const;

private:
    std::vector<double> user_mean_, item_mean_;  // NaN when undefined
    double global_mean_ = 0.0;
    bool has_global_ = false;
    double midpoint_ = 0.0;
};

/// Convex combination of the two term values; a term with zero mass drops
/// out, and when both are empty the fallback chain decides. Always clamped
/// to the rating scale.
Prediction combine_terms(const TermValue& user_t, const TermValue& item_t,
                         const CompletionConfig& cfg, const FallbackTable& fallback,
                         std::size_t u, std::size_t o, RatingScale scale);

/// One absent entry. Requires m.at(u, o) == 0.
Prediction predict(const RatingMatrix& m, const SimilarityMatrix& s_users,
                   const SimilarityMatrix& s_items, const CompletionConfig& cfg, std::size_t u,
                   std::size_t o);

struct PredictedCell {
    std::uint32_t user;
    std::uint32_t item;
    Prediction prediction;
};

/// The input matrix plus a score for every entry it was missing. Observed
/// entries are never overwritten.
class CompletedMatrix {
public:
    CompletedMatrix() = default;
    CompletedMatrix(RatingMatrix base, std::vector<PredictedCell> predictions)
        : base_(std::move(base)), predictions_(std::move(predictions)) {}

    const RatingMatrix& base() const { return base_; }
    /// Sorted by (user, item).
    const std::vector<PredictedCell>& predictions() const { return predictions_; }

    /// Observed rating or predicted score.
    double at(std::size_t u, std::size_t o) const;

private:
    RatingMatrix base_;
    std::vector<PredictedCell> predictions_;
};

/// Predictions for every absent item of one user, ascending by item.
std::vector<PredictedCell> complete_row(const RatingMatrix& m, const SimilarityMatrix& s_users,
                                        const SimilarityMatrix& s_items,
                                        const CompletionConfig& cfg, std::size_t u);

/// Completes the whole matrix, farming rows to `workers` threads. Rows are
/// independent; the result does not depend on the worker count.
CompletedMatrix complete_matrix(const RatingMatrix& m, const SimilarityMatrix& s_users,
                                const SimilarityMatrix& s_items, const CompletionConfig& cfg,
                                unsigned workers = 1);

/// Term pairs for an explicit list of absent cells (the evaluation path;
/// terms do not depend on alpha, so one pass serves a whole alpha sweep).
std::vector<std::pair<TermValue, TermValue>> compute_terms(
    const RatingMatrix& m, const SimilarityMatrix& s_users, const SimilarityMatrix& s_items,
    std::span<const RatedEntry> cells, bool literal_denominator, unsigned workers);

/// Top-k unrated items for one user by predicted score, ties broken by
/// ascending item index. Only the user's row is completed.
std::vector<PredictedCell> recommend_top_k(const RatingMatrix& m,
                                           const SimilarityMatrix& s_users,
                                           const SimilarityMatrix& s_items,
                                           const CompletionConfig& cfg, std::size_t u,
                                           std::size_t top_k);

}  // namespace kolmac
