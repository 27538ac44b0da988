#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kolmac/completion.hpp"
#include "kolmac/folds.hpp"
#include "kolmac/rating_matrix.hpp"
#include "kolmac/similarity.hpp"

namespace kolmac {

/// Root-mean-square error over a held-out test set. Every truth pair must
/// have a prediction (keyed by FoldAssignment::key); a missing one throws.
double rmse(std::span<const RatedEntry> truth,
            const std::unordered_map<std::uint64_t, double>& predicted);
double rmse(std::span<const RatedEntry> truth, const CompletedMatrix& completed);

struct FoldResult {
    int fold = 0;
    double rmse = 0.0;
    std::size_t test_size = 0;
    double sim_build_ms = 0.0;
    double complete_ms = 0.0;
};

struct EvaluationReport {
    std::string dataset;
    std::string method;  // "kolmac-ks", "kolmac-cs", "baseline-global-mean", ...
    Measure measure = Measure::ks;
    double alpha = 0.5;
    std::vector<FoldResult> folds;
    double mean_rmse = 0.0;
    // configuration echo
    std::uint64_t seed = 0;
    std::string fold_source;  // "seeded" or "predefined"
    CompressorProfile profile;
    bool literal_denominator = false;
    unsigned workers = 1;

    std::string to_json() const;        // machine-readable report
    std::string to_table_row() const;   // one text row: method, dataset, alpha, rmse
    static std::string table_header();
};

struct EvalConfig {
    Measure measure = Measure::ks;
    CompletionConfig completion;
    CompressorProfile profile;
    unsigned workers = 1;
    std::string dataset_name = "dataset";
    std::string cache_dir;  // empty = no similarity cache
};

/// Per fold: mask the fold, build both similarity matrices from the training
/// split only, complete the held-out cells, and score them. One
/// term-computation pass serves every alpha in `alphas`.
std::vector<EvaluationReport> cross_validate_sweep(const RatingMatrix& m,
                                                   const FoldAssignment& folds,
                                                   const EvalConfig& config,
                                                   std::span<const double> alphas,
                                                   std::uint64_t seed_echo = 0,
                                                   const std::string& fold_source = "predefined");

EvaluationReport cross_validate(const RatingMatrix& m, const FoldAssignment& folds,
                                const EvalConfig& config, std::uint64_t seed_echo = 0,
                                const std::string& fold_source = "predefined");

/// Convenience: seeded uniform split, then cross-validate.
EvaluationReport cross_validate(const RatingMatrix& m, int k, std::uint64_t seed,
                                const EvalConfig& config);

enum class BaselineKind { global_mean, user_mean, item_mean };

/// Mean-rating floor predictors; empty rows/columns fall back to the global
/// mean (then the scale midpoint on an empty matrix).
double baseline_predict(const RatingMatrix& m, BaselineKind kind, std::size_t u, std::size_t o);

/// Cross-validates a baseline predictor over the same folds.
EvaluationReport evaluate_baseline(const RatingMatrix& m, const FoldAssignment& folds,
                                   BaselineKind kind, const std::string& dataset_name);

const char* baseline_name(BaselineKind kind);

}  // namespace kolmac
