#include "kolmac/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "kolmac/sim_cache.hpp"

namespace kolmac {

using json = nlohmann::json;

double rmse(std::span<const RatedEntry> truth,
            const std::unordered_map<std::uint64_t, double>& predicted) {
    if (truth.empty()) throw std::invalid_argument("rmse over an empty test set");
    double sum_sq = 0.0;
    for (const RatedEntry& t : truth) {
        auto it = predicted.find(FoldAssignment::key(t.user, t.item));
        if (it == predicted.end())
            throw std::runtime_error("missing prediction for user " + std::to_string(t.user) +
                                     ", item " + std::to_string(t.item));
        double err = static_cast<double>(t.rating) - it->second;
        sum_sq += err * err;
    }
    return std::sqrt(sum_sq / static_cast<double>(truth.size()));
}

double rmse(std::span<const RatedEntry> truth, const CompletedMatrix& completed) {
    if (truth.empty()) throw std::invalid_argument("rmse over an empty test set");
    double sum_sq = 0.0;
    for (const RatedEntry& t : truth) {
        double err = static_cast<double>(t.rating) - completed.at(t.user, t.item);
        sum_sq += err * err;
    }
    return std::sqrt(sum_sq / static_cast<double>(truth.size()));
}

namespace {

double mean_of_folds(const std::vector<FoldResult>& folds) {
    double sum = 0.0;
    for (const FoldResult& f : folds) sum += f.rmse;
    return folds.empty() ? 0.0 : sum / static_cast<double>(folds.size());
}

double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

std::vector<EvaluationReport> cross_validate_sweep(const RatingMatrix& m,
                                                   const FoldAssignment& folds,
                                                   const EvalConfig& config,
                                                   std::span<const double> alphas,
                                                   std::uint64_t seed_echo,
                                                   const std::string& fold_source) {
    if (folds.k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
    if (alphas.empty()) throw std::invalid_argument("no alpha values given");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("alpha " + std::to_string(a) + " outside [0, 1]");

    std::vector<EvaluationReport> reports(alphas.size());
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        EvaluationReport& r = reports[ai];
        r.dataset = config.dataset_name;
        r.method = std::string("kolmac-") + measure_name(config.measure);
        r.measure = config.measure;
        r.alpha = alphas[ai];
        r.seed = seed_echo;
        r.fold_source = fold_source;
        r.profile = config.profile;
        r.literal_denominator = config.completion.literal_denominator;
        r.workers = config.workers;
    }

    for (int fold = 1; fold <= folds.k; ++fold) {
        MaskedFold masked = mask_fold(m, folds, fold);

        auto sim_start = std::chrono::steady_clock::now();
        SimilarityMatrix s_users = build_similarity_cached(
            masked.train, Axis::users, config.measure, config.profile, config.workers,
            config.cache_dir);
        SimilarityMatrix s_items = build_similarity_cached(
            masked.train, Axis::items, config.measure, config.profile, config.workers,
            config.cache_dir);
        double sim_ms = elapsed_ms_since(sim_start);

        auto complete_start = std::chrono::steady_clock::now();
        std::vector<std::pair<TermValue, TermValue>> terms =
            compute_terms(masked.train, s_users, s_items, masked.test,
                          config.completion.literal_denominator, config.workers);
        double complete_ms = elapsed_ms_since(complete_start);

        FallbackTable fallback = FallbackTable::build(masked.train);
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            CompletionConfig cfg = config.completion;
            cfg.alpha = alphas[ai];
            std::unordered_map<std::uint64_t, double> predicted;
            predicted.reserve(masked.test.size());
            for (std::size_t i = 0; i < masked.test.size(); ++i) {
                const RatedEntry& cell = masked.test[i];
                Prediction p = combine_terms(terms[i].first, terms[i].second, cfg, fallback,
                                             cell.user, cell.item, masked.train.scale());
                predicted.emplace(FoldAssignment::key(cell.user, cell.item), p.score);
            }
            reports[ai].folds.push_back(
                {fold, rmse(masked.test, predicted), masked.test.size(), sim_ms, complete_ms});
        }
    }

    for (EvaluationReport& r : reports) r.mean_rmse = mean_of_folds(r.folds);
    return reports;
}

EvaluationReport cross_validate(const RatingMatrix& m, const FoldAssignment& folds,
                                const EvalConfig& config, std::uint64_t seed_echo,
                                const std::string& fold_source) {
    double alpha = config.completion.alpha;
    return cross_validate_sweep(m, folds, config, std::span<const double>(&alpha, 1), seed_echo,
                                fold_source)[0];
}

EvaluationReport cross_validate(const RatingMatrix& m, int k, std::uint64_t seed,
                                const EvalConfig& config) {
    FoldAssignment folds = split_folds(m, k, seed);
    return cross_validate(m, folds, config, seed, "seeded");
}

double baseline_predict(const RatingMatrix& m, BaselineKind kind, std::size_t u, std::size_t o) {
    if (m.observed_count() == 0)
        throw std::invalid_argument("baseline over a matrix with no observed entries");
    double global = *m.global_mean();
    switch (kind) {
        case BaselineKind::global_mean: return global;
        case BaselineKind::user_mean: return m.user_mean(u).value_or(global);
        case BaselineKind::item_mean: return m.item_mean(o).value_or(global);
    }
    throw std::logic_error("unreachable baseline kind");
}

const char* baseline_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::global_mean: return "baseline-global-mean";
        case BaselineKind::user_mean: return "baseline-user-mean";
        case BaselineKind::item_mean: return "baseline-item-mean";
    }
    return "baseline";
}

EvaluationReport evaluate_baseline(const RatingMatrix& m, const FoldAssignment& folds,
                                   BaselineKind kind, const std::string& dataset_name) {
    EvaluationReport r;
    r.dataset = dataset_name;
    r.method = baseline_name(kind);
    r.alpha = std::numeric_limits<double>::quiet_NaN();
    r.fold_source = "predefined";

    for (int fold = 1; fold <= folds.k; ++fold) {
        MaskedFold masked = mask_fold(m, folds, fold);
        auto start = std::chrono::steady_clock::now();
        std::unordered_map<std::uint64_t, double> predicted;
        predicted.reserve(masked.test.size());
        for (const RatedEntry& cell : masked.test)
            predicted.emplace(FoldAssignment::key(cell.user, cell.item),
                              baseline_predict(masked.train, kind, cell.user, cell.item));
        r.folds.push_back({fold, rmse(masked.test, predicted), masked.test.size(), 0.0,
                           elapsed_ms_since(start)});
    }
    r.mean_rmse = mean_of_folds(r.folds);
    return r;
}

std::string EvaluationReport::to_json() const {
    json j;
    j["dataset"] = dataset;
    j["method"] = method;
    j["measure"] = measure_name(measure);
    j["alpha"] = std::isnan(alpha) ? json() : json(alpha);
    json folds_json = json::array();
    for (const FoldResult& f : folds) {
        folds_json.push_back({{"fold", f.fold},
                              {"rmse", f.rmse},
                              {"test_size", f.test_size},
                              {"sim_build_ms", f.sim_build_ms},
                              {"complete_ms", f.complete_ms}});
    }
    j["folds"] = folds_json;
    j["mean_rmse"] = mean_rmse;
    j["config"] = {{"seed", seed},
                   {"fold_source", fold_source},
                   {"compressor", profile.id()},
                   {"literal_denominator", literal_denominator},
                   {"workers", workers}};
    return j.dump(2);
}

std::string EvaluationReport::table_header() {
    return "method              dataset       alpha   mean_rmse  fold_rmse";
}

std::string EvaluationReport::to_table_row() const {
    char head[128];
    if (std::isnan(alpha))
        std::snprintf(head, sizeof(head), "%-19s %-13s %-7s %-10.4f", method.c_str(),
                      dataset.c_str(), "-", mean_rmse);
    else
        std::snprintf(head, sizeof(head), "%-19s %-13s %-7.2f %-10.4f", method.c_str(),
                      dataset.c_str(), alpha, mean_rmse);
    std::string row(head);
    for (const FoldResult& f : folds) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.4f", f.rmse);
        row += buf;
    }
    return row;
}

}  // namespace kolmac
