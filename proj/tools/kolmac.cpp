// Batch front end: dataset ingestion, similarity builds, completion,
// evaluation and top-k recommendation dumps.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kolmac/completion.hpp"
#include "kolmac/dataset_io.hpp"
#include "kolmac/evaluation.hpp"
#include "kolmac/sim_cache.hpp"
#include "kolmac/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string dataset;
    std::string format = "csv";
    std::string delimiter = ",";
    std::string measure = "ks";
    double alpha = 0.5;
    int compression_level = 9;
    int folds = 5;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out;
    bool literal_denominator = false;
    std::string cache_dir;
};

void add_dataset_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--dataset", o.dataset, "Dataset path (file, or directory for ml100k-split)")
        ->required();
    cmd->add_option("--format", o.format, "Dataset format")
        ->check(CLI::IsMember({"ml100k", "ml100k-split", "ml1m", "csv"}))
        ->capture_default_str();
    cmd->add_option("--delimiter", o.delimiter, "Field separator for csv datasets")
        ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--measure", o.measure, "Similarity measure")
        ->check(CLI::IsMember({"ks", "cs"}))
        ->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Blend weight (1 = user-based, 0 = item-based)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--compression-level", o.compression_level, "DEFLATE level")
        ->check(CLI::Range(0, 9))
        ->capture_default_str();
    cmd->add_option("--workers", o.workers, "Worker threads")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    cmd->add_flag("--literal-denominator", o.literal_denominator,
                  "Normalize by the weight sum over all entities, not only raters");
    cmd->add_option("--cache-dir", o.cache_dir, "Similarity matrix cache directory");
}

kolmac::Dataset load(const CommonOpts& o) {
    auto format = kolmac::parse_dataset_format(o.format);
    if (!format) throw CLI::ValidationError("--format", "unknown dataset format " + o.format);
    if (*format == kolmac::DatasetFormat::csv) {
        if (o.delimiter.size() != 1)
            throw CLI::ValidationError("--delimiter", "expected a single character");
        return kolmac::load_csv(o.dataset, o.delimiter[0]);
    }
    return kolmac::load_dataset(o.dataset, *format);
}

kolmac::Measure measure_of(const CommonOpts& o) {
    return o.measure == "cs" ? kolmac::Measure::cs : kolmac::Measure::ks;
}

kolmac::CompressorProfile profile_of(const CommonOpts& o) {
    kolmac::CompressorProfile p;
    p.level = o.compression_level;
    return p;
}

std::pair<kolmac::SimilarityMatrix, kolmac::SimilarityMatrix> build_both_similarities(
    const kolmac::RatingMatrix& m, const CommonOpts& o) {
    auto measure = measure_of(o);
    auto profile = profile_of(o);
    auto s_users = kolmac::build_similarity_cached(m, kolmac::Axis::users, measure, profile,
                                                   o.workers, o.cache_dir);
    auto s_items = kolmac::build_similarity_cached(m, kolmac::Axis::items, measure, profile,
                                                   o.workers, o.cache_dir);
    return {std::move(s_users), std::move(s_items)};
}

kolmac::CompletionConfig completion_config(const CommonOpts& o) {
    kolmac::CompletionConfig cfg;
    cfg.alpha = o.alpha;
    cfg.literal_denominator = o.literal_denominator;
    return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_evaluate(const CommonOpts& o, bool sweep, bool with_baselines) {
    kolmac::Dataset ds = load(o);

    kolmac::FoldAssignment folds;
    std::string fold_source;
    if (ds.predefined_folds) {
        folds = *ds.predefined_folds;
        fold_source = "predefined";
    } else {
        folds = kolmac::split_folds(ds.matrix, o.folds, o.seed);
        fold_source = "seeded";
    }

    kolmac::EvalConfig config;
    config.measure = measure_of(o);
    config.completion = completion_config(o);
    config.profile = profile_of(o);
    config.workers = o.workers;
    config.dataset_name = ds.name;
    config.cache_dir = o.cache_dir;

    std::vector<double> alphas;
    if (sweep) {
        for (int i = 0; i <= 10; ++i) alphas.push_back(i / 10.0);
    } else {
        alphas.push_back(o.alpha);
    }

    std::vector<kolmac::EvaluationReport> reports =
        kolmac::cross_validate_sweep(ds.matrix, folds, config, alphas, o.seed, fold_source);

    const kolmac::EvaluationReport* best = &reports[0];
    for (const auto& r : reports)
        if (r.mean_rmse < best->mean_rmse) best = &r;

    std::string table = kolmac::EvaluationReport::table_header() + "\n";
    for (const auto& r : reports) table += r.to_table_row() + "\n";
    if (with_baselines) {
        for (auto kind : {kolmac::BaselineKind::global_mean, kolmac::BaselineKind::user_mean,
                          kolmac::BaselineKind::item_mean})
            table += kolmac::evaluate_baseline(ds.matrix, folds, kind, ds.name).to_table_row() +
                     "\n";
    }
    std::cout << table;
    if (sweep)
        std::cout << "best alpha " << best->alpha << ", mean rmse " << best->mean_rmse << "\n";

    if (!o.out.empty()) {
        if (reports.size() == 1) {
            write_text_file(o.out + ".json", reports[0].to_json() + "\n");
        } else {
            json all = json::array();
            for (const auto& r : reports) all.push_back(json::parse(r.to_json()));
            write_text_file(o.out + ".json", all.dump(2) + "\n");
        }
        write_text_file(o.out + ".txt", table);
    }
    return 0;
}

int cmd_complete(const CommonOpts& o) {
    kolmac::Dataset ds = load(o);
    auto [s_users, s_items] = build_both_similarities(ds.matrix, o);
    kolmac::CompletedMatrix completed =
        kolmac::complete_matrix(ds.matrix, s_users, s_items, completion_config(o), o.workers);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw std::runtime_error("cannot open output file: " + o.out);
        out = &file;
    }
    (*out) << "user,item,score,source\n";
    out->precision(17);
    for (std::uint32_t u = 0; u < ds.matrix.n_users(); ++u)
        for (const kolmac::Entry& e : ds.matrix.row(u))
            (*out) << ds.user_ids[u] << ',' << ds.item_ids[e.index] << ',' << e.rating
                   << ",observed\n";
    for (const kolmac::PredictedCell& c : completed.predictions())
        (*out) << ds.user_ids[c.user] << ',' << ds.item_ids[c.item] << ',' << c.prediction.score
               << ',' << kolmac::prediction_source_name(c.prediction.source) << '\n';
    return 0;
}

int cmd_recommend(const CommonOpts& o, std::int64_t raw_user, std::size_t top_k) {
    kolmac::Dataset ds = load(o);
    auto user_it = std::lower_bound(ds.user_ids.begin(), ds.user_ids.end(), raw_user);
    if (user_it == ds.user_ids.end() || *user_it != raw_user) {
        std::cerr << "error: unknown user id " << raw_user << "\n";
        return 1;
    }
    std::size_t u = static_cast<std::size_t>(user_it - ds.user_ids.begin());

    auto [s_users, s_items] = build_both_similarities(ds.matrix, o);
    // Only this user's row is completed.
    std::vector<kolmac::PredictedCell> ranked =
        kolmac::recommend_top_k(ds.matrix, s_users, s_items, completion_config(o), u, top_k);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw std::runtime_error("cannot open output file: " + o.out);
        out = &file;
    }
    (*out) << "rank,item,score\n";
    out->precision(17);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        (*out) << i + 1 << ',' << ds.item_ids[ranked[i].item] << ',' << ranked[i].prediction.score
               << '\n';
    return 0;
}

int cmd_similarity(const CommonOpts& o, const std::string& axis_name) {
    kolmac::Dataset ds = load(o);
    kolmac::Axis axis = axis_name == "item" ? kolmac::Axis::items : kolmac::Axis::users;
    kolmac::SimBuildStats stats;
    kolmac::SimilarityMatrix sim = kolmac::build_similarity_cached(
        ds.matrix, axis, measure_of(o), profile_of(o), o.workers, o.cache_dir, &stats);

    const std::vector<std::int64_t>& ids = axis == kolmac::Axis::users ? ds.user_ids : ds.item_ids;
    if (!o.out.empty()) {
        std::ofstream file(o.out);
        if (!file) throw std::runtime_error("cannot open output file: " + o.out);
        kolmac::write_similarity_csv(file, sim, &ids);
    } else {
        kolmac::write_similarity_csv(std::cout, sim, &ids);
    }
    std::cerr << "built " << (axis == kolmac::Axis::users ? "user" : "item") << " similarity ("
              << sim.order() << "x" << sim.order() << ", " << stats.entity_compressions
              << " entity + " << stats.pair_compressions << " pair compressions, "
              << stats.elapsed_ms << " ms)\n";
    return 0;
}

int cmd_synth(const CommonOpts& o, std::size_t count, std::size_t rows, std::size_t cols) {
    fs::path dir = o.out.empty() ? fs::path("synthetic") : fs::path(o.out);
    fs::create_directories(dir);

    json manifest;
    manifest["rows"] = rows;
    manifest["cols"] = cols;
    manifest["scale"] = {1, 5};
    json files = json::array();
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t seed = o.seed + i;
        kolmac::RatingMatrix m = kolmac::generate_synthetic(rows, cols, {1, 5}, seed);
        std::string name = "synth_" + std::to_string(i + 1) + ".csv";
        kolmac::write_ratings_csv((dir / name).string(), m);
        files.push_back({{"file", name}, {"seed", seed}});
        std::cout << name << " (seed " << seed << ", rank " << rows << ")\n";
    }
    manifest["matrices"] = files;
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix completion by compression-based collaborative filtering"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool sweep = false;
    bool with_baselines = false;
    std::int64_t user_id = 0;
    std::size_t top_k = 10;
    std::string axis_name = "user";
    std::size_t synth_count = 4, synth_rows = 20, synth_cols = 30;

    CLI::App* evaluate = app.add_subcommand("evaluate", "k-fold cross-validated RMSE");
    add_dataset_flags(evaluate, opts);
    add_model_flags(evaluate, opts);
    evaluate->add_option("--folds", opts.folds, "Fold count for seeded splits")
        ->check(CLI::Range(2, 100))
        ->capture_default_str();
    evaluate->add_option("--seed", opts.seed, "Fold split seed")->capture_default_str();
    evaluate->add_option("--out", opts.out, "Report path stem (writes .json and .txt)");
    evaluate->add_flag("--sweep", sweep, "Sweep alpha over 0, 0.1, ..., 1");
    evaluate->add_flag("--baselines", with_baselines, "Also report mean-predictor baselines");

    CLI::App* complete = app.add_subcommand("complete", "Complete the whole matrix to CSV");
    add_dataset_flags(complete, opts);
    add_model_flags(complete, opts);
    complete->add_option("--out", opts.out, "Output CSV path (default: stdout)");

    CLI::App* recommend = app.add_subcommand("recommend", "Top-k items for one user");
    add_dataset_flags(recommend, opts);
    add_model_flags(recommend, opts);
    recommend->add_option("--user", user_id, "Raw user id from the dataset")->required();
    recommend->add_option("--top-k", top_k, "Number of recommendations")->capture_default_str();
    recommend->add_option("--out", opts.out, "Output CSV path (default: stdout)");

    CLI::App* similarity = app.add_subcommand("similarity", "Build one similarity matrix");
    add_dataset_flags(similarity, opts);
    add_model_flags(similarity, opts);
    similarity->add_option("--axis", axis_name, "user or item")
        ->check(CLI::IsMember({"user", "item"}))
        ->capture_default_str();
    similarity->add_option("--out", opts.out, "Output CSV path (default: stdout)");

    CLI::App* synth = app.add_subcommand("synth", "Generate full-rank synthetic rating matrices");
    synth->add_option("--count", synth_count, "Number of matrices")->capture_default_str();
    synth->add_option("--rows", synth_rows, "Users per matrix")->capture_default_str();
    synth->add_option("--cols", synth_cols, "Items per matrix")->capture_default_str();
    synth->add_option("--seed", opts.seed, "Base seed (matrix i uses seed+i)")
        ->capture_default_str();
    synth->add_option("--out", opts.out, "Output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evaluate->parsed()) return cmd_evaluate(opts, sweep, with_baselines);
        if (complete->parsed()) return cmd_complete(opts);
        if (recommend->parsed()) return cmd_recommend(opts, user_id, top_k);
        if (similarity->parsed()) return cmd_similarity(opts, axis_name);
        if (synth->parsed()) return cmd_synth(opts, synth_count, synth_rows, synth_cols);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
