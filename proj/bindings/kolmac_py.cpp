#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kolmac/completion.hpp"
#include "kolmac/dataset_io.hpp"
#include "kolmac/description.hpp"
#include "kolmac/evaluation.hpp"
#include "kolmac/folds.hpp"
#include "kolmac/sim_cache.hpp"
#include "kolmac/similarity.hpp"
#include "kolmac/synthetic.hpp"

namespace py = pybind11;
using namespace kolmac;

namespace {

RatingMatrix matrix_from_triplets(const std::vector<std::tuple<std::uint32_t, std::uint32_t, int>>& triplets,
                                  std::size_t n_users, std::size_t n_items,
                                  std::pair<int, int> scale) {
    std::vector<RatedEntry> entries;
    entries.reserve(triplets.size());
    for (const auto& [u, o, r] : triplets) entries.push_back({u, o, r});
    return RatingMatrix::from_triplets(entries, n_users, n_items, {scale.first, scale.second});
}

DatasetFormat format_from_string(const std::string& name) {
    auto f = parse_dataset_format(name);
    if (!f) throw std::invalid_argument("unknown dataset format: " + name);
    return *f;
}

Measure measure_from_string(const std::string& name) {
    if (name == "ks") return Measure::ks;
    if (name == "cs") return Measure::cs;
    throw std::invalid_argument("unknown measure: " + name);
}

}  // namespace

PYBIND11_MODULE(_kolmac, m) {
    m.doc() = "Matrix completion by compression-based collaborative filtering";

    py::class_<RatedEntry>(m, "RatedEntry")
        .def(py::init<std::uint32_t, std::uint32_t, std::int32_t>(), py::arg("user"),
             py::arg("item"), py::arg("rating"))
        .def_readonly("user", &RatedEntry::user)
        .def_readonly("item", &RatedEntry::item)
        .def_readonly("rating", &RatedEntry::rating)
        .def("__repr__", [](const RatedEntry& e) {
            return "RatedEntry(user=" + std::to_string(e.user) + ", item=" +
                   std::to_string(e.item) + ", rating=" + std::to_string(e.rating) + ")";
        });

    py::class_<RatingMatrix>(m, "RatingMatrix")
        .def_static("from_triplets", &matrix_from_triplets, py::arg("triplets"),
                    py::arg("n_users"), py::arg("n_items"),
                    py::arg("scale") = std::pair<int, int>{1, 5})
        .def_property_readonly("n_users", &RatingMatrix::n_users)
        .def_property_readonly("n_items", &RatingMatrix::n_items)
        .def_property_readonly("rating_min", &RatingMatrix::rating_min)
        .def_property_readonly("rating_max", &RatingMatrix::rating_max)
        .def_property_readonly("observed_count", &RatingMatrix::observed_count)
        .def("at", &RatingMatrix::at, py::arg("user"), py::arg("item"),
             "Stored rating, or 0 when absent")
        .def("row",
             [](const RatingMatrix& m, std::size_t u) {
                 std::vector<std::pair<std::uint32_t, int>> out;
                 for (const Entry& e : m.row(u)) out.emplace_back(e.index, e.rating);
                 return out;
             })
        .def("col",
             [](const RatingMatrix& m, std::size_t o) {
                 std::vector<std::pair<std::uint32_t, int>> out;
                 for (const Entry& e : m.col(o)) out.emplace_back(e.index, e.rating);
                 return out;
             })
        .def("entries", &RatingMatrix::entries);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("matrix", &Dataset::matrix)
        .def_readonly("user_ids", &Dataset::user_ids)
        .def_readonly("item_ids", &Dataset::item_ids)
        .def_readonly("name", &Dataset::name)
        .def_property_readonly("predefined_folds", [](const Dataset& d) {
            return d.predefined_folds ? py::cast(*d.predefined_folds) : py::none().cast<py::object>();
        });

    py::class_<FoldAssignment>(m, "FoldAssignment")
        .def_readonly("k", &FoldAssignment::k)
        .def("fold_of", &FoldAssignment::fold_of, py::arg("user"), py::arg("item"))
        .def("fold_size", &FoldAssignment::fold_size, py::arg("fold"));

    py::class_<MaskedFold>(m, "MaskedFold")
        .def_readonly("train", &MaskedFold::train)
        .def_readonly("test", &MaskedFold::test);

    py::class_<CompressorProfile>(m, "CompressorProfile")
        .def(py::init([](const std::string& algorithm, int level) {
                 return CompressorProfile{algorithm, level};
             }),
             py::arg("algorithm") = "deflate", py::arg("level") = 9)
        .def_readwrite("algorithm", &CompressorProfile::algorithm)
        .def_readwrite("level", &CompressorProfile::level)
        .def("id", &CompressorProfile::id);

    py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
        .def_property_readonly("order", &SimilarityMatrix::order)
        .def("at", &SimilarityMatrix::at, py::arg("i"), py::arg("j"));

    py::class_<CompletionConfig>(m, "CompletionConfig")
        .def(py::init([](double alpha, bool literal_denominator) {
                 CompletionConfig cfg;
                 cfg.alpha = alpha;
                 cfg.literal_denominator = literal_denominator;
                 return cfg;
             }),
             py::arg("alpha") = 0.5, py::arg("literal_denominator") = false)
        .def_readwrite("alpha", &CompletionConfig::alpha)
        .def_readwrite("literal_denominator", &CompletionConfig::literal_denominator);

    py::class_<TermValue>(m, "TermValue")
        .def_readonly("value", &TermValue::value)
        .def_readonly("weight_mass", &TermValue::weight_mass);

    py::class_<Prediction>(m, "Prediction")
        .def_readonly("score", &Prediction::score)
        .def_property_readonly("source",
                               [](const Prediction& p) { return prediction_source_name(p.source); });

    py::class_<PredictedCell>(m, "PredictedCell")
        .def_readonly("user", &PredictedCell::user)
        .def_readonly("item", &PredictedCell::item)
        .def_readonly("prediction", &PredictedCell::prediction);

    py::class_<CompletedMatrix>(m, "CompletedMatrix")
        .def_property_readonly("base", &CompletedMatrix::base)
        .def_property_readonly("predictions", &CompletedMatrix::predictions)
        .def("at", &CompletedMatrix::at, py::arg("user"), py::arg("item"));

    py::class_<FoldResult>(m, "FoldResult")
        .def_readonly("fold", &FoldResult::fold)
        .def_readonly("rmse", &FoldResult::rmse)
        .def_readonly("test_size", &FoldResult::test_size)
        .def_readonly("sim_build_ms", &FoldResult::sim_build_ms)
        .def_readonly("complete_ms", &FoldResult::complete_ms);

    py::class_<EvaluationReport>(m, "EvaluationReport")
        .def_readonly("dataset", &EvaluationReport::dataset)
        .def_readonly("method", &EvaluationReport::method)
        .def_readonly("alpha", &EvaluationReport::alpha)
        .def_readonly("folds", &EvaluationReport::folds)
        .def_readonly("mean_rmse", &EvaluationReport::mean_rmse)
        .def("to_json", &EvaluationReport::to_json)
        .def("to_table_row", &EvaluationReport::to_table_row);

    m.def("load_dataset",
          [](const std::string& path, const std::string& format) {
              return load_dataset(path, format_from_string(format));
          },
          py::arg("path"), py::arg("format") = "csv",
          "Load ml100k / ml100k-split / ml1m / csv ratings");
    m.def("write_ratings_csv",
          [](const std::string& path, const RatingMatrix& matrix) {
              write_ratings_csv(path, matrix);
          },
          py::arg("path"), py::arg("matrix"));

    m.def("split_folds", &split_folds, py::arg("matrix"), py::arg("k"), py::arg("seed"));
    m.def("mask_fold", &mask_fold, py::arg("matrix"), py::arg("folds"), py::arg("fold"));
    m.def("generate_synthetic",
          [](std::size_t n, std::size_t m_, std::pair<int, int> scale, std::uint64_t seed) {
              return generate_synthetic(n, m_, {scale.first, scale.second}, seed);
          },
          py::arg("n"), py::arg("m"), py::arg("scale") = std::pair<int, int>{1, 5},
          py::arg("seed") = 1);

    m.def("encode_entity",
          [](const RatingMatrix& matrix, const std::string& axis, std::size_t index) {
              return encode_entity(matrix, axis == "item" ? Axis::items : Axis::users, index);
          },
          py::arg("matrix"), py::arg("axis"), py::arg("index"));
    m.def("compressed_length",
          [](const std::string& data, const CompressorProfile& profile) {
              return compressed_length(profile, data);
          },
          py::arg("data"), py::arg("profile") = CompressorProfile{});
    m.def("compression_similarity",
          [](const std::string& x, const std::string& y, const CompressorProfile& profile) {
              return compression_similarity(profile, x, y);
          },
          py::arg("x"), py::arg("y"), py::arg("profile") = CompressorProfile{});
    m.def("kolmogorov_similarity",
          [](const std::string& x, const std::string& y, const CompressorProfile& profile) {
              return kolmogorov_similarity(profile, x, y);
          },
          py::arg("x"), py::arg("y"), py::arg("profile") = CompressorProfile{});

    m.def("build_similarity",
          [](const RatingMatrix& matrix, const std::string& axis, const std::string& measure,
             const CompressorProfile& profile, unsigned workers) {
              return build_similarity(matrix, axis == "item" ? Axis::items : Axis::users,
                                      measure_from_string(measure), profile, workers);
          },
          py::arg("matrix"), py::arg("axis"), py::arg("measure") = "ks",
          py::arg("profile") = CompressorProfile{}, py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());

    m.def("user_term", &user_term, py::arg("matrix"), py::arg("s_users"), py::arg("user"),
          py::arg("item"), py::arg("literal_denominator") = false);
    m.def("item_term", &item_term, py::arg("matrix"), py::arg("s_items"), py::arg("user"),
          py::arg("item"), py::arg("literal_denominator") = false);
    m.def("predict", &predict, py::arg("matrix"), py::arg("s_users"), py::arg("s_items"),
          py::arg("config"), py::arg("user"), py::arg("item"));
    m.def("complete_row", &complete_row, py::arg("matrix"), py::arg("s_users"),
          py::arg("s_items"), py::arg("config"), py::arg("user"));
    m.def("complete_matrix", &complete_matrix, py::arg("matrix"), py::arg("s_users"),
          py::arg("s_items"), py::arg("config"), py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("recommend_top_k", &recommend_top_k, py::arg("matrix"), py::arg("s_users"),
          py::arg("s_items"), py::arg("config"), py::arg("user"), py::arg("top_k"));

    m.def("rmse",
          [](const std::vector<RatedEntry>& truth,
             const std::map<std::pair<std::uint32_t, std::uint32_t>, double>& predicted) {
              std::unordered_map<std::uint64_t, double> map;
              for (const auto& [cell, score] : predicted)
                  map[FoldAssignment::key(cell.first, cell.second)] = score;
              return rmse(truth, map);
          },
          py::arg("truth"), py::arg("predicted"));

    m.def("cross_validate",
          [](const RatingMatrix& matrix, int k, std::uint64_t seed, const std::string& measure,
             double alpha, const CompressorProfile& profile, unsigned workers,
             const std::string& dataset_name) {
              EvalConfig config;
              config.measure = measure_from_string(measure);
              config.completion.alpha = alpha;
              config.profile = profile;
              config.workers = workers;
              config.dataset_name = dataset_name;
              return cross_validate(matrix, k, seed, config);
          },
          py::arg("matrix"), py::arg("k") = 5, py::arg("seed") = 1, py::arg("measure") = "ks",
          py::arg("alpha") = 0.5, py::arg("profile") = CompressorProfile{},
          py::arg("workers") = 1, py::arg("dataset_name") = "dataset",
          py::call_guard<py::gil_scoped_release>());

    m.def("baseline_predict",
          [](const RatingMatrix& matrix, const std::string& kind, std::size_t u, std::size_t o) {
              BaselineKind k = kind == "user_mean"   ? BaselineKind::user_mean
                               : kind == "item_mean" ? BaselineKind::item_mean
                                                     : BaselineKind::global_mean;
              return baseline_predict(matrix, k, u, o);
          },
          py::arg("matrix"), py::arg("kind"), py::arg("user"), py::arg("item"));

#ifdef KOLMAC_VERSION
    m.attr("__version__") = KOLMAC_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
