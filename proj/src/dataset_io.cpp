#include "kolmac/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace kolmac {

namespace {

struct RawTriplet {
    std::int64_t user;
    std::int64_t item;
    int rating;
};

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_int(std::string_view field, const std::string& path, std::size_t line_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(path, line_no, "expected integer, got '" + std::string(field) + "'");
    return value;
}

// Splits on a single-char or "::" separator; `fields` is reused across lines.
void split_line(std::string_view line, std::string_view sep, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            return;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

void read_triplet_file(const std::string& path, std::string_view sep, std::size_t expected_fields,
                       RatingScale scale, std::vector<RawTriplet>& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    std::vector<std::string_view> fields;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_line(line, sep, fields);
        if (fields.size() != expected_fields)
            parse_fail(path, line_no,
                       "expected " + std::to_string(expected_fields) + " fields, got " +
                           std::to_string(fields.size()));
        RawTriplet t;
        t.user = parse_int(fields[0], path, line_no);
        t.item = parse_int(fields[1], path, line_no);
        std::int64_t rating = parse_int(fields[2], path, line_no);
        if (rating < scale.min || rating > scale.max)
            parse_fail(path, line_no,
                       "rating " + std::to_string(rating) + " outside [" +
                           std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]");
        t.rating = static_cast<int>(rating);
        out.push_back(t);
        // fields[3], when present, is the timestamp; discarded.
    }
}

// Dense indices by ascending raw id.
std::vector<std::int64_t> compact_ids(std::vector<std::int64_t> ids,
                                      std::unordered_map<std::int64_t, std::uint32_t>& index_of) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    index_of.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) index_of[ids[i]] = static_cast<std::uint32_t>(i);
    return ids;
}

Dataset assemble(std::vector<RawTriplet>& raw, RatingScale scale, std::string name,
                 std::unordered_map<std::int64_t, std::uint32_t>* user_index_out = nullptr,
                 std::unordered_map<std::int64_t, std::uint32_t>* item_index_out = nullptr) {
    std::vector<std::int64_t> users, items;
    users.reserve(raw.size());
    items.reserve(raw.size());
    for (const RawTriplet& t : raw) {
        users.push_back(t.user);
        items.push_back(t.item);
    }
    std::unordered_map<std::int64_t, std::uint32_t> user_index, item_index;
    Dataset ds;
    ds.user_ids = compact_ids(std::move(users), user_index);
    ds.item_ids = compact_ids(std::move(items), item_index);

    std::vector<RatedEntry> triplets;
    triplets.reserve(raw.size());
    for (const RawTriplet& t : raw)
        triplets.push_back({user_index[t.user], item_index[t.item], t.rating});
    ds.matrix = RatingMatrix::from_triplets(triplets, ds.user_ids.size(), ds.item_ids.size(), scale);
    ds.name = std::move(name);
    if (user_index_out) *user_index_out = std::move(user_index);
    if (item_index_out) *item_index_out = std::move(item_index);
    return ds;
}

Dataset load_ml100k_split_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    const RatingScale scale{1, 5};
    constexpr int kFolds = 5;

    // The five test files partition the full rating set; their union rebuilds
    // the matrix and each file becomes one fold.
    std::vector<RawTriplet> all;
    std::vector<std::vector<RawTriplet>> test_parts(kFolds);
    for (int f = 0; f < kFolds; ++f) {
        std::string test = (fs::path(dir) / ("u" + std::to_string(f + 1) + ".test")).string();
        read_triplet_file(test, "\t", 4, scale, test_parts[f]);
        for (const RawTriplet& t : test_parts[f]) all.push_back(t);
    }

    std::unordered_map<std::int64_t, std::uint32_t> user_index, item_index;
    Dataset ds;
    try {
        ds = assemble(all, scale, "ml-100k", &user_index, &item_index);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("ml-100k split files do not partition the ratings: ") +
                                 e.what());
    }

    FoldAssignment fa;
    fa.k = kFolds;
    fa.assignment.reserve(all.size());
    for (int f = 0; f < kFolds; ++f)
        for (const RawTriplet& t : test_parts[f])
            fa.assignment.emplace(FoldAssignment::key(user_index.at(t.user), item_index.at(t.item)),
                                  f + 1);

    // Each base file must be exactly the complement of its test file.
    std::unordered_map<std::uint64_t, int> rating_of;
    rating_of.reserve(all.size());
    for (const RawTriplet& t : all)
        rating_of.emplace(FoldAssignment::key(user_index.at(t.user), item_index.at(t.item)),
                          t.rating);
    for (int f = 0; f < kFolds; ++f) {
        std::string base = (fs::path(dir) / ("u" + std::to_string(f + 1) + ".base")).string();
        std::vector<RawTriplet> base_part;
        read_triplet_file(base, "\t", 4, scale, base_part);
        if (base_part.size() + test_parts[f].size() != all.size())
            throw std::runtime_error(base + ": base + test sizes do not cover the dataset");
        for (const RawTriplet& t : base_part) {
            auto u = user_index.find(t.user);
            auto o = item_index.find(t.item);
            if (u == user_index.end() || o == item_index.end())
                throw std::runtime_error(base + ": entry absent from the union of test folds");
            std::uint64_t key = FoldAssignment::key(u->second, o->second);
            auto r = rating_of.find(key);
            if (r == rating_of.end() || r->second != t.rating)
                throw std::runtime_error(base + ": rating disagrees with the test folds");
            if (fa.assignment.at(key) == f + 1)
                throw std::runtime_error(base + ": entry also present in u" + std::to_string(f + 1) +
                                         ".test");
        }
    }

    ds.predefined_folds = std::move(fa);
    return ds;
}

}  // namespace

Dataset load_movielens(const std::string& path, DatasetFormat format) {
    const RatingScale scale{1, 5};
    std::vector<RawTriplet> raw;
    switch (format) {
        case DatasetFormat::ml100k_data:
            read_triplet_file(path, "\t", 4, scale, raw);
            return assemble(raw, scale, "ml-100k");
        case DatasetFormat::ml1m:
            read_triplet_file(path, "::", 4, scale, raw);
            return assemble(raw, scale, "ml-1m");
        case DatasetFormat::ml100k_split:
            return load_ml100k_split_dir(path);
        case DatasetFormat::csv:
            return load_csv(path);
    }
    throw std::logic_error("unreachable dataset format");
}

Dataset load_csv(const std::string& path, char delimiter, RatingScale scale) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    std::vector<std::string_view> fields;
    std::vector<RawTriplet> raw;
    const std::string sep(1, delimiter);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_line(line, sep, fields);
        if (line_no == 1 && !fields.empty() &&
            fields[0].find_first_not_of("-0123456789") != std::string_view::npos)
            continue;  // header
        if (fields.size() != 3)
            parse_fail(path, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        RawTriplet t;
        t.user = parse_int(fields[0], path, line_no);
        t.item = parse_int(fields[1], path, line_no);
        std::int64_t rating = parse_int(fields[2], path, line_no);
        if (rating < scale.min || rating > scale.max)
            parse_fail(path, line_no,
                       "rating " + std::to_string(rating) + " outside [" +
                           std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]");
        t.rating = static_cast<int>(rating);
        raw.push_back(t);
    }
    return assemble(raw, scale, std::filesystem::path(path).stem().string());
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    if (format == DatasetFormat::csv) return load_csv(path);
    return load_movielens(path, format);
}

std::optional<DatasetFormat> parse_dataset_format(const std::string& name) {
    if (name == "ml100k" || name == "ml100k-data") return DatasetFormat::ml100k_data;
    if (name == "ml100k-split") return DatasetFormat::ml100k_split;
    if (name == "ml1m") return DatasetFormat::ml1m;
    if (name == "csv") return DatasetFormat::csv;
    return std::nullopt;
}

void write_ratings_csv(const std::string& path, const RatingMatrix& m,
                       const std::vector<std::int64_t>* user_ids,
                       const std::vector<std::int64_t>* item_ids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "user,item,rating\n";
    for (std::uint32_t u = 0; u < m.n_users(); ++u) {
        for (const Entry& e : m.row(u)) {
            std::int64_t uid = user_ids ? (*user_ids)[u] : u;
            std::int64_t oid = item_ids ? (*item_ids)[e.index] : e.index;
            out << uid << ',' << oid << ',' << e.rating << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace kolmac
