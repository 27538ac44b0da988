#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kolmac/folds.hpp"
#include "kolmac/rating_matrix.hpp"

namespace kolmac {

enum class DatasetFormat {
    ml100k_data,   // TAB-separated `user item rating timestamp`, one file
    ml100k_split,  // directory with the pre-made u{1..5}.base / u{1..5}.test files
    ml1m,          // `UserID::MovieID::Rating::Timestamp`
    csv,           // `user,item,rating`, header optional
};

/// A loaded matrix plus the raw-id <-> dense-index maps. Raw ids in the files
/// are compacted to 0-based indices by ascending raw id; user_ids[i] is the
/// raw id behind dense user index i.
struct Dataset {
    RatingMatrix matrix;
    std::vector<std::int64_t> user_ids;
    std::vector<std::int64_t> item_ids;
    /// Present for ml100k_split: fold f holds exactly the entries of u{f}.test.
    std::optional<FoldAssignment> predefined_folds;
    std::string name;
};

/// Loads a MovieLens file (or, for ml100k_split, the split directory).
/// Timestamps are parsed and discarded. Throws on malformed lines (with the
/// offending line number) and on ratings outside [1, 5].
Dataset load_movielens(const std::string& path, DatasetFormat format);

/// Generic `user,item,rating` loader. Skips an optional header line.
Dataset load_csv(const std::string& path, char delimiter = ',', RatingScale scale = {});

/// Dispatch helper used by the CLI.
Dataset load_dataset(const std::string& path, DatasetFormat format);

std::optional<DatasetFormat> parse_dataset_format(const std::string& name);

/// Triplet CSV `user,item,rating` with header, raw ids when provided.
void write_ratings_csv(const std::string& path, const RatingMatrix& m,
                       const std::vector<std::int64_t>* user_ids = nullptr,
                       const std::vector<std::int64_t>* item_ids = nullptr);

}  // namespace kolmac
