#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "kolmac/similarity.hpp"

namespace kolmac {

/// Content hash of a rating matrix (dimensions, scale, every entry).
std::uint64_t dataset_hash(const RatingMatrix& m);

/// Cache file stem for one (dataset, axis, measure, profile) combination.
std::string similarity_cache_key(std::uint64_t dataset_hash, Axis axis, Measure measure,
                                 const CompressorProfile& profile);

/// Reads a cached matrix back; nullopt when the file is missing or was
/// written for a different key.
std::optional<SimilarityMatrix> load_cached_similarity(const std::string& cache_dir,
                                                       std::uint64_t dataset_hash, Axis axis,
                                                       Measure measure,
                                                       const CompressorProfile& profile);

void store_cached_similarity(const std::string& cache_dir, std::uint64_t dataset_hash,
                             const CompressorProfile& profile, Measure measure,
                             const SimilarityMatrix& sim);

/// build_similarity with a read-through cache. CS builds on real datasets are
/// expensive and reusable across alpha sweeps, so the CLI funnels through
/// this. An empty cache_dir disables caching.
SimilarityMatrix build_similarity_cached(const RatingMatrix& m, Axis axis, Measure measure,
                                         const CompressorProfile& profile, unsigned workers,
                                         const std::string& cache_dir,
                                         SimBuildStats* stats = nullptr);

/// Dense CSV dump; the header row carries the entity ids.
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim,
                          const std::vector<std::int64_t>* ids = nullptr);

}  // namespace kolmac
