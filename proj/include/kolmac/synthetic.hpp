#pragma once

#include <cstdint>
#include <vector>

#include "kolmac/rating_matrix.hpp"

namespace kolmac {

/// Singular values of a dense row-major `rows x cols` matrix, descending.
/// One-sided Jacobi; intended for the small matrices of the synthetic
/// benchmark, not for large inputs.
std::vector<double> singular_values(const std::vector<double>& a, std::size_t rows,
                                    std::size_t cols);

/// Count of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                           double rel_tol = 1e-9);

/// Fully-observed n x m matrix (n <= m) with i.i.d. uniform integer entries,
/// resampled until the numerical rank equals n. Deterministic per seed.
RatingMatrix generate_synthetic(std::size_t n, std::size_t m, RatingScale scale,
                                std::uint64_t seed);

}  // namespace kolmac
