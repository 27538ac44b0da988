#include "kolmac/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "kolmac/random.hpp"

namespace kolmac {

std::vector<double> singular_values(const std::vector<double>& a, std::size_t rows,
                                    std::size_t cols) {
    if (a.size() != rows * cols) throw std::invalid_argument("matrix size mismatch");

    // Work on the side with fewer vectors.
    std::size_t n = rows, m = cols;
    std::vector<double> v;  // n vectors of dimension m
    if (rows <= cols) {
        v = a;
    } else {
        n = cols;
        m = rows;
        v.resize(a.size());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) v[j * m + i] = a[i * cols + j];
    }

    auto dot = [&](std::size_t i, std::size_t j) {
        double s = 0;
        const double* p = v.data() + i * m;
        const double* q = v.data() + j * m;
        for (std::size_t t = 0; t < m; ++t) s += p[t] * q[t];
        return s;
    };

    // Cyclic one-sided Jacobi: rotate row pairs until mutually orthogonal.
    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double aii = dot(i, i), ajj = dot(j, j), aij = dot(i, j);
                if (std::abs(aij) <= eps * std::sqrt(aii * ajj)) continue;
                rotated = true;
                double tau = (ajj - aii) / (2.0 * aij);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                double* p = v.data() + i * m;
                double* q = v.data() + j * m;
                for (std::size_t k = 0; k < m; ++k) {
                    double pi = p[k], qi = q[k];
                    p[k] = c * pi - s * qi;
                    q[k] = s * pi + c * qi;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(dot(i, i));
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

std::size_t numerical_rank(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                           double rel_tol) {
    std::vector<double> sigma = singular_values(a, rows, cols);
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    double threshold = rel_tol * sigma.front();
    return static_cast<std::size_t>(
        std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > threshold; }));
}

RatingMatrix generate_synthetic(std::size_t n, std::size_t m, RatingScale scale,
                                std::uint64_t seed) {
    if (n == 0 || m == 0) throw std::invalid_argument("matrix dimensions must be positive");
    if (n > m) throw std::invalid_argument("expected n <= m");

    std::mt19937_64 gen(seed);
    std::vector<double> dense(n * m);
    std::vector<RatedEntry> triplets;
    triplets.reserve(n * m);

    for (;;) {
        triplets.clear();
        for (std::uint32_t u = 0; u < n; ++u) {
            for (std::uint32_t o = 0; o < m; ++o) {
                int r = uniform_int(gen, scale.min, scale.max);
                // A 0 would collide with the absent sentinel; scales that
                // contain 0 skip it.
                while (r == kAbsentRating) r = uniform_int(gen, scale.min, scale.max);
                dense[u * m + o] = r;
                triplets.push_back({u, o, r});
            }
        }
        if (numerical_rank(dense, n, m) == n) break;
    }
    return RatingMatrix::from_triplets(triplets, n, m, scale);
}

}  // namespace kolmac
