#ifndef TENKRYLOV_RNG_HPP
#define TENKRYLOV_RNG_HPP

#include "tenkrylov/types.hpp"

#include <cstdint>
#include <random>

namespace tenkrylov {

/// Every stochastic routine takes an explicit 64-bit seed; runs are
/// reproducible bit-for-bit on a given platform.
inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Decorrelated stream for a different role under the same user seed
/// (splitmix64 step). Reusing one seed verbatim for both a generator and an
/// algorithm would correlate start vectors with the generated factors.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Vector random_gaussian_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

inline Vector random_unit_vector(Index n, std::mt19937_64& rng) {
    Vector v = random_gaussian_vector(n, rng);
    double nrm = v.norm();
    while (nrm == 0.0) {  // astronomically unlikely
        v = random_gaussian_vector(n, rng);
        nrm = v.norm();
    }
    return v / nrm;
}

inline Matrix random_gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
    return m;
}

/// n x r matrix with orthonormal columns (thin QR of a Gaussian draw).
inline Matrix random_orthonormal(Index n, Index r, std::mt19937_64& rng) {
    Matrix g = random_gaussian_matrix(n, r, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, r);
    return q;
}

}  // namespace tenkrylov

#endif
