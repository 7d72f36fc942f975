#ifndef TENKRYLOV_ORACLE_HPP
#define TENKRYLOV_ORACLE_HPP

#include "tenkrylov/sources.hpp"
#include "tenkrylov/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tenkrylov {

struct OracleConfig {
    std::array<Index, 3> ranks{1, 1, 1};
    int als_iterations = 10;
    int restarts = 10;
    std::uint64_t seed = 0;
};

/// Truncated higher-order SVD: factors are the top-r left singular vectors of
/// the three unfoldings, the core the projection of the tensor onto them.
/// Quasi-optimal baseline for desk-scale comparisons.
TuckerTensor hosvd(const DenseTensor3& t, std::array<Index, 3> ranks);

/// Alternating Tucker refinement through tenvecs: with two factors fixed, the
/// reduced tensor A x2 V^T x3 W^T is assembled from r2*r3 mode-1 fibres, its
/// unfolding's top-r1 left singular basis becomes the new factor and the
/// projection the new core; modes cycle. Costs 3 r^2 tenvecs per iteration
/// for cubic ranks; the residual is non-increasing per iteration. When an
/// unfolding's numerical rank falls below the target the mode rank shrinks
/// and a warning is appended.
TuckerTensor tucker_als(const TenvecSource& src, const TuckerTensor& init,
                        int iterations, std::vector<std::string>* warnings = nullptr);

/// Best rank-(1,1,1) over seeded restarts of the alternating maximization on
/// a dense tensor; ground truth for spectral estimates and pivot checks.
/// Intended for small tensors.
Rank1Result brute_rank1(const DenseTensor3& t, int restarts, int sweeps,
                        std::uint64_t seed);

}  // namespace tenkrylov

#endif
