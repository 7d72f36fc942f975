#ifndef TENKRYLOV_TENSOR_KRYLOV_HPP
#define TENKRYLOV_TENSOR_KRYLOV_HPP

#include "tenkrylov/report.hpp"
#include "tenkrylov/sources.hpp"
#include "tenkrylov/types.hpp"

#include <cstdint>

namespace tenkrylov {

/// Alternating rank-(1,1,1) maximization: exactly `sweeps` cyclic updates
/// u := A v w, v := A w u, w := A u v with normalization; sigma is the last
/// normalization value and is non-decreasing across sweeps. A vanishing
/// iterate (zero tensor) returns sigma = 0.
Rank1Result als_rank1(const TenvecSource& src, const Vector& v0, const Vector& w0,
                      int sweeps);

/// Power iteration on the slice matrix A x_mode x^T: alternates
/// y := A z x, z := A x y (mode-1 labelling; other modes by cyclic
/// relabelling) for `sweeps` rounds from start z0. sigma converges to the
/// largest singular value of the slice; the result carries x on the given
/// mode and (y, z) on the two cyclic successors.
Rank1Result power_rank1_slice(const TenvecSource& src, int mode, const Vector& x,
                              const Vector& z0, int sweeps);

struct KrylovResult {
    std::array<Matrix, 3> bases;  // U, V, W with orthonormal columns
    RunReport report;
};

/// Minimal Krylov recursion: w1 := A u1 v1 normalized, then each of the r
/// iterations generates one new vector per mode from the latest vectors of
/// the other two modes, orthogonalized against its basis (3r + 1 tenvecs,
/// bases of r + 1 columns when nothing stalls). The whole recursion stops at
/// the first breakdown, reporting the stalled mode and the index of the
/// vector that failed; on an exact rank-r tensor the mode-3 basis fills up
/// during iteration r, so such runs end in a mode-3 breakdown at step r + 1
/// with the mode spaces fully captured.
KrylovResult mkr(const TenvecSource& src, const Vector& u1, const Vector& v1, int r,
                 double tol = 1e-12);

struct OptMkrConfig {
    std::array<int, 3> r_max{1, 1, 1};
    double tol = 1e-12;
    double eps = 0.0;  // 0 disables the accuracy stop; Alg. listing stops on flags only
    int p_als = 3;
    std::uint64_t seed = 0;
    bool retry_on_breakdown = false;
};

/// Optimized minimal Krylov recursion: per active mode, the leading pair is
/// the alternating maximizer of ||B vhat what|| over the current restricted
/// tensor B = A x_m (I - X X^T) x_m1 Y^T x_m2 Z^T (p_als sweeps, each costing
/// one tenvec of A), the new direction is appended or the mode flag is
/// dropped on breakdown. Identical to the Wedderburn process with the
/// restricted SVD-like pivoting strategy; both entry points share one
/// implementation.
KrylovResult optimized_mkr(const TenvecSource& src, const Vector& u1, const Vector& v1,
                           const OptMkrConfig& cfg);

namespace detail {

struct RestrictedAlsResult {
    double sigma = 0.0;        // last half-step normalization value
    double sigma_first = 0.0;  // first half-step value (degeneracy probe)
    Vector target;             // unit vector along the target mode
    Vector vhat, what;         // coordinates on the two cyclic successor modes
    long tenvecs = 0;
    bool degenerate = false;
};

/// Shared alternating-maximization engine over the restricted tensor
/// B = A x_t (I - X X^T) x_t1 R1^T x_t2 R2^T; any of X, R1, R2 may be null
/// (no projection / no restriction). v0 and w0 are unit start coordinates in
/// the restricted spaces. Aborts early (degenerate) when a half-step norm
/// falls below `degenerate_threshold`.
RestrictedAlsResult restricted_als(const TenvecSource& src, int target_mode,
                                   const Matrix* X, Index x_cols, const Matrix* R1,
                                   Index r1_cols, const Matrix* R2, Index r2_cols,
                                   Vector v0, Vector w0, int sweeps,
                                   double degenerate_threshold);

}  // namespace detail

}  // namespace tenkrylov

#endif
