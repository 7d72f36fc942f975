#ifndef TENKRYLOV_TENSOR_WEDDERBURN_HPP
#define TENKRYLOV_TENSOR_WEDDERBURN_HPP

#include "tenkrylov/report.hpp"
#include "tenkrylov/sources.hpp"
#include "tenkrylov/tensor_krylov.hpp"
#include "tenkrylov/types.hpp"

#include <cstdint>
#include <optional>

namespace tenkrylov {

/// Leading-vector selection rule of the Wedderburn elimination:
///   Wsvd   - alternating maximization of the orthogonal component (breakdown-free)
///   Wlnc   - power iteration on the newest slice (the error estimate doubles
///            as the next leading pair)
///   WsvdR  - Wsvd restricted to the spans of the other two mode bases
///   WlncR  - Wlnc restricted likewise; with the core assembled slice-by-slice
///            the maximization costs no extra tenvecs
enum class PivotStrategy { Wsvd, Wlnc, WsvdR, WlncR };

const char* to_string(PivotStrategy s);

struct StrategyConfig {
    PivotStrategy kind = PivotStrategy::Wsvd;
    int p_als = 3;
    int p_pow = 3;
};

struct PivotResult {
    Vector y, z;        // full-length leading vectors
    Vector yhat, zhat;  // restricted coordinates (restricted strategies only)
    double sigma = 0.0;
    long tenvecs = 0;
    bool degenerate = false;  // maximization value vanished: span exhausted
};

/// Leading pair maximizing ||(I - X X^T)(A y z)|| by p_als alternating sweeps;
/// with an empty X this is exactly the plain rank-(1,1,1) maximization.
PivotResult pivot_wsvd(const TenvecSource& src, const Matrix& X, int p_als,
                       std::uint64_t seed, int mode = 1);

/// Leading pair from p_pow power-iteration sweeps on the slice A x_mode x^T
/// (the vectors already computed for the error estimate).
PivotResult pivot_wlnc(const TenvecSource& src, const Vector& x, int p_pow,
                       std::uint64_t seed, int mode = 1);

/// Restricted leading pair: maximizes over the spans of Y and Z, i.e. solves
/// the same problem as the optimized minimal Krylov recursion step.
PivotResult pivot_wsvdr(const TenvecSource& src, const Matrix& X, const Matrix& Y,
                        const Matrix& Z, int p_als, std::uint64_t seed, int mode = 1);

struct SliceRank1 {
    Vector yhat, zhat;
    double sigma = 0.0;
};

/// Best rank-one approximation of a stored core slice (its top singular
/// triple); costs no tenvecs.
SliceRank1 pivot_wlncr(const Matrix& core_slice);

struct SubspaceResult {
    Matrix X;
    RunReport report;
};

/// Wedderburn elimination for one dominant mode subspace: each step chooses a
/// leading pair by the strategy, appends the orthogonalized direction
/// A y_k z_k, estimates the step error and stops when err <= eps * nrm or at
/// r_max columns. Breakdown is retried once with fresh random leading vectors,
/// then the current basis is returned. Restricted strategies require the two
/// other-mode bases (in cyclic order after `mode`); they stay fixed here.
SubspaceResult dominant_subspace(const TenvecSource& src, int mode,
                                 const StrategyConfig& strategy, double tol, double eps,
                                 int r_max, std::uint64_t seed,
                                 const Matrix* shared1 = nullptr,
                                 const Matrix* shared2 = nullptr);

/// G = A x1 U^T x2 V^T x3 W^T assembled from mode-1 fibres against all
/// (v_q, w_s) column pairs: cols(V)*cols(W) tenvecs. Bases must be
/// orthonormal (checked to 1e-8). Adds the tenvecs spent to *tenvec_count
/// when given.
DenseTensor3 compute_core(const TenvecSource& src, const Matrix& U, const Matrix& V,
                          const Matrix& W, long* tenvec_count = nullptr);

struct WlncrConfig {
    std::array<int, 3> r_max{1, 1, 1};
    double tol = 1e-12;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    bool retry_on_breakdown = false;
};

struct TuckerApproxResult {
    TuckerTensor tucker;
    RunReport report;
};

/// Integrated Wedderburn drive with restricted Lanczos-like pivoting: the
/// core grows slice-by-slice with the bases and the newest slice's top
/// singular triple selects the next leading pair, so pivoting costs no
/// tenvecs. Core slabs are assembled from cached cross-basis fibres
/// A(y_q)(z_s), one tenvec per (q, s) pair over the whole run; a balanced
/// rank-r run spends r^2 + 3r tenvecs (plus one probe per mode when a
/// breakdown ends the growth). err is the Frobenius norm of the newest slab
/// and nrm^2 accumulates the slab energies, so nrm tracks ||G||_F exactly.
TuckerApproxResult wlncr_drive(const TenvecSource& src, const Vector& u0,
                               const Vector& v0, const Vector& w0,
                               const WlncrConfig& cfg);

struct ApproxConfig {
    StrategyConfig strategy;
    double tol = 1e-12;
    double eps = 1e-8;
    std::array<int, 3> r_max{1, 1, 1};
    std::uint64_t seed = 0;
    /// Default: Wsvd/Wlnc retry a breakdown once; restricted strategies drop
    /// the mode flag.
    std::optional<bool> retry_on_breakdown;
    /// Optional explicit start vectors (unit); seeded random otherwise.
    std::optional<Vector> start_u, start_v, start_w;
};

/// Top-level driver: Wsvd/Wlnc run three independent dominant-subspace
/// eliminations followed by compute_core; WsvdR runs the interleaved
/// restricted drive (the optimized minimal Krylov recursion) followed by
/// compute_core; WlncR runs the integrated drive with the core grown in
/// process.
TuckerApproxResult tucker_approximate(const TenvecSource& src, const ApproxConfig& cfg);

}  // namespace tenkrylov

#endif
