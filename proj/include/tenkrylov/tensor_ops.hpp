#ifndef TENKRYLOV_TENSOR_OPS_HPP
#define TENKRYLOV_TENSOR_OPS_HPP

#include "tenkrylov/types.hpp"

#include <cstdint>

namespace tenkrylov {

class TenvecSource;

/// Mode-l unfolding with the cyclic column pairing:
///   mode 1: n1 x (n2*n3), entry (i, j + n2*k) = a(i,j,k)
///   mode 2: n2 x (n3*n1), entry (j, k + n3*i) = a(i,j,k)
///   mode 3: n3 x (n1*n2), entry (k, i + n1*j) = a(i,j,k)
/// The paired column index is linearized with the first-listed index fastest,
/// so unfold(t,1) * kron_pair(p,q) == tenvec of t at skip mode 1 with (p,q).
Matrix unfold(const DenseTensor3& t, int mode);

/// Inverse of unfold for the given mode and ambient shape; bit-exact
/// round-trip with unfold.
DenseTensor3 refold(const Matrix& m, int mode, Shape3 shape);

/// Long vector with entry p[a]*q[b] at position a + p.size()*b (first factor
/// fastest), matching the unfolding column linearization.
Vector kron_pair(const Vector& p, const Vector& q);

/// B = A x_mode M, e.g. mode 2: b(i,j,k) = sum_{j'} M(j,j') a(i,j',k).
/// Output replaces the mode size by M.rows().
DenseTensor3 mode_multiply(const DenseTensor3& t, int mode, const Matrix& m);

double frobenius_inner(const DenseTensor3& a, const DenseTensor3& b);
double frobenius_norm(const DenseTensor3& t);

/// Dense tensor G x1 U x2 V x3 W.
DenseTensor3 tucker_reconstruct(const TuckerTensor& t);

/// ||A - B||_F for two Tucker tensors of equal ambient shape, without
/// densification: per mode, the concatenated factors are orthogonalized by a
/// thin QR, both cores are projected into the joint basis and subtracted.
/// Exact up to roundoff; factors need not be orthonormal.
double tucker_residual_norm(const TuckerTensor& a, const TuckerTensor& b);

/// Lower bound on the spectral norm ||A||_2, obtained by running the
/// rank-(1,1,1) alternating maximization for `iters` sweeps from a seeded
/// random start.
double spectral_norm_estimate(const TenvecSource& src, int iters, std::uint64_t seed);

}  // namespace tenkrylov

#endif
