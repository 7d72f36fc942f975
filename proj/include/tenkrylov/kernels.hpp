#ifndef TENKRYLOV_KERNELS_HPP
#define TENKRYLOV_KERNELS_HPP

#include "tenkrylov/types.hpp"

namespace tenkrylov::kernels {

/// Execution policy for the contraction kernels. Every parallel kernel
/// partitions work over independent output elements and accumulates each
/// element in the same order as the serial reference, so Serial and Parallel
/// produce bit-identical results; Auto picks Parallel when OpenMP is
/// compiled in and TENKRYLOV_SERIAL is not set.
enum class Exec { Serial, Parallel, Auto };

bool parallel_available();
bool resolve_parallel(Exec exec);

/// out[i] = sum_{j,k} p[j] q[k] a(i,j,k)        (skip_mode == 1)
/// out[j] = sum_{k,i} p[k] q[i] a(i,j,k)        (skip_mode == 2)
/// out[k] = sum_{i,j} p[i] q[j] a(i,j,k)        (skip_mode == 3)
/// `vals` is the flat storage of a DenseTensor3 (first index fastest);
/// `out` must have length shape[skip_mode] and is overwritten.
void tenvec_dense(const Shape3& shape, const double* vals, int skip_mode,
                  const double* p, const double* q, double* out,
                  Exec exec = Exec::Auto);

/// out = A * t for a column-major A (rows x cols) and weight vector t.
void weighted_colsum(const Matrix& a, const Vector& t, double* out,
                     Exec exec = Exec::Auto);

/// out[i] = rowA(i,:) * T * rowB(i,:)^T, with T of shape (A.cols() x B.cols()).
void rowwise_bilinear(const Matrix& a, const Matrix& t, const Matrix& b,
                      double* out, Exec exec = Exec::Auto);

}  // namespace tenkrylov::kernels

#endif
