#ifndef TENKRYLOV_MATRIX_WEDDERBURN_HPP
#define TENKRYLOV_MATRIX_WEDDERBURN_HPP

#include "tenkrylov/report.hpp"
#include "tenkrylov/types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace tenkrylov {

/// Matrix given only through products with vectors.
/// Implementations must tolerate concurrent apply calls.
class MatvecSource {
public:
    virtual ~MatvecSource() = default;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    virtual Vector apply(const Vector& x) const = 0;            // A x
    virtual Vector apply_transpose(const Vector& y) const = 0;  // A^T y
};

class DenseMatvec final : public MatvecSource {
public:
    explicit DenseMatvec(Matrix a) : a_(std::move(a)) {}
    Index rows() const override { return a_.rows(); }
    Index cols() const override { return a_.cols(); }
    Vector apply(const Vector& x) const override { return a_ * x; }
    Vector apply_transpose(const Vector& y) const override { return a_.transpose() * y; }
    const Matrix& matrix() const { return a_; }

private:
    Matrix a_;
};

/// View of the transposed operator; row pivoting runs as column pivoting on
/// this adaptor.
class TransposedMatvec final : public MatvecSource {
public:
    explicit TransposedMatvec(const MatvecSource& inner) : inner_(inner) {}
    Index rows() const override { return inner_.cols(); }
    Index cols() const override { return inner_.rows(); }
    Vector apply(const Vector& x) const override { return inner_.apply_transpose(x); }
    Vector apply_transpose(const Vector& y) const override { return inner_.apply(y); }

private:
    const MatvecSource& inner_;
};

/// Single Wedderburn rank-reduction update B = A - (A y x^T A) / (x^T A y);
/// rank(B) == rank(A) - 1. Throws when |x^T A y| is negligible relative to
/// ||A||_F ||x|| ||y|| (singular pivot).
Matrix wedderburn_update(const Matrix& a, const Vector& x, const Vector& y);

/// For a fixed leading vector y, the pivot x minimizing the Frobenius norm of
/// the Wedderburn update: x_opt = A y / ||A y||. Throws when A y == 0.
Vector optimal_pivot(const MatvecSource& a, const Vector& y);

/// Rule that selects the unit leading vector y_k at each step.
struct LeadingVectorPolicy {
    std::function<Vector(int step, Index n, std::mt19937_64& rng)> next;

    /// Fresh random unit vector every step.
    static LeadingVectorPolicy random();
};

/// State and outcome of a pivoted Wedderburn elimination run. The low-rank
/// approximation is X * B^T with X orthonormal and B = A^T X. Y keeps the
/// chosen unit leading vectors, omegas the pivot values x_k^T A_{k-1} y_k
/// (equal to the orthogonal-component norms).
struct MatrixWedderburnState {
    Matrix X, B, Y;
    std::vector<double> omegas;
    double nrm = 0.0, err = 0.0;
    Termination terminated = Termination::converged;
    int steps = 0;
};

/// Wedderburn elimination with column pivoting: at each step a unit leading
/// vector y_k is chosen by the policy, x_k is the normalized component of
/// A y_k orthogonal to the accumulated basis, and b_k = A^T x_k extends the
/// approximation. Stops when err <= eps * nrm, on breakdown
/// (||x'|| < tol ||x||, retried once with a fresh random leading vector), or
/// at r_max columns.
MatrixWedderburnState wcp_approximate(const MatvecSource& a,
                                      const LeadingVectorPolicy& leading, double tol,
                                      double eps, int r_max, std::uint64_t seed);

struct LanczosResult {
    Matrix X, Y;  // orthonormal bases; X^T A Y is upper bidiagonal
    std::vector<double> alphas;  // alphas[0] = ||A^T x0||; coefficients of the y-recurrence
    std::vector<double> betas;   // coefficients of the x-recurrence (diagonal of X^T A Y)
    bool breakdown = false;
    int steps = 0;
};

/// Lanczos (Golub-Kahan) bidiagonalization driven from the start vector x0:
/// y_1 = A^T x0 / ||A^T x0||, x_1 = A y_1 / ||A y_1||, then the alternating
/// two-term recurrences with full reorthogonalization against the accumulated
/// bases. The start vector seeds the process and is not a basis column, so
/// span X_k is the Krylov space of A A^T generated from A A^T x0. Breakdown
/// (a recurrence norm below 1e-14 times the largest coefficient seen) returns
/// the truncated balanced bases.
LanczosResult lanczos_bidiag(const MatvecSource& a, const Vector& x0, int steps);

/// WCP with the Lanczos-like selection of the leading vector,
/// y_{k+1} = A^T x_k / ||A^T x_k||: the two-term orthogonalization recurrence
/// is used as the first pass, followed by one classical Gram-Schmidt safeguard
/// sweep against the full basis. The approximation accumulates as
/// sum_k x_k (A^T x_k)^T, i.e. X B^T in the returned state. On breakdown the
/// previous approximation is returned.
MatrixWedderburnState wcp_lanczos(const MatvecSource& a, const Vector& y1, double tol,
                                  double eps, int r_max);

}  // namespace tenkrylov

#endif
