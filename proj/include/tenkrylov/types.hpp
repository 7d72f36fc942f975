#ifndef TENKRYLOV_TYPES_HPP
#define TENKRYLOV_TYPES_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tenkrylov {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;  // column-major
using Vector = Eigen::VectorXd;

/// Mode indices are 1-based throughout (modes 1, 2, 3).
/// cyclic_succ(1) == 2, cyclic_succ(3) == 1.
constexpr int cyclic_succ(int mode) { return mode % 3 + 1; }
constexpr int cyclic_pred(int mode) { return (mode + 1) % 3 + 1; }

inline void require_mode(int mode) {
    if (mode < 1 || mode > 3) throw std::invalid_argument("mode must be 1, 2 or 3");
}

struct Shape3 {
    Index n1 = 0, n2 = 0, n3 = 0;

    Index operator[](int mode) const {
        require_mode(mode);
        return mode == 1 ? n1 : (mode == 2 ? n2 : n3);
    }
    Index count() const { return n1 * n2 * n3; }
    bool operator==(const Shape3&) const = default;
};

/// Dense 3-tensor with entries a(i,j,k) stored flat at i + n1*j + n1*n2*k
/// (first index fastest). All entries are finite doubles.
class DenseTensor3 {
public:
    DenseTensor3() = default;

    DenseTensor3(Index n1, Index n2, Index n3)
        : shape_{n1, n2, n3}, values_(static_cast<size_t>(n1 * n2 * n3), 0.0) {
        check_shape();
    }

    DenseTensor3(Shape3 shape, std::vector<double> values)
        : shape_(shape), values_(std::move(values)) {
        check_shape();
        if (values_.size() != static_cast<size_t>(shape_.count()))
            throw std::invalid_argument("DenseTensor3: value count does not match shape");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("DenseTensor3: non-finite entry");
    }

    Shape3 shape() const { return shape_; }
    Index n1() const { return shape_.n1; }
    Index n2() const { return shape_.n2; }
    Index n3() const { return shape_.n3; }
    Index size() const { return shape_.count(); }

    double operator()(Index i, Index j, Index k) const {
        return values_[static_cast<size_t>(i + shape_.n1 * (j + shape_.n2 * k))];
    }
    double& operator()(Index i, Index j, Index k) {
        return values_[static_cast<size_t>(i + shape_.n1 * (j + shape_.n2 * k))];
    }

    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }
    const std::vector<double>& values() const { return values_; }

private:
    void check_shape() const {
        // zero sizes are allowed so a rank-0 Tucker core stays representable
        if (shape_.n1 < 0 || shape_.n2 < 0 || shape_.n3 < 0)
            throw std::invalid_argument("DenseTensor3: mode sizes must be nonnegative");
    }

    Shape3 shape_;
    std::vector<double> values_;
};

/// Tucker-format tensor: core of shape (r1,r2,r3) plus factor matrices of
/// shapes n_l x r_l. A factor flagged orthonormal has orthonormal columns
/// (checked to 1e-12 by validate()).
struct TuckerTensor {
    DenseTensor3 core;
    std::array<Matrix, 3> factors;
    std::array<bool, 3> orthonormal{false, false, false};

    Shape3 ambient_shape() const {
        return {factors[0].rows(), factors[1].rows(), factors[2].rows()};
    }
    std::array<Index, 3> ranks() const {
        return {core.n1(), core.n2(), core.n3()};
    }

    void validate() const {
        const std::array<Index, 3> r = ranks();
        for (int l = 0; l < 3; ++l) {
            if (factors[l].cols() != r[l])
                throw std::invalid_argument("TuckerTensor: factor/core rank mismatch");
            if (r[l] > factors[l].rows())
                throw std::invalid_argument("TuckerTensor: rank exceeds mode size");
            if (orthonormal[l]) {
                const Matrix gram = factors[l].transpose() * factors[l];
                const double dev =
                    (gram - Matrix::Identity(r[l], r[l])).cwiseAbs().maxCoeff();
                if (dev > 1e-12)
                    throw std::invalid_argument("TuckerTensor: factor flagged orthonormal is not");
            }
        }
    }
};

/// Canonical (CP) format: sum of R rank-1 terms; factors hold the term
/// vectors as columns (n_l x R each).
struct CanonicalTensor {
    std::array<Matrix, 3> factors;

    Index rank() const { return factors[0].cols(); }
    Shape3 ambient_shape() const {
        return {factors[0].rows(), factors[1].rows(), factors[2].rows()};
    }

    void validate() const {
        if (factors[1].cols() != rank() || factors[2].cols() != rank())
            throw std::invalid_argument("CanonicalTensor: factor column counts differ");
    }
};

/// COO sparse 3-tensor, 0-based indices. Duplicate (i,j,k) entries are summed
/// on construction.
class SparseTensor3 {
public:
    struct Entry {
        Index i, j, k;
        double value;
    };

    SparseTensor3(Shape3 shape, std::vector<Entry> entries);

    Shape3 shape() const { return shape_; }
    Index nnz() const { return static_cast<Index>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    Shape3 shape_;
    std::vector<Entry> entries_;
};

struct Rank1Result {
    double sigma = 0.0;
    Vector u, v, w;  // unit vectors, one per mode
};

}  // namespace tenkrylov

#endif
