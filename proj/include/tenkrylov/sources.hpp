#ifndef TENKRYLOV_SOURCES_HPP
#define TENKRYLOV_SOURCES_HPP

#include "tenkrylov/kernels.hpp"
#include "tenkrylov/types.hpp"

#include <atomic>
#include <cstdint>
#include <memory>

namespace tenkrylov {

/// The sole tensor-access contract of every approximation algorithm:
/// mode sizes plus the tensor-by-vector-by-vector product.
///
/// tenvec contracts the two modes other than skip_mode, in cyclic order:
///   skip_mode 1: out_i = sum_{j,k} a(i,j,k) p_j q_k     (p on mode 2, q on mode 3)
///   skip_mode 2: out_j = sum_{k,i} a(i,j,k) p_k q_i     (p on mode 3, q on mode 1)
///   skip_mode 3: out_k = sum_{i,j} a(i,j,k) p_i q_j     (p on mode 1, q on mode 2)
/// The output has length shape()[skip_mode]; tenvec is bilinear in (p, q).
///
/// Sources are immutable after construction and safe for concurrent tenvec
/// calls.
class TenvecSource {
public:
    virtual ~TenvecSource() = default;

    virtual Shape3 shape() const = 0;
    virtual Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const = 0;

    /// Materializes the full tensor. Oracle/test support only; the
    /// approximation algorithms never call this.
    virtual DenseTensor3 densify() const = 0;

protected:
    /// Validates skip_mode and the two contracted lengths in cyclic order.
    void check_args(int skip_mode, const Vector& p, const Vector& q) const;
};

class DenseSource final : public TenvecSource {
public:
    explicit DenseSource(DenseTensor3 t, kernels::Exec exec = kernels::Exec::Auto)
        : tensor_(std::move(t)), exec_(exec) {}

    Shape3 shape() const override { return tensor_.shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override;
    DenseTensor3 densify() const override { return tensor_; }

    const DenseTensor3& tensor() const { return tensor_; }

private:
    DenseTensor3 tensor_;
    kernels::Exec exec_;
};

/// COO-backed source; tenvec costs O(nnz).
class SparseSource final : public TenvecSource {
public:
    explicit SparseSource(SparseTensor3 t) : tensor_(std::move(t)) {}

    Shape3 shape() const override { return tensor_.shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override;
    DenseTensor3 densify() const override;

    const SparseTensor3& tensor() const { return tensor_; }

private:
    SparseTensor3 tensor_;
};

/// Canonical-format source; tenvec costs O(nR) and never densifies.
class CanonicalSource final : public TenvecSource {
public:
    explicit CanonicalSource(CanonicalTensor t, kernels::Exec exec = kernels::Exec::Auto)
        : tensor_(std::move(t)), exec_(exec) {
        tensor_.validate();
    }

    Shape3 shape() const override { return tensor_.ambient_shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override;
    DenseTensor3 densify() const override;

    const CanonicalTensor& tensor() const { return tensor_; }

private:
    CanonicalTensor tensor_;
    kernels::Exec exec_;
};

/// Tucker-format source; tenvec costs O(nr + r^3) and never densifies.
class TuckerSource final : public TenvecSource {
public:
    explicit TuckerSource(TuckerTensor t) : tensor_(std::move(t)) { tensor_.validate(); }

    Shape3 shape() const override { return tensor_.ambient_shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override;
    DenseTensor3 densify() const override;

    const TuckerTensor& tensor() const { return tensor_; }

private:
    TuckerTensor tensor_;
};

/// Elementwise (Hadamard) product of two Tucker tensors, kept implicit: the
/// Kronecker-product core and the elementwise-product factors are never
/// materialized. A tenvec costs O(n r_a r_b + r^4) via crossed Gram
/// contractions of the two operands.
///
/// peak_temp_doubles() reports the largest total size of the per-call
/// temporaries seen so far, so tests can assert that nothing the size of the
/// product core (or the ambient tensor) was ever allocated.
class HadamardTuckerSource final : public TenvecSource {
public:
    HadamardTuckerSource(TuckerTensor a, TuckerTensor b,
                         kernels::Exec exec = kernels::Exec::Auto);

    Shape3 shape() const override { return a_.ambient_shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override;
    DenseTensor3 densify() const override;

    const TuckerTensor& left() const { return a_; }
    const TuckerTensor& right() const { return b_; }

    std::size_t peak_temp_doubles() const { return peak_temp_.load(); }
    /// Number of entries of the never-formed Kronecker core.
    std::size_t kron_core_entries() const;

private:
    TuckerTensor a_, b_;
    kernels::Exec exec_;
    mutable std::atomic<std::size_t> peak_temp_{0};
};

/// Transparent wrapper counting tenvec invocations; the counter is atomic so
/// concurrent calls stay monotone. Results are forwarded bit-identically.
class CountingSource final : public TenvecSource {
public:
    explicit CountingSource(const TenvecSource& inner) : inner_(inner) {}

    Shape3 shape() const override { return inner_.shape(); }
    Vector tenvec(int skip_mode, const Vector& p, const Vector& q) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return inner_.tenvec(skip_mode, p, q);
    }
    DenseTensor3 densify() const override { return inner_.densify(); }

    long read_count() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() const { count_.store(0, std::memory_order_relaxed); }

private:
    const TenvecSource& inner_;
    mutable std::atomic<long> count_{0};
};

inline CountingSource counted(const TenvecSource& src) { return CountingSource(src); }

}  // namespace tenkrylov

#endif
