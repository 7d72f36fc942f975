#include "tenkrylov/sources.hpp"

#include "tenkrylov/tensor_ops.hpp"

#include <algorithm>

namespace tenkrylov {

SparseTensor3::SparseTensor3(Shape3 shape, std::vector<Entry> entries)
    : shape_(shape) {
    if (shape.n1 <= 0 || shape.n2 <= 0 || shape.n3 <= 0)
        throw std::invalid_argument("SparseTensor3: mode sizes must be positive");
    for (const Entry& e : entries) {
        if (e.i < 0 || e.i >= shape.n1 || e.j < 0 || e.j >= shape.n2 || e.k < 0 ||
            e.k >= shape.n3)
            throw std::invalid_argument("SparseTensor3: index out of range");
        if (!std::isfinite(e.value))
            throw std::invalid_argument("SparseTensor3: non-finite entry");
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.k, a.j, a.i) < std::tie(b.k, b.j, b.i);
    });
    // duplicates summed on load
    entries_.reserve(entries.size());
    for (const Entry& e : entries) {
        if (!entries_.empty() && entries_.back().i == e.i && entries_.back().j == e.j &&
            entries_.back().k == e.k)
            entries_.back().value += e.value;
        else
            entries_.push_back(e);
    }
}

void TenvecSource::check_args(int skip_mode, const Vector& p, const Vector& q) const {
    require_mode(skip_mode);
    const Shape3 s = shape();
    if (p.size() != s[cyclic_succ(skip_mode)] ||
        q.size() != s[cyclic_succ(cyclic_succ(skip_mode))])
        throw std::invalid_argument("tenvec: contracted vector length mismatch");
}

Vector DenseSource::tenvec(int skip_mode, const Vector& p, const Vector& q) const {
    check_args(skip_mode, p, q);
    Vector out(shape()[skip_mode]);
    kernels::tenvec_dense(tensor_.shape(), tensor_.data(), skip_mode, p.data(), q.data(),
                          out.data(), exec_);
    return out;
}

Vector SparseSource::tenvec(int skip_mode, const Vector& p, const Vector& q) const {
    check_args(skip_mode, p, q);
    Vector out = Vector::Zero(shape()[skip_mode]);
    for (const auto& e : tensor_.entries()) {
        switch (skip_mode) {
            case 1: out[e.i] += e.value * p[e.j] * q[e.k]; break;
            case 2: out[e.j] += e.value * p[e.k] * q[e.i]; break;
            default: out[e.k] += e.value * p[e.i] * q[e.j]; break;
        }
    }
    return out;
}

DenseTensor3 SparseSource::densify() const {
    const Shape3 s = shape();
    DenseTensor3 t(s.n1, s.n2, s.n3);
    for (const auto& e : tensor_.entries()) t(e.i, e.j, e.k) += e.value;
    return t;
}

Vector CanonicalSource::tenvec(int skip_mode, const Vector& p, const Vector& q) const {
    check_args(skip_mode, p, q);
    const Matrix& fm = tensor_.factors[skip_mode - 1];
    const Matrix& f1 = tensor_.factors[cyclic_succ(skip_mode) - 1];
    const Matrix& f2 = tensor_.factors[cyclic_succ(cyclic_succ(skip_mode)) - 1];
    const Index r = tensor_.rank();
    Vector out = Vector::Zero(fm.rows());
    if (r == 0) return out;
    Vector t(r);
    for (Index s = 0; s < r; ++s) t[s] = f1.col(s).dot(p) * f2.col(s).dot(q);
    kernels::weighted_colsum(fm, t, out.data(), exec_);
    return out;
}

DenseTensor3 CanonicalSource::densify() const {
    const Shape3 s = shape();
    DenseTensor3 t(s.n1, s.n2, s.n3);
    const auto& f = tensor_.factors;
    for (Index term = 0; term < tensor_.rank(); ++term)
        for (Index k = 0; k < s.n3; ++k)
            for (Index j = 0; j < s.n2; ++j)
                for (Index i = 0; i < s.n1; ++i)
                    t(i, j, k) += f[0](i, term) * f[1](j, term) * f[2](k, term);
    return t;
}

Vector TuckerSource::tenvec(int skip_mode, const Vector& p, const Vector& q) const {
    check_args(skip_mode, p, q);
    const Matrix& fm = tensor_.factors[skip_mode - 1];
    const Matrix& f1 = tensor_.factors[cyclic_succ(skip_mode) - 1];
    const Matrix& f2 = tensor_.factors[cyclic_succ(cyclic_succ(skip_mode)) - 1];
    const Vector a = f1.transpose() * p;
    const Vector b = f2.transpose() * q;
    Vector g(tensor_.core.shape()[skip_mode]);
    kernels::tenvec_dense(tensor_.core.shape(), tensor_.core.data(), skip_mode, a.data(),
                          b.data(), g.data(), kernels::Exec::Serial);
    return fm * g;
}

DenseTensor3 TuckerSource::densify() const { return tucker_reconstruct(tensor_); }

namespace {

// Copies the core with the given mode first and the remaining modes in
// cyclic order: out(a,b,c) holds the entry whose (mode, succ, succ^2)
// indices are (a,b,c).
DenseTensor3 cyclic_front(const DenseTensor3& g, int mode) {
    if (mode == 1) return g;
    const Shape3 s = g.shape();
    if (mode == 2) {
        DenseTensor3 out(s.n2, s.n3, s.n1);
        for (Index k = 0; k < s.n3; ++k)
            for (Index j = 0; j < s.n2; ++j)
                for (Index i = 0; i < s.n1; ++i) out(j, k, i) = g(i, j, k);
        return out;
    }
    DenseTensor3 out(s.n3, s.n1, s.n2);
    for (Index k = 0; k < s.n3; ++k)
        for (Index j = 0; j < s.n2; ++j)
            for (Index i = 0; i < s.n1; ++i) out(k, i, j) = g(i, j, k);
    return out;
}

}  // namespace

HadamardTuckerSource::HadamardTuckerSource(TuckerTensor a, TuckerTensor b,
                                           kernels::Exec exec)
    : a_(std::move(a)), b_(std::move(b)), exec_(exec) {
    a_.validate();
    b_.validate();
    if (!(a_.ambient_shape() == b_.ambient_shape()))
        throw std::invalid_argument("HadamardTuckerSource: ambient shape mismatch");
}

std::size_t HadamardTuckerSource::kron_core_entries() const {
    const auto ra = a_.ranks();
    const auto rb = b_.ranks();
    return static_cast<std::size_t>(ra[0] * rb[0]) * static_cast<std::size_t>(ra[1] * rb[1]) *
           static_cast<std::size_t>(ra[2] * rb[2]);
}

Vector HadamardTuckerSource::tenvec(int skip_mode, const Vector& p, const Vector& q) const {
    check_args(skip_mode, p, q);
    const int m1 = cyclic_succ(skip_mode), m2 = cyclic_succ(m1);
    const Matrix& fa_m = a_.factors[skip_mode - 1];
    const Matrix& fb_m = b_.factors[skip_mode - 1];
    const Matrix& fa_1 = a_.factors[m1 - 1];
    const Matrix& fb_1 = b_.factors[m1 - 1];
    const Matrix& fa_2 = a_.factors[m2 - 1];
    const Matrix& fb_2 = b_.factors[m2 - 1];

    // Crossed Gram contractions of the two factor sets through p and q.
    const Matrix w1 = fa_1.transpose() * (p.asDiagonal() * fb_1);  // ga1 x gb1
    const Matrix w2 = fa_2.transpose() * (q.asDiagonal() * fb_2);  // ga2 x gb2

    const DenseTensor3 gp = cyclic_front(a_.core, skip_mode);  // (ga, ga1, ga2)
    const DenseTensor3 hp = cyclic_front(b_.core, skip_mode);  // (gb, gb1, gb2)
    const Index ga = gp.n1(), ga1 = gp.n2(), ga2 = gp.n3();
    const Index gb = hp.n1(), gb1 = hp.n2(), gb2 = hp.n3();

    // h1(beta, gamma_b, alpha1) = sum_{beta1} hp(beta, beta1, gamma_b) w1(alpha1, beta1)
    DenseTensor3 h1(gb, gb2, std::max<Index>(ga1, 1));
    for (Index a1 = 0; a1 < ga1; ++a1)
        for (Index c = 0; c < gb2; ++c)
            for (Index be = 0; be < gb; ++be) {
                double acc = 0.0;
                for (Index b1 = 0; b1 < gb1; ++b1) acc += hp(be, b1, c) * w1(a1, b1);
                h1(be, c, a1) = acc;
            }
    // h2(beta, alpha1, alpha2) = sum_{gamma_b} h1(beta, gamma_b, alpha1) w2(alpha2, gamma_b)
    DenseTensor3 h2(gb, std::max<Index>(ga1, 1), std::max<Index>(ga2, 1));
    for (Index a2 = 0; a2 < ga2; ++a2)
        for (Index a1 = 0; a1 < ga1; ++a1)
            for (Index be = 0; be < gb; ++be) {
                double acc = 0.0;
                for (Index c = 0; c < gb2; ++c) acc += h1(be, c, a1) * w2(a2, c);
                h2(be, a1, a2) = acc;
            }
    // t(alpha, beta) = sum_{alpha1, alpha2} gp(alpha, alpha1, alpha2) h2(beta, alpha1, alpha2)
    Matrix t(ga, gb);
    for (Index be = 0; be < gb; ++be)
        for (Index al = 0; al < ga; ++al) {
            double acc = 0.0;
            for (Index a2 = 0; a2 < ga2; ++a2)
                for (Index a1 = 0; a1 < ga1; ++a1) acc += gp(al, a1, a2) * h2(be, a1, a2);
            t(al, be) = acc;
        }

    Vector out(fa_m.rows());
    kernels::rowwise_bilinear(fa_m, t, fb_m, out.data(), exec_);

    const std::size_t temp = static_cast<std::size_t>(
        w1.size() + w2.size() + gp.size() + hp.size() + h1.size() + h2.size() + t.size());
    std::size_t prev = peak_temp_.load(std::memory_order_relaxed);
    while (prev < temp &&
           !peak_temp_.compare_exchange_weak(prev, temp, std::memory_order_relaxed)) {
    }
    return out;
}

DenseTensor3 HadamardTuckerSource::densify() const {
    const DenseTensor3 da = tucker_reconstruct(a_);
    const DenseTensor3 db = tucker_reconstruct(b_);
    DenseTensor3 out = da;
    for (Index i = 0; i < out.size(); ++i) out.data()[i] *= db.data()[i];
    return out;
}

}  // namespace tenkrylov
