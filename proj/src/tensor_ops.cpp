#include "tenkrylov/tensor_ops.hpp"

#include "tenkrylov/rng.hpp"
#include "tenkrylov/sources.hpp"
#include "tenkrylov/tensor_krylov.hpp"

#include <cmath>

namespace tenkrylov {

Matrix unfold(const DenseTensor3& t, int mode) {
    require_mode(mode);
    const Shape3 s = t.shape();
    Matrix m;
    switch (mode) {
        case 1: {
            // storage is already (i, j + n2*k)-major
            m = Eigen::Map<const Matrix>(t.data(), s.n1, s.n2 * s.n3);
            break;
        }
        case 2: {
            m.resize(s.n2, s.n3 * s.n1);
            for (Index i = 0; i < s.n1; ++i)
                for (Index k = 0; k < s.n3; ++k)
                    for (Index j = 0; j < s.n2; ++j) m(j, k + s.n3 * i) = t(i, j, k);
            break;
        }
        default: {
            m.resize(s.n3, s.n1 * s.n2);
            for (Index k = 0; k < s.n3; ++k)
                for (Index j = 0; j < s.n2; ++j)
                    for (Index i = 0; i < s.n1; ++i) m(k, i + s.n1 * j) = t(i, j, k);
            break;
        }
    }
    return m;
}

DenseTensor3 refold(const Matrix& m, int mode, Shape3 shape) {
    require_mode(mode);
    const Index paired = shape.count() / shape[mode];
    if (m.rows() != shape[mode] || m.cols() != paired)
        throw std::invalid_argument("refold: matrix shape does not match");
    DenseTensor3 t(shape.n1, shape.n2, shape.n3);
    switch (mode) {
        case 1:
            for (Index k = 0; k < shape.n3; ++k)
                for (Index j = 0; j < shape.n2; ++j)
                    for (Index i = 0; i < shape.n1; ++i) t(i, j, k) = m(i, j + shape.n2 * k);
            break;
        case 2:
            for (Index i = 0; i < shape.n1; ++i)
                for (Index k = 0; k < shape.n3; ++k)
                    for (Index j = 0; j < shape.n2; ++j) t(i, j, k) = m(j, k + shape.n3 * i);
            break;
        default:
            for (Index j = 0; j < shape.n2; ++j)
                for (Index i = 0; i < shape.n1; ++i)
                    for (Index k = 0; k < shape.n3; ++k) t(i, j, k) = m(k, i + shape.n1 * j);
            break;
    }
    return t;
}

Vector kron_pair(const Vector& p, const Vector& q) {
    Vector out(p.size() * q.size());
    for (Index b = 0; b < q.size(); ++b)
        for (Index a = 0; a < p.size(); ++a) out[a + p.size() * b] = p[a] * q[b];
    return out;
}

DenseTensor3 mode_multiply(const DenseTensor3& t, int mode, const Matrix& m) {
    require_mode(mode);
    const Shape3 s = t.shape();
    if (m.cols() != s[mode])
        throw std::invalid_argument("mode_multiply: matrix columns do not match mode size");
    const Index r = m.rows();
    switch (mode) {
        case 1: {
            DenseTensor3 out(r, s.n2, s.n3);
            for (Index k = 0; k < s.n3; ++k) {
                Eigen::Map<const Matrix> slice(t.data() + s.n1 * s.n2 * k, s.n1, s.n2);
                Eigen::Map<Matrix> oslice(out.data() + r * s.n2 * k, r, s.n2);
                oslice.noalias() = m * slice;
            }
            return out;
        }
        case 2: {
            DenseTensor3 out(s.n1, r, s.n3);
            for (Index k = 0; k < s.n3; ++k) {
                Eigen::Map<const Matrix> slice(t.data() + s.n1 * s.n2 * k, s.n1, s.n2);
                Eigen::Map<Matrix> oslice(out.data() + s.n1 * r * k, s.n1, r);
                oslice.noalias() = slice * m.transpose();
            }
            return out;
        }
        default: {
            DenseTensor3 out(s.n1, s.n2, r);
            Eigen::Map<const Matrix> flat(t.data(), s.n1 * s.n2, s.n3);
            Eigen::Map<Matrix> oflat(out.data(), s.n1 * s.n2, r);
            oflat.noalias() = flat * m.transpose();
            return out;
        }
    }
}

double frobenius_inner(const DenseTensor3& a, const DenseTensor3& b) {
    if (!(a.shape() == b.shape()))
        throw std::invalid_argument("frobenius_inner: shape mismatch");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (Index i = 0; i < a.size(); ++i) acc += pa[i] * pb[i];
    return acc;
}

double frobenius_norm(const DenseTensor3& t) {
    return Eigen::Map<const Vector>(t.data(), t.size()).norm();
}

DenseTensor3 tucker_reconstruct(const TuckerTensor& t) {
    t.validate();
    DenseTensor3 out = mode_multiply(t.core, 1, t.factors[0]);
    out = mode_multiply(out, 2, t.factors[1]);
    out = mode_multiply(out, 3, t.factors[2]);
    return out;
}

double tucker_residual_norm(const TuckerTensor& a, const TuckerTensor& b) {
    if (!(a.ambient_shape() == b.ambient_shape()))
        throw std::invalid_argument("tucker_residual_norm: ambient shape mismatch");
    // Joint orthonormal basis per mode; both cores expressed there.
    std::array<Matrix, 3> coeff_a, coeff_b;
    for (int l = 0; l < 3; ++l) {
        const Index n = a.factors[l].rows();
        const Index ra = a.factors[l].cols(), rb = b.factors[l].cols();
        Matrix joint(n, ra + rb);
        joint << a.factors[l], b.factors[l];
        const Index r = std::min(n, ra + rb);
        Eigen::HouseholderQR<Matrix> qr(joint);
        Matrix q = qr.householderQ() * Matrix::Identity(n, r);
        coeff_a[l] = q.transpose() * a.factors[l];
        coeff_b[l] = q.transpose() * b.factors[l];
    }
    DenseTensor3 ga = mode_multiply(mode_multiply(mode_multiply(a.core, 1, coeff_a[0]), 2, coeff_a[1]), 3, coeff_a[2]);
    DenseTensor3 gb = mode_multiply(mode_multiply(mode_multiply(b.core, 1, coeff_b[0]), 2, coeff_b[1]), 3, coeff_b[2]);
    double acc = 0.0;
    for (Index i = 0; i < ga.size(); ++i) {
        const double d = ga.data()[i] - gb.data()[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double spectral_norm_estimate(const TenvecSource& src, int iters, std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("spectral_norm_estimate: iters must be >= 1");
    auto rng = make_rng(seed);
    const Shape3 s = src.shape();
    const Vector v0 = random_unit_vector(s.n2, rng);
    const Vector w0 = random_unit_vector(s.n3, rng);
    return als_rank1(src, v0, w0, iters).sigma;
}

}  // namespace tenkrylov
