#include "tenkrylov/kernels.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tenkrylov::kernels {

namespace {

struct Range {
    Index lo, hi;
};

// Contiguous block of [0, n) owned by the calling thread inside an OpenMP
// parallel region; the full range outside one.
Range my_block(Index n) {
#ifdef _OPENMP
    const Index nt = omp_get_num_threads();
    const Index tid = omp_get_thread_num();
    const Index chunk = (n + nt - 1) / nt;
    const Index lo = std::min<Index>(tid * chunk, n);
    const Index hi = std::min<Index>(lo + chunk, n);
    return {lo, hi};
#else
    return {0, n};
#endif
}

// skip_mode == 1: out[i] accumulates over (k outer, j inner) for each i.
void tenvec_skip1(const Shape3& s, const double* vals, const double* p,
                  const double* q, double* out, Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) out[i] = 0.0;
    for (Index k = 0; k < s.n3; ++k) {
        const double qk = q[k];
        for (Index j = 0; j < s.n2; ++j) {
            const double c = p[j] * qk;
            const double* col = vals + s.n1 * (j + s.n2 * k);
            for (Index i = lo; i < hi; ++i) out[i] += c * col[i];
        }
    }
}

// skip_mode == 2: out[j] accumulates over (k outer, i-dot inner) for each j.
void tenvec_skip2(const Shape3& s, const double* vals, const double* p,
                  const double* q, double* out, Index lo, Index hi) {
    for (Index j = lo; j < hi; ++j) out[j] = 0.0;
    for (Index k = 0; k < s.n3; ++k) {
        const double pk = p[k];
        for (Index j = lo; j < hi; ++j) {
            const double* col = vals + s.n1 * (j + s.n2 * k);
            double acc = 0.0;
            for (Index i = 0; i < s.n1; ++i) acc += q[i] * col[i];
            out[j] += pk * acc;
        }
    }
}

// skip_mode == 3: out[k] accumulates over (j outer, i-dot inner) for each k.
void tenvec_skip3(const Shape3& s, const double* vals, const double* p,
                  const double* q, double* out, Index lo, Index hi) {
    for (Index k = lo; k < hi; ++k) {
        double acc = 0.0;
        for (Index j = 0; j < s.n2; ++j) {
            const double* col = vals + s.n1 * (j + s.n2 * k);
            double d = 0.0;
            for (Index i = 0; i < s.n1; ++i) d += p[i] * col[i];
            acc += q[j] * d;
        }
        out[k] = acc;
    }
}

void tenvec_dense_range(const Shape3& s, const double* vals, int skip_mode,
                        const double* p, const double* q, double* out,
                        Index lo, Index hi) {
    switch (skip_mode) {
        case 1: tenvec_skip1(s, vals, p, q, out, lo, hi); break;
        case 2: tenvec_skip2(s, vals, p, q, out, lo, hi); break;
        default: tenvec_skip3(s, vals, p, q, out, lo, hi); break;
    }
}

}  // namespace

bool parallel_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

bool resolve_parallel(Exec exec) {
    switch (exec) {
        case Exec::Serial: return false;
        case Exec::Parallel: return parallel_available();
        case Exec::Auto: break;
    }
    static const bool forced_serial = std::getenv("TENKRYLOV_SERIAL") != nullptr;
    return parallel_available() && !forced_serial;
}

void tenvec_dense(const Shape3& shape, const double* vals, int skip_mode,
                  const double* p, const double* q, double* out, Exec exec) {
    require_mode(skip_mode);
    const Index n_out = shape[skip_mode];
    if (resolve_parallel(exec)) {
#ifdef _OPENMP
#pragma omp parallel
        {
            const Range r = my_block(n_out);
            if (r.lo < r.hi)
                tenvec_dense_range(shape, vals, skip_mode, p, q, out, r.lo, r.hi);
        }
        return;
#endif
    }
    tenvec_dense_range(shape, vals, skip_mode, p, q, out, 0, n_out);
}

namespace {

// Per-element accumulation order is s ascending in both paths.
void weighted_colsum_range(const Matrix& a, const Vector& t, double* out,
                           Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) out[i] = 0.0;
    for (Index s = 0; s < a.cols(); ++s) {
        const double ts = t[s];
        const double* col = a.data() + a.rows() * s;
        for (Index i = lo; i < hi; ++i) out[i] += ts * col[i];
    }
}

void rowwise_bilinear_range(const Matrix& a, const Matrix& t, const Matrix& b,
                            double* out, Index lo, Index hi) {
    const Index ra = a.cols(), rb = b.cols();
    for (Index i = lo; i < hi; ++i) {
        double acc = 0.0;
        for (Index cb = 0; cb < rb; ++cb) {
            double d = 0.0;
            for (Index ca = 0; ca < ra; ++ca) d += a(i, ca) * t(ca, cb);
            acc += d * b(i, cb);
        }
        out[i] = acc;
    }
}

}  // namespace

void weighted_colsum(const Matrix& a, const Vector& t, double* out, Exec exec) {
    const Index n = a.rows();
    if (resolve_parallel(exec)) {
#ifdef _OPENMP
#pragma omp parallel
        {
            const Range r = my_block(n);
            if (r.lo < r.hi) weighted_colsum_range(a, t, out, r.lo, r.hi);
        }
        return;
#endif
    }
    weighted_colsum_range(a, t, out, 0, n);
}

void rowwise_bilinear(const Matrix& a, const Matrix& t, const Matrix& b,
                      double* out, Exec exec) {
    const Index n = a.rows();
    if (resolve_parallel(exec)) {
#ifdef _OPENMP
#pragma omp parallel
        {
            const Range r = my_block(n);
            if (r.lo < r.hi) rowwise_bilinear_range(a, t, b, out, r.lo, r.hi);
        }
        return;
#endif
    }
    rowwise_bilinear_range(a, t, b, out, 0, n);
}

}  // namespace tenkrylov::kernels
