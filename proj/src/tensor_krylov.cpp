#include "tenkrylov/tensor_krylov.hpp"

#include <chrono>
#include <cmath>

namespace tenkrylov {

namespace detail {

namespace {

Vector expand(const Matrix* basis, Index cols, const Vector& coords) {
    if (!basis || cols == 0) return coords;
    return basis->leftCols(cols) * coords;
}

Vector restrict_to(const Matrix* basis, Index cols, const Vector& full) {
    if (!basis || cols == 0) return full;
    return basis->leftCols(cols).transpose() * full;
}

void project_out(const Matrix* basis, Index cols, Vector& v) {
    if (!basis || cols == 0) return;
    const Vector c = basis->leftCols(cols).transpose() * v;
    v -= basis->leftCols(cols) * c;
}

}  // namespace

RestrictedAlsResult restricted_als(const TenvecSource& src, int target_mode,
                                   const Matrix* X, Index x_cols, const Matrix* R1,
                                   Index r1_cols, const Matrix* R2, Index r2_cols,
                                   Vector v0, Vector w0, int sweeps,
                                   double degenerate_threshold) {
    require_mode(target_mode);
    if (sweeps < 1) throw std::invalid_argument("restricted_als: sweeps must be >= 1");
    const int m1 = cyclic_succ(target_mode);
    const int m2 = cyclic_succ(m1);
    const double floor = std::max(degenerate_threshold, 1e-300);

    RestrictedAlsResult res;
    res.vhat = std::move(v0);
    res.what = std::move(w0);
    Vector u;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        u = src.tenvec(target_mode, expand(R1, r1_cols, res.vhat),
                       expand(R2, r2_cols, res.what));
        ++res.tenvecs;
        project_out(X, x_cols, u);
        res.sigma = u.norm();
        if (sweep == 0) res.sigma_first = res.sigma;
        if (res.sigma < floor) {
            res.degenerate = true;
            res.target = std::move(u);
            return res;
        }
        u /= res.sigma;

        Vector v = restrict_to(R1, r1_cols,
                               src.tenvec(m1, expand(R2, r2_cols, res.what), u));
        ++res.tenvecs;
        res.sigma = v.norm();
        if (res.sigma < floor) {
            res.degenerate = true;
            res.target = std::move(u);
            return res;
        }
        res.vhat = v / res.sigma;

        Vector w = restrict_to(R2, r2_cols,
                               src.tenvec(m2, u, expand(R1, r1_cols, res.vhat)));
        ++res.tenvecs;
        res.sigma = w.norm();
        if (res.sigma < floor) {
            res.degenerate = true;
            res.target = std::move(u);
            return res;
        }
        res.what = w / res.sigma;
    }
    res.target = std::move(u);
    return res;
}

}  // namespace detail

Rank1Result als_rank1(const TenvecSource& src, const Vector& v0, const Vector& w0,
                      int sweeps) {
    const Shape3 s = src.shape();
    if (v0.size() != s.n2 || w0.size() != s.n3)
        throw std::invalid_argument("als_rank1: start vector length mismatch");
    auto r = detail::restricted_als(src, 1, nullptr, 0, nullptr, 0, nullptr, 0, v0, w0,
                                    sweeps, 0.0);
    Rank1Result out;
    if (r.degenerate) {
        out.sigma = 0.0;
        out.u = Vector::Zero(s.n1);
        out.v = r.vhat;
        out.w = r.what;
        return out;
    }
    out.sigma = r.sigma;
    out.u = r.target;
    out.v = r.vhat;
    out.w = r.what;
    return out;
}

Rank1Result power_rank1_slice(const TenvecSource& src, int mode, const Vector& x,
                              const Vector& z0, int sweeps) {
    require_mode(mode);
    if (sweeps < 1) throw std::invalid_argument("power_rank1_slice: sweeps must be >= 1");
    if (std::abs(x.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("power_rank1_slice: x must be a unit vector");
    const int m1 = cyclic_succ(mode);
    const int m2 = cyclic_succ(m1);

    Rank1Result out;
    double sigma = 0.0;
    Vector z = z0;
    Vector y;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        y = src.tenvec(m1, z, x);  // slice * z
        sigma = y.norm();
        if (sigma < 1e-300) {
            out.sigma = 0.0;
            break;
        }
        y /= sigma;
        z = src.tenvec(m2, x, y);  // slice^T * y
        sigma = z.norm();
        if (sigma < 1e-300) {
            out.sigma = 0.0;
            break;
        }
        z /= sigma;
        out.sigma = sigma;
    }
    Vector vecs[3];
    vecs[mode - 1] = x;
    vecs[m1 - 1] = y.size() ? y : Vector::Zero(src.shape()[m1]);
    vecs[m2 - 1] = z;
    out.u = vecs[0];
    out.v = vecs[1];
    out.w = vecs[2];
    return out;
}

namespace {

// Two classical Gram-Schmidt sweeps against the first k columns.
Vector orthogonalize(const Matrix& basis, Index k, Vector x) {
    for (int sweep = 0; sweep < 2 && k > 0; ++sweep) {
        const Vector c = basis.leftCols(k).transpose() * x;
        x -= basis.leftCols(k) * c;
    }
    return x;
}

}  // namespace

KrylovResult mkr(const TenvecSource& src, const Vector& u1, const Vector& v1, int r,
                 double tol) {
    const Shape3 s = src.shape();
    if (r < 1) throw std::invalid_argument("mkr: r must be >= 1");
    if (std::abs(u1.norm() - 1.0) > 1e-8 || std::abs(v1.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("mkr: start vectors must be unit");

    const auto t0 = std::chrono::steady_clock::now();
    KrylovResult res;
    res.report.algorithm = "mkr";
    res.report.estimator = "orthogonal-component";
    Matrix& U = res.bases[0];
    Matrix& V = res.bases[1];
    Matrix& W = res.bases[2];
    U.resize(s.n1, r + 1);
    V.resize(s.n2, r + 1);
    W.resize(s.n3, r + 1);
    U.col(0) = u1;
    V.col(0) = v1;
    long tenvecs = 0;
    std::array<Index, 3> sizes{1, 1, 0};
    int step_no = 0;

    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t0)
            .count();
    };
    auto record = [&](int mode, double err) {
        StepRecord rec;
        rec.step = ++step_no;
        rec.mode = mode;
        rec.sizes = sizes;
        rec.err_estimate = err;
        rec.nrm = 0.0;
        rec.tenvecs = tenvecs;
        rec.ms = elapsed_ms();
        res.report.steps.push_back(rec);
    };
    auto finish = [&](Termination t, int mode, int step) {
        res.report.termination = t;
        if (t == Termination::breakdown) {
            res.report.breakdown_mode = mode;
            res.report.breakdown_step = step;
            res.report.mode_termination[static_cast<size_t>(mode - 1)] =
                Termination::breakdown;
        } else {
            res.report.mode_termination = {t, t, t};
        }
        U.conservativeResize(s.n1, sizes[0]);
        V.conservativeResize(s.n2, sizes[1]);
        W.conservativeResize(s.n3, sizes[2]);
        res.report.final_ranks = sizes;
        res.report.tenvec_count = tenvecs;
        res.report.wall_time_ms = elapsed_ms();
    };

    // one mode extension; returns false on breakdown
    auto extend = [&](int mode, Matrix& basis, const Vector& raw) -> bool {
        const Index k = sizes[static_cast<size_t>(mode - 1)];
        const Vector orth = orthogonalize(basis, k, raw);
        const double raw_norm = raw.norm();
        if (raw_norm == 0.0 || orth.norm() < tol * raw_norm) return false;
        basis.col(k) = orth / orth.norm();
        sizes[static_cast<size_t>(mode - 1)] = k + 1;
        record(mode, orth.norm());
        return true;
    };

    Vector w = src.tenvec(3, u1, v1);
    ++tenvecs;
    if (w.norm() == 0.0) {
        finish(Termination::breakdown, 3, 1);
        return res;
    }
    W.col(0) = w / w.norm();
    sizes[2] = 1;
    record(3, w.norm());

    for (Index k = 0; k < r; ++k) {
        Vector u = src.tenvec(1, V.col(k), W.col(k));
        ++tenvecs;
        if (!extend(1, U, u)) {
            finish(Termination::breakdown, 1, static_cast<int>(k) + 2);
            return res;
        }
        Vector v = src.tenvec(2, W.col(k), U.col(k + 1));
        ++tenvecs;
        if (!extend(2, V, v)) {
            finish(Termination::breakdown, 2, static_cast<int>(k) + 2);
            return res;
        }
        Vector wn = src.tenvec(3, U.col(k + 1), V.col(k + 1));
        ++tenvecs;
        if (!extend(3, W, wn)) {
            finish(Termination::breakdown, 3, static_cast<int>(k) + 2);
            return res;
        }
    }
    finish(Termination::max_rank, 0, 0);
    return res;
}

}  // namespace tenkrylov
