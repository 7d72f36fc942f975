#include "tenkrylov/tensor_wedderburn.hpp"

#include "tenkrylov/rng.hpp"

#include <chrono>
#include <cmath>

namespace tenkrylov {

const char* to_string(PivotStrategy s) {
    switch (s) {
        case PivotStrategy::Wsvd: return "wsvd";
        case PivotStrategy::Wlnc: return "wlnc";
        case PivotStrategy::WsvdR: return "wsvdr";
        default: return "wlncr";
    }
}

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

Vector orthogonalize(const Matrix& basis, Index k, Vector x) {
    for (int sweep = 0; sweep < 2 && k > 0; ++sweep) {
        const Vector c = basis.leftCols(k).transpose() * x;
        x -= basis.leftCols(k) * c;
    }
    return x;
}

void check_orthonormal(const Matrix& b, const char* what) {
    if (b.cols() == 0) return;
    const Matrix gram = b.transpose() * b;
    const double dev = (gram - Matrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-8)
        throw std::invalid_argument(std::string(what) + ": basis is not orthonormal");
}

struct RestrictedPower {
    double sigma = 0.0;
    Vector yhat, zhat;
    long tenvecs = 0;
};

// Power iteration on A x_mode x^T restricted to the spans of S1 and S2
// (either may be null for the unrestricted slice). 2*sweeps tenvecs.
RestrictedPower restricted_power(const TenvecSource& src, int mode, const Vector& x,
                                 const Matrix* s1, Index c1, const Matrix* s2, Index c2,
                                 Vector zhat0, int sweeps) {
    const int m1 = cyclic_succ(mode);
    const int m2 = cyclic_succ(m1);
    auto expand1 = [&](const Vector& v) { return s1 ? Vector(s1->leftCols(c1) * v) : v; };
    auto expand2 = [&](const Vector& v) { return s2 ? Vector(s2->leftCols(c2) * v) : v; };

    RestrictedPower res;
    Vector zh = std::move(zhat0);
    Vector yh;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        Vector y = src.tenvec(m1, expand2(zh), x);
        ++res.tenvecs;
        yh = s1 ? Vector(s1->leftCols(c1).transpose() * y) : y;
        res.sigma = yh.norm();
        if (res.sigma < 1e-300) {
            res.sigma = 0.0;
            break;
        }
        yh /= res.sigma;
        Vector z = src.tenvec(m2, x, expand1(yh));
        ++res.tenvecs;
        zh = s2 ? Vector(s2->leftCols(c2).transpose() * z) : z;
        res.sigma = zh.norm();
        if (res.sigma < 1e-300) {
            res.sigma = 0.0;
            break;
        }
        zh /= res.sigma;
    }
    res.yhat = yh.size() ? yh : Vector::Zero(s1 ? c1 : src.shape()[m1]);
    res.zhat = zh;
    return res;
}

}  // namespace

PivotResult pivot_wsvd(const TenvecSource& src, const Matrix& X, int p_als,
                       std::uint64_t seed, int mode) {
    const Shape3 s = src.shape();
    const int m1 = cyclic_succ(mode), m2 = cyclic_succ(m1);
    auto rng = make_rng(seed);
    const Vector v0 = random_unit_vector(s[m1], rng);
    const Vector w0 = random_unit_vector(s[m2], rng);
    auto r = detail::restricted_als(src, mode, &X, X.cols(), nullptr, 0, nullptr, 0, v0,
                                    w0, p_als, 0.0);
    PivotResult out;
    out.y = r.vhat;
    out.z = r.what;
    out.sigma = r.degenerate ? 0.0 : r.sigma;
    out.tenvecs = r.tenvecs;
    out.degenerate = r.degenerate;
    return out;
}

PivotResult pivot_wlnc(const TenvecSource& src, const Vector& x, int p_pow,
                       std::uint64_t seed, int mode) {
    const Shape3 s = src.shape();
    const int m2 = cyclic_succ(cyclic_succ(mode));
    auto rng = make_rng(seed);
    auto r = restricted_power(src, mode, x, nullptr, 0, nullptr, 0,
                              random_unit_vector(s[m2], rng), p_pow);
    PivotResult out;
    out.y = r.yhat;
    out.z = r.zhat;
    out.sigma = r.sigma;
    out.tenvecs = r.tenvecs;
    out.degenerate = r.sigma == 0.0;
    return out;
}

PivotResult pivot_wsvdr(const TenvecSource& src, const Matrix& X, const Matrix& Y,
                        const Matrix& Z, int p_als, std::uint64_t seed, int mode) {
    auto rng = make_rng(seed);
    const Vector v0 = random_unit_vector(Y.cols(), rng);
    const Vector w0 = random_unit_vector(Z.cols(), rng);
    auto r = detail::restricted_als(src, mode, &X, X.cols(), &Y, Y.cols(), &Z, Z.cols(),
                                    v0, w0, p_als, 0.0);
    PivotResult out;
    out.yhat = r.vhat;
    out.zhat = r.what;
    out.y = Y * r.vhat;
    out.z = Z * r.what;
    out.sigma = r.degenerate ? 0.0 : r.sigma;
    out.tenvecs = r.tenvecs;
    out.degenerate = r.degenerate;
    return out;
}

SliceRank1 pivot_wlncr(const Matrix& core_slice) {
    SliceRank1 out;
    if (core_slice.rows() == 0 || core_slice.cols() == 0) return out;
    Eigen::JacobiSVD<Matrix> svd(core_slice, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.sigma = svd.singularValues()[0];
    out.yhat = svd.matrixU().col(0);
    out.zhat = svd.matrixV().col(0);
    return out;
}

SubspaceResult dominant_subspace(const TenvecSource& src, int mode,
                                 const StrategyConfig& strategy, double tol, double eps,
                                 int r_max, std::uint64_t seed, const Matrix* shared1,
                                 const Matrix* shared2) {
    require_mode(mode);
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("dominant_subspace: eps must lie in (0,1)");
    if (r_max < 1) throw std::invalid_argument("dominant_subspace: r_max must be >= 1");
    const bool restricted =
        strategy.kind == PivotStrategy::WsvdR || strategy.kind == PivotStrategy::WlncR;
    if (restricted && (!shared1 || !shared2))
        throw std::invalid_argument("dominant_subspace: restricted strategy needs shared bases");

    const auto t0 = clock_type::now();
    const Shape3 s = src.shape();
    const int m1 = cyclic_succ(mode), m2 = cyclic_succ(m1);
    const Index d1 = restricted ? shared1->cols() : s[m1];
    const Index d2 = restricted ? shared2->cols() : s[m2];
    auto rng = make_rng(seed);

    SubspaceResult res;
    res.report.algorithm = std::string("dominant-subspace-") + to_string(strategy.kind);
    res.report.estimator = restricted ? "restricted-spectral" : "spectral";
    res.X.resize(s[mode], r_max);

    Index k = 0;
    long tenvecs = 0;
    double nrm2 = 0.0, scale = 0.0;
    int step_no = 0;
    Termination term = Termination::max_rank;
    std::optional<std::pair<Vector, Vector>> next_pivot;  // Wlnc/WlncR carryover

    while (true) {
        Vector xk;
        double orth_norm = 0.0;
        bool appended = false;
        bool exhausted = false;  // Wsvd-style exact representation
        for (int attempt = 0; attempt < 2 && !appended && !exhausted; ++attempt) {
            // leading pair
            Vector y, z;
            switch (strategy.kind) {
                case PivotStrategy::Wsvd:
                case PivotStrategy::WsvdR: {
                    const Vector v0 = random_unit_vector(d1, rng);
                    const Vector w0 = random_unit_vector(d2, rng);
                    auto als = detail::restricted_als(
                        src, mode, &res.X, k, restricted ? shared1 : nullptr, d1,
                        restricted ? shared2 : nullptr, d2, v0, w0, strategy.p_als,
                        tol * scale);
                    tenvecs += als.tenvecs;
                    if (als.degenerate) {
                        if (strategy.kind == PivotStrategy::Wsvd) {
                            // the projected tensor vanished: representation exact
                            exhausted = true;
                            continue;
                        }
                        continue;  // restricted span exhausted; retry then give up
                    }
                    y = restricted ? Vector(shared1->leftCols(d1) * als.vhat) : als.vhat;
                    z = restricted ? Vector(shared2->leftCols(d2) * als.what) : als.what;
                    break;
                }
                case PivotStrategy::Wlnc:
                case PivotStrategy::WlncR: {
                    if (next_pivot && attempt == 0) {
                        y = next_pivot->first;
                        z = next_pivot->second;
                    } else if (restricted) {
                        y = shared1->leftCols(d1) * random_unit_vector(d1, rng);
                        z = shared2->leftCols(d2) * random_unit_vector(d2, rng);
                    } else {
                        y = random_unit_vector(d1, rng);
                        z = random_unit_vector(d2, rng);
                    }
                    break;
                }
            }
            // new direction
            const Vector x = src.tenvec(mode, y, z);
            ++tenvecs;
            Vector xo = orthogonalize(res.X, k, x);
            if (x.norm() == 0.0 || xo.norm() < tol * x.norm()) continue;  // breakdown; retry once
            orth_norm = xo.norm();
            xk = xo / orth_norm;
            appended = true;
        }
        if (exhausted) {
            term = Termination::converged;
            break;
        }
        if (!appended) {
            term = Termination::breakdown;
            break;
        }
        res.X.col(k) = xk;
        ++k;

        // step error estimate (and, for Lanczos-like pivoting, the next pair)
        double err;
        switch (strategy.kind) {
            case PivotStrategy::Wsvd:
            case PivotStrategy::WsvdR:
                err = orth_norm;  // maximization value; power iterations omitted
                break;
            case PivotStrategy::Wlnc: {
                auto pw = restricted_power(src, mode, xk, nullptr, 0, nullptr, 0,
                                           random_unit_vector(s[m2], rng), strategy.p_pow);
                tenvecs += pw.tenvecs;
                err = pw.sigma;
                next_pivot = {{pw.yhat, pw.zhat}};
                break;
            }
            default: {  // WlncR, bases-only variant
                auto pw = restricted_power(src, mode, xk, shared1, d1, shared2, d2,
                                           random_unit_vector(d2, rng), strategy.p_pow);
                tenvecs += pw.tenvecs;
                err = pw.sigma;
                next_pivot = {{Vector(shared1->leftCols(d1) * pw.yhat),
                               Vector(shared2->leftCols(d2) * pw.zhat)}};
                break;
            }
        }
        nrm2 += err * err;
        scale = std::max({scale, err, orth_norm});

        const bool converged = err <= eps * std::sqrt(nrm2);
        if (converged) {  // the triggering column contributes below eps: drop it
            --k;
            nrm2 -= err * err;
        }
        StepRecord rec;
        rec.step = ++step_no;
        rec.mode = mode;
        rec.sizes[static_cast<size_t>(mode - 1)] = k;
        rec.err_estimate = err;
        rec.nrm = std::sqrt(std::max(nrm2, 0.0));
        rec.tenvecs = tenvecs;
        rec.ms = ms_since(t0);
        res.report.steps.push_back(rec);

        if (converged) {
            term = Termination::converged;
            break;
        }
        if (k == r_max) {
            term = Termination::max_rank;
            break;
        }
    }

    res.X.conservativeResize(s[mode], k);
    res.report.final_ranks[static_cast<size_t>(mode - 1)] = k;
    res.report.tenvec_count = tenvecs;
    res.report.termination = term;
    res.report.mode_termination[static_cast<size_t>(mode - 1)] = term;
    if (term == Termination::breakdown) {
        res.report.breakdown_mode = mode;
        res.report.breakdown_step = static_cast<int>(k) + 1;
    }
    res.report.wall_time_ms = ms_since(t0);
    return res;
}

DenseTensor3 compute_core(const TenvecSource& src, const Matrix& U, const Matrix& V,
                          const Matrix& W, long* tenvec_count) {
    check_orthonormal(U, "compute_core");
    check_orthonormal(V, "compute_core");
    check_orthonormal(W, "compute_core");
    const Index r1 = U.cols(), r2 = V.cols(), r3 = W.cols();
    DenseTensor3 core(r1, r2, r3);
    long used = 0;
    for (Index sidx = 0; sidx < r3; ++sidx)
        for (Index q = 0; q < r2; ++q) {
            const Vector f = src.tenvec(1, V.col(q), W.col(sidx));
            ++used;
            const Vector g = U.transpose() * f;
            for (Index p = 0; p < r1; ++p) core(p, q, sidx) = g[p];
        }
    if (tenvec_count) *tenvec_count += used;
    return core;
}

// ---------------------------------------------------------------------------
// Interleaved restricted-SVD drive: one implementation backs both the
// optimized minimal Krylov recursion and the WsvdR strategy (they are the
// same process).
// ---------------------------------------------------------------------------

namespace {

struct DriveConfig {
    std::array<int, 3> r_max;
    double tol;
    double eps;  // 0 disables the accuracy stop
    int p_als;
    std::uint64_t seed;
    bool retry;
};

KrylovResult restricted_svd_drive(const TenvecSource& src, const Vector& u1,
                                  const Vector& v1, const DriveConfig& cfg) {
    const Shape3 s = src.shape();
    for (int l = 0; l < 3; ++l)
        if (cfg.r_max[static_cast<size_t>(l)] < 1)
            throw std::invalid_argument("optimized_mkr: r_max must be >= 1");
    if (std::abs(u1.norm() - 1.0) > 1e-8 || std::abs(v1.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("optimized_mkr: start vectors must be unit");

    const auto t0 = clock_type::now();
    auto rng = make_rng(cfg.seed);
    KrylovResult res;
    res.report.algorithm = "opt-mkr";
    res.report.estimator = "restricted-spectral";

    std::array<Matrix, 3>& bases = res.bases;
    bases[0].resize(s.n1, cfg.r_max[0]);
    bases[1].resize(s.n2, cfg.r_max[1]);
    bases[2].resize(s.n3, cfg.r_max[2]);
    std::array<Index, 3> sizes{0, 0, 0};
    long tenvecs = 0;
    int step_no = 0;

    auto finish = [&](Termination overall) {
        for (int l = 0; l < 3; ++l)
            bases[static_cast<size_t>(l)].conservativeResize(
                s[l + 1], sizes[static_cast<size_t>(l)]);
        res.report.final_ranks = sizes;
        res.report.tenvec_count = tenvecs;
        res.report.termination = overall;
        res.report.wall_time_ms = ms_since(t0);
    };

    // All three bases are seeded with tenvec images so every basis vector
    // lies in its mode space; raw start vectors would inflate the mode-1/2
    // ranks by one.
    const Vector w_raw = src.tenvec(3, u1, v1);
    ++tenvecs;
    const auto degenerate_init = [&](int mode) {
        res.report.mode_termination = {Termination::breakdown, Termination::breakdown,
                                       Termination::breakdown};
        res.report.breakdown_mode = mode;
        res.report.breakdown_step = 1;
        finish(Termination::breakdown);
    };
    if (w_raw.norm() == 0.0) {  // zero tensor
        degenerate_init(3);
        return res;
    }
    const Vector w1 = w_raw / w_raw.norm();
    const Vector x_raw = src.tenvec(1, v1, w1);
    const Vector y_raw = src.tenvec(2, w1, u1);
    tenvecs += 2;
    if (x_raw.norm() == 0.0 || y_raw.norm() == 0.0) {
        degenerate_init(x_raw.norm() == 0.0 ? 1 : 2);
        return res;
    }
    bases[0].col(0) = x_raw / x_raw.norm();
    bases[1].col(0) = y_raw / y_raw.norm();
    bases[2].col(0) = w1;
    sizes = {1, 1, 1};
    double scale = std::max({w_raw.norm(), x_raw.norm(), y_raw.norm()});
    double nrm2 = w_raw.squaredNorm();
    {
        StepRecord rec;
        rec.step = ++step_no;
        rec.mode = 0;
        rec.sizes = sizes;
        rec.err_estimate = w_raw.norm();
        rec.nrm = std::sqrt(nrm2);
        rec.tenvecs = tenvecs;
        rec.ms = ms_since(t0);
        res.report.steps.push_back(rec);
    }

    std::array<bool, 3> upd;
    for (int l = 0; l < 3; ++l) {
        upd[static_cast<size_t>(l)] =
            sizes[static_cast<size_t>(l)] < cfg.r_max[static_cast<size_t>(l)];
        if (!upd[static_cast<size_t>(l)])
            res.report.mode_termination[static_cast<size_t>(l)] = Termination::max_rank;
    }
    // restriction sizes at which a mode last stalled; the stall is transient
    // when the other bases have grown since, so such a mode is retried then
    std::array<std::pair<Index, Index>, 3> stall_sizes{};

    while (true) {
        bool any_ran = false;
        for (int mode = 1; mode <= 3; ++mode) {
            auto& flag = upd[static_cast<size_t>(mode - 1)];
            const int m1 = cyclic_succ(mode), m2 = cyclic_succ(m1);
            Matrix& X = bases[static_cast<size_t>(mode - 1)];
            const Matrix& B1 = bases[static_cast<size_t>(m1 - 1)];
            const Matrix& B2 = bases[static_cast<size_t>(m2 - 1)];
            const Index k = sizes[static_cast<size_t>(mode - 1)];
            const Index c1 = sizes[static_cast<size_t>(m1 - 1)];
            const Index c2 = sizes[static_cast<size_t>(m2 - 1)];
            if (!flag) {
                const bool stalled =
                    res.report.mode_termination[static_cast<size_t>(mode - 1)] ==
                    Termination::breakdown;
                if (!stalled ||
                    stall_sizes[static_cast<size_t>(mode - 1)] == std::pair<Index, Index>{c1, c2})
                    continue;
                flag = true;  // the restriction changed: try this mode again
            }
            any_ran = true;

            bool appended = false;
            Termination fail_reason = Termination::breakdown;
            const int attempts = cfg.retry ? 2 : 1;
            for (int attempt = 0; attempt < attempts && !appended; ++attempt) {
                // fresh random start coordinates every step: the previous
                // maximizer expands to the direction just absorbed into the
                // basis, so restarting from it is exactly degenerate
                const Vector v0 = random_unit_vector(c1, rng);
                const Vector w0 = random_unit_vector(c2, rng);
                auto als = detail::restricted_als(src, mode, &X, k, &B1, c1, &B2, c2, v0,
                                                  w0, cfg.p_als, cfg.tol * scale);
                tenvecs += als.tenvecs;
                if (als.degenerate) continue;  // restricted maximum vanished

                const Vector x = src.tenvec(mode, B1.leftCols(c1) * als.vhat,
                                            B2.leftCols(c2) * als.what);
                ++tenvecs;
                Vector xo = orthogonalize(X, k, x);
                if (x.norm() == 0.0 || xo.norm() < cfg.tol * x.norm()) continue;

                const double err = xo.norm();
                scale = std::max(scale, err);
                nrm2 += err * err;
                appended = true;
                const bool converged = cfg.eps > 0.0 && err <= cfg.eps * std::sqrt(nrm2);
                if (converged) {
                    nrm2 -= err * err;  // contribution below eps: drop the direction
                } else {
                    X.col(k) = xo / err;
                    sizes[static_cast<size_t>(mode - 1)] = k + 1;
                }

                StepRecord rec;
                rec.step = ++step_no;
                rec.mode = mode;
                rec.sizes = sizes;
                rec.err_estimate = err;
                rec.nrm = std::sqrt(std::max(nrm2, 0.0));
                rec.tenvecs = tenvecs;
                rec.ms = ms_since(t0);
                res.report.steps.push_back(rec);

                if (converged)
                    fail_reason = Termination::converged;
                else if (sizes[static_cast<size_t>(mode - 1)] ==
                         cfg.r_max[static_cast<size_t>(mode - 1)])
                    fail_reason = Termination::max_rank;
                else
                    continue;
                flag = false;
                res.report.mode_termination[static_cast<size_t>(mode - 1)] = fail_reason;
            }
            if (!appended) {
                flag = false;
                res.report.mode_termination[static_cast<size_t>(mode - 1)] =
                    Termination::breakdown;
                stall_sizes[static_cast<size_t>(mode - 1)] = {c1, c2};
                if (res.report.breakdown_mode == 0) {
                    res.report.breakdown_mode = mode;
                    res.report.breakdown_step = static_cast<int>(k) + 1;
                }
            }
        }
        if (!any_ran) break;
    }

    Termination overall = Termination::converged;
    bool any_break = false, any_max = false;
    for (auto t : res.report.mode_termination) {
        any_break |= t == Termination::breakdown;
        any_max |= t == Termination::max_rank;
    }
    overall = any_break ? Termination::breakdown
                        : (any_max ? Termination::max_rank : Termination::converged);
    finish(overall);
    return res;
}

}  // namespace

KrylovResult optimized_mkr(const TenvecSource& src, const Vector& u1, const Vector& v1,
                           const OptMkrConfig& cfg) {
    DriveConfig dc{cfg.r_max, cfg.tol, cfg.eps, cfg.p_als, cfg.seed,
                   cfg.retry_on_breakdown};
    return restricted_svd_drive(src, u1, v1, dc);
}

// ---------------------------------------------------------------------------
// Integrated WlncR drive with slice-by-slice core assembly.
// ---------------------------------------------------------------------------

TuckerApproxResult wlncr_drive(const TenvecSource& src, const Vector& u0,
                               const Vector& v0, const Vector& w0,
                               const WlncrConfig& cfg) {
    const Shape3 s = src.shape();
    for (int l = 0; l < 3; ++l)
        if (cfg.r_max[static_cast<size_t>(l)] < 1)
            throw std::invalid_argument("wlncr_drive: r_max must be >= 1");
    if (std::abs(u0.norm() - 1.0) > 1e-8 || std::abs(v0.norm() - 1.0) > 1e-8 ||
        std::abs(w0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("wlncr_drive: start vectors must be unit");

    const auto t0 = clock_type::now();
    auto rng = make_rng(cfg.seed);
    TuckerApproxResult res;
    res.report.algorithm = "wlncr";
    res.report.estimator = "restricted-frobenius";

    std::array<Matrix, 3> bases;
    bases[0].resize(s.n1, cfg.r_max[0]);
    bases[1].resize(s.n2, cfg.r_max[1]);
    bases[2].resize(s.n3, cfg.r_max[2]);
    std::array<Index, 3> sizes{0, 0, 0};
    long tenvecs = 0;
    int step_no = 0;

    // core kept as mode-1 slices: slices[p] is an (l x m) matrix
    std::vector<Matrix> slices;
    // fibres[q][s] = A (y_q) (z_s), the cached mode-1 fibre of the basis pair
    std::vector<std::vector<Vector>> fibres;

    auto assemble = [&](Termination overall) {
        const Index k = sizes[0], l = sizes[1], m = sizes[2];
        DenseTensor3 core(k, l, m);
        for (Index p = 0; p < k; ++p)
            for (Index sidx = 0; sidx < m; ++sidx)
                for (Index q = 0; q < l; ++q) core(p, q, sidx) = slices[static_cast<size_t>(p)](q, sidx);
        res.tucker.core = std::move(core);
        for (int md = 0; md < 3; ++md) {
            bases[static_cast<size_t>(md)].conservativeResize(s[md + 1],
                                                              sizes[static_cast<size_t>(md)]);
            res.tucker.factors[static_cast<size_t>(md)] = bases[static_cast<size_t>(md)];
            res.tucker.orthonormal[static_cast<size_t>(md)] = true;
        }
        res.report.final_ranks = sizes;
        res.report.tenvec_count = tenvecs;
        res.report.termination = overall;
        res.report.wall_time_ms = ms_since(t0);
    };

    const Vector x_raw = src.tenvec(1, v0, w0);
    const Vector y_raw = src.tenvec(2, w0, u0);
    const Vector z_raw = src.tenvec(3, u0, v0);
    tenvecs += 3;
    if (x_raw.norm() == 0.0 || y_raw.norm() == 0.0 || z_raw.norm() == 0.0) {
        res.report.mode_termination = {Termination::breakdown, Termination::breakdown,
                                       Termination::breakdown};
        res.report.breakdown_mode = x_raw.norm() == 0.0 ? 1 : (y_raw.norm() == 0.0 ? 2 : 3);
        res.report.breakdown_step = 1;
        assemble(Termination::breakdown);
        return res;
    }
    bases[0].col(0) = x_raw / x_raw.norm();
    bases[1].col(0) = y_raw / y_raw.norm();
    bases[2].col(0) = z_raw / z_raw.norm();
    sizes = {1, 1, 1};
    fibres.push_back({src.tenvec(1, bases[1].col(0), bases[2].col(0))});
    ++tenvecs;
    {
        Matrix g11(1, 1);
        g11(0, 0) = bases[0].col(0).dot(fibres[0][0]);
        slices.push_back(g11);
    }
    double nrm2 = slices[0].squaredNorm();  // nrm == ||G||_F throughout
    {
        StepRecord rec;
        rec.step = ++step_no;
        rec.mode = 0;
        rec.sizes = sizes;
        rec.err_estimate = std::sqrt(nrm2);
        rec.nrm = std::sqrt(nrm2);
        rec.tenvecs = tenvecs;
        rec.ms = ms_since(t0);
        res.report.steps.push_back(rec);
    }

    std::array<bool, 3> upd;
    for (int l = 0; l < 3; ++l) {
        upd[static_cast<size_t>(l)] =
            sizes[static_cast<size_t>(l)] < cfg.r_max[static_cast<size_t>(l)];
        if (!upd[static_cast<size_t>(l)])
            res.report.mode_termination[static_cast<size_t>(l)] = Termination::max_rank;
    }

    auto record_growth = [&](int mode, double err) {
        StepRecord rec;
        rec.step = ++step_no;
        rec.mode = mode;
        rec.sizes = sizes;
        rec.err_estimate = err;
        rec.nrm = std::sqrt(nrm2);
        rec.tenvecs = tenvecs;
        rec.ms = ms_since(t0);
        res.report.steps.push_back(rec);
    };
    // restriction sizes at which a mode last stalled (transient when the
    // other bases grow afterwards)
    std::array<std::pair<Index, Index>, 3> stall_sizes{};
    auto restriction_of = [&](int mode) {
        const int m1 = cyclic_succ(mode), m2 = cyclic_succ(m1);
        return std::pair<Index, Index>{sizes[static_cast<size_t>(m1 - 1)],
                                       sizes[static_cast<size_t>(m2 - 1)]};
    };
    auto stop_mode = [&](int mode, Termination why) {
        upd[static_cast<size_t>(mode - 1)] = false;
        res.report.mode_termination[static_cast<size_t>(mode - 1)] = why;
        if (why == Termination::breakdown) {
            stall_sizes[static_cast<size_t>(mode - 1)] = restriction_of(mode);
            if (res.report.breakdown_mode == 0) {
                res.report.breakdown_mode = mode;
                res.report.breakdown_step =
                    static_cast<int>(sizes[static_cast<size_t>(mode - 1)]) + 1;
            }
        }
    };

    while (true) {
        for (int mode = 1; mode <= 3; ++mode) {
            if (!upd[static_cast<size_t>(mode - 1)] &&
                res.report.mode_termination[static_cast<size_t>(mode - 1)] ==
                    Termination::breakdown &&
                stall_sizes[static_cast<size_t>(mode - 1)] != restriction_of(mode))
                upd[static_cast<size_t>(mode - 1)] = true;  // restriction changed
        }
        if (!(upd[0] || upd[1] || upd[2])) break;
        const Index k = sizes[0], l = sizes[1], m = sizes[2];

        if (upd[0]) {  // grow the mode-1 basis from the newest mode-1 slice
            const Matrix& slice = slices.back();  // l x m
            bool ok = false;
            const int attempts = cfg.retry_on_breakdown ? 2 : 1;
            for (int attempt = 0; attempt < attempts && !ok; ++attempt) {
                Vector yh, zh;
                if (attempt == 0) {
                    const SliceRank1 piv = pivot_wlncr(slice);
                    if (piv.sigma <= cfg.tol * std::sqrt(nrm2)) continue;
                    yh = piv.yhat;
                    zh = piv.zhat;
                } else {
                    yh = random_unit_vector(l, rng);
                    zh = random_unit_vector(m, rng);
                }
                const Vector x = src.tenvec(1, bases[1].leftCols(l) * yh,
                                            bases[2].leftCols(m) * zh);
                ++tenvecs;
                Vector xo = orthogonalize(bases[0], k, x);
                if (x.norm() == 0.0 || xo.norm() < cfg.tol * x.norm()) continue;
                bases[0].col(k) = xo / xo.norm();
                sizes[0] = k + 1;
                // new slab from cached fibres: no tenvecs
                Matrix slab(l, m);
                for (Index sidx = 0; sidx < m; ++sidx)
                    for (Index q = 0; q < l; ++q)
                        slab(q, sidx) =
                            bases[0].col(k).dot(fibres[static_cast<size_t>(q)][static_cast<size_t>(sidx)]);
                const double err = slab.norm();
                nrm2 += err * err;
                ok = true;
                const bool converged = err < cfg.eps * std::sqrt(nrm2);
                if (converged) {  // contribution below eps: drop the direction
                    nrm2 -= err * err;
                    sizes[0] = k;
                } else {
                    slices.push_back(slab);
                }
                record_growth(1, err);
                if (converged)
                    stop_mode(1, Termination::converged);
                else if (sizes[0] == cfg.r_max[0])
                    stop_mode(1, Termination::max_rank);
            }
            if (!ok) stop_mode(1, Termination::breakdown);
        }

        if (upd[1]) {  // grow the mode-2 basis from the newest mode-2 slice
            const Index k2 = sizes[0];
            Matrix slice(m, k2);  // rows: mode-3 coords, cols: mode-1 coords
            for (Index p = 0; p < k2; ++p)
                for (Index sidx = 0; sidx < m; ++sidx)
                    slice(sidx, p) = slices[static_cast<size_t>(p)](l - 1, sidx);
            bool ok = false;
            const int attempts = cfg.retry_on_breakdown ? 2 : 1;
            for (int attempt = 0; attempt < attempts && !ok; ++attempt) {
                Vector zh, xh;
                if (attempt == 0) {
                    const SliceRank1 piv = pivot_wlncr(slice);
                    if (piv.sigma <= cfg.tol * std::sqrt(nrm2)) continue;
                    zh = piv.yhat;
                    xh = piv.zhat;
                } else {
                    zh = random_unit_vector(m, rng);
                    xh = random_unit_vector(k2, rng);
                }
                const Vector y = src.tenvec(2, bases[2].leftCols(m) * zh,
                                            bases[0].leftCols(k2) * xh);
                ++tenvecs;
                Vector yo = orthogonalize(bases[1], l, y);
                if (y.norm() == 0.0 || yo.norm() < cfg.tol * y.norm()) continue;
                bases[1].col(l) = yo / yo.norm();
                sizes[1] = l + 1;
                // new fibres for the new row of basis pairs, then the slab
                fibres.push_back({});
                auto& row = fibres.back();
                row.reserve(static_cast<size_t>(m));
                for (Index sidx = 0; sidx < m; ++sidx) {
                    row.push_back(src.tenvec(1, bases[1].col(l), bases[2].col(sidx)));
                    ++tenvecs;
                }
                double err2 = 0.0;
                for (Index p = 0; p < k2; ++p) {
                    auto& sl = slices[static_cast<size_t>(p)];
                    sl.conservativeResize(l + 1, m);
                    for (Index sidx = 0; sidx < m; ++sidx) {
                        const double val =
                            bases[0].col(p).dot(row[static_cast<size_t>(sidx)]);
                        sl(l, sidx) = val;
                        err2 += val * val;
                    }
                }
                nrm2 += err2;
                const double err = std::sqrt(err2);
                ok = true;
                const bool converged = err < cfg.eps * std::sqrt(nrm2);
                if (converged) {  // drop the direction, its fibres and its slab
                    nrm2 -= err2;
                    sizes[1] = l;
                    fibres.pop_back();
                    for (Index p = 0; p < k2; ++p)
                        slices[static_cast<size_t>(p)].conservativeResize(l, m);
                }
                record_growth(2, err);
                if (converged)
                    stop_mode(2, Termination::converged);
                else if (sizes[1] == cfg.r_max[1])
                    stop_mode(2, Termination::max_rank);
            }
            if (!ok) stop_mode(2, Termination::breakdown);
        }

        if (upd[2]) {  // grow the mode-3 basis from the newest mode-3 slice
            const Index k3 = sizes[0], l3 = sizes[1];
            Matrix slice(k3, l3);  // rows: mode-1 coords, cols: mode-2 coords
            for (Index p = 0; p < k3; ++p)
                for (Index q = 0; q < l3; ++q)
                    slice(p, q) = slices[static_cast<size_t>(p)](q, m - 1);
            bool ok = false;
            const int attempts = cfg.retry_on_breakdown ? 2 : 1;
            for (int attempt = 0; attempt < attempts && !ok; ++attempt) {
                Vector xh, yh;
                if (attempt == 0) {
                    const SliceRank1 piv = pivot_wlncr(slice);
                    if (piv.sigma <= cfg.tol * std::sqrt(nrm2)) continue;
                    xh = piv.yhat;
                    yh = piv.zhat;
                } else {
                    xh = random_unit_vector(k3, rng);
                    yh = random_unit_vector(l3, rng);
                }
                const Vector z = src.tenvec(3, bases[0].leftCols(k3) * xh,
                                            bases[1].leftCols(l3) * yh);
                ++tenvecs;
                Vector zo = orthogonalize(bases[2], m, z);
                if (z.norm() == 0.0 || zo.norm() < cfg.tol * z.norm()) continue;
                bases[2].col(m) = zo / zo.norm();
                sizes[2] = m + 1;
                // one new fibre per existing mode-2 basis column, then the slab
                double err2 = 0.0;
                for (Index q = 0; q < l3; ++q) {
                    fibres[static_cast<size_t>(q)].push_back(
                        src.tenvec(1, bases[1].col(q), bases[2].col(m)));
                    ++tenvecs;
                }
                for (Index p = 0; p < k3; ++p) {
                    auto& sl = slices[static_cast<size_t>(p)];
                    sl.conservativeResize(l3, m + 1);
                    for (Index q = 0; q < l3; ++q) {
                        const double val = bases[0].col(p).dot(
                            fibres[static_cast<size_t>(q)][static_cast<size_t>(m)]);
                        sl(q, m) = val;
                        err2 += val * val;
                    }
                }
                nrm2 += err2;
                const double err = std::sqrt(err2);
                ok = true;
                const bool converged = err < cfg.eps * std::sqrt(nrm2);
                if (converged) {  // drop the direction, its fibres and its slab
                    nrm2 -= err2;
                    sizes[2] = m;
                    for (Index q = 0; q < l3; ++q) fibres[static_cast<size_t>(q)].pop_back();
                    for (Index p = 0; p < k3; ++p)
                        slices[static_cast<size_t>(p)].conservativeResize(l3, m);
                }
                record_growth(3, err);
                if (converged)
                    stop_mode(3, Termination::converged);
                else if (sizes[2] == cfg.r_max[2])
                    stop_mode(3, Termination::max_rank);
            }
            if (!ok) stop_mode(3, Termination::breakdown);
        }
    }

    bool any_break = false, any_max = false;
    for (auto t : res.report.mode_termination) {
        any_break |= t == Termination::breakdown;
        any_max |= t == Termination::max_rank;
    }
    assemble(any_break ? Termination::breakdown
                       : (any_max ? Termination::max_rank : Termination::converged));
    return res;
}

TuckerApproxResult tucker_approximate(const TenvecSource& src, const ApproxConfig& cfg) {
    const Shape3 s = src.shape();
    auto rng = make_rng(cfg.seed);
    const Vector u1 = cfg.start_u ? *cfg.start_u : random_unit_vector(s.n1, rng);
    const Vector v1 = cfg.start_v ? *cfg.start_v : random_unit_vector(s.n2, rng);
    const Vector w1 = cfg.start_w ? *cfg.start_w : random_unit_vector(s.n3, rng);

    const auto t0 = clock_type::now();
    TuckerApproxResult res;

    switch (cfg.strategy.kind) {
        case PivotStrategy::Wsvd:
        case PivotStrategy::Wlnc: {
            std::array<Matrix, 3> bases;
            long tenvecs = 0;
            double ms_off = 0.0;
            int step_off = 0;
            std::array<Index, 3> done{0, 0, 0};
            bool any_break = false, any_max = false;
            for (int mode = 1; mode <= 3; ++mode) {
                auto sub = dominant_subspace(src, mode, cfg.strategy, cfg.tol, cfg.eps,
                                             cfg.r_max[static_cast<size_t>(mode - 1)],
                                             cfg.seed + static_cast<std::uint64_t>(mode));
                bases[static_cast<size_t>(mode - 1)] = std::move(sub.X);
                for (auto rec : sub.report.steps) {
                    const Index own = rec.sizes[static_cast<size_t>(mode - 1)];
                    rec.step += step_off;
                    rec.tenvecs += tenvecs;
                    rec.ms += ms_off;
                    rec.sizes = done;
                    rec.sizes[static_cast<size_t>(mode - 1)] = own;
                    res.report.steps.push_back(rec);
                }
                step_off += static_cast<int>(sub.report.steps.size());
                tenvecs += sub.report.tenvec_count;
                ms_off += sub.report.wall_time_ms;
                done[static_cast<size_t>(mode - 1)] =
                    bases[static_cast<size_t>(mode - 1)].cols();
                const Termination t = sub.report.termination;
                res.report.mode_termination[static_cast<size_t>(mode - 1)] = t;
                if (t == Termination::breakdown) {
                    any_break = true;
                    if (res.report.breakdown_mode == 0) {
                        res.report.breakdown_mode = sub.report.breakdown_mode;
                        res.report.breakdown_step = sub.report.breakdown_step;
                    }
                }
                any_max |= t == Termination::max_rank;
                if (res.report.estimator.empty())
                    res.report.estimator = sub.report.estimator;
            }
            res.tucker.core = compute_core(src, bases[0], bases[1], bases[2], &tenvecs);
            for (int l = 0; l < 3; ++l) {
                res.tucker.factors[static_cast<size_t>(l)] = bases[static_cast<size_t>(l)];
                res.tucker.orthonormal[static_cast<size_t>(l)] = true;
            }
            res.report.algorithm = to_string(cfg.strategy.kind);
            res.report.final_ranks = done;
            res.report.tenvec_count = tenvecs;
            res.report.termination =
                any_break ? Termination::breakdown
                          : (any_max ? Termination::max_rank : Termination::converged);
            break;
        }
        case PivotStrategy::WsvdR: {
            OptMkrConfig oc;
            oc.r_max = cfg.r_max;
            oc.tol = cfg.tol;
            oc.eps = cfg.eps;
            oc.p_als = cfg.strategy.p_als;
            oc.seed = cfg.seed;
            oc.retry_on_breakdown = cfg.retry_on_breakdown.value_or(false);
            auto kr = optimized_mkr(src, u1, v1, oc);
            res.report = std::move(kr.report);
            long tenvecs = res.report.tenvec_count;
            res.tucker.core =
                compute_core(src, kr.bases[0], kr.bases[1], kr.bases[2], &tenvecs);
            res.report.tenvec_count = tenvecs;
            for (int l = 0; l < 3; ++l) {
                res.tucker.factors[static_cast<size_t>(l)] = std::move(kr.bases[static_cast<size_t>(l)]);
                res.tucker.orthonormal[static_cast<size_t>(l)] = true;
            }
            res.report.algorithm = "wsvdr";
            break;
        }
        case PivotStrategy::WlncR: {
            WlncrConfig wc;
            wc.r_max = cfg.r_max;
            wc.tol = cfg.tol;
            wc.eps = cfg.eps;
            wc.seed = cfg.seed;
            wc.retry_on_breakdown = cfg.retry_on_breakdown.value_or(false);
            res = wlncr_drive(src, u1, v1, w1, wc);
            break;
        }
    }
    res.report.wall_time_ms = ms_since(t0);
    return res;
}

}  // namespace tenkrylov
