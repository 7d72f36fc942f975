#include "tenkrylov/oracle.hpp"

#include "tenkrylov/rng.hpp"
#include "tenkrylov/tensor_krylov.hpp"
#include "tenkrylov/tensor_ops.hpp"
#include "tenkrylov/tensor_wedderburn.hpp"

#include <Eigen/SVD>

namespace tenkrylov {

TuckerTensor hosvd(const DenseTensor3& t, std::array<Index, 3> ranks) {
    const Shape3 s = t.shape();
    for (int l = 0; l < 3; ++l) {
        if (ranks[static_cast<size_t>(l)] < 1 || ranks[static_cast<size_t>(l)] > s[l + 1])
            throw std::invalid_argument("hosvd: rank out of range for mode");
    }
    TuckerTensor out;
    for (int l = 0; l < 3; ++l) {
        const Matrix unf = unfold(t, l + 1);
        Eigen::BDCSVD<Matrix> svd(unf, Eigen::ComputeThinU);
        out.factors[static_cast<size_t>(l)] =
            svd.matrixU().leftCols(ranks[static_cast<size_t>(l)]);
        out.orthonormal[static_cast<size_t>(l)] = true;
    }
    DenseTensor3 core = mode_multiply(t, 1, out.factors[0].transpose());
    core = mode_multiply(core, 2, out.factors[1].transpose());
    core = mode_multiply(core, 3, out.factors[2].transpose());
    out.core = std::move(core);
    return out;
}

TuckerTensor tucker_als(const TenvecSource& src, const TuckerTensor& init,
                        int iterations, std::vector<std::string>* warnings) {
    init.validate();
    for (int l = 0; l < 3; ++l)
        if (!init.orthonormal[static_cast<size_t>(l)])
            throw std::invalid_argument("tucker_als: init factors must be orthonormal");
    if (iterations < 0) throw std::invalid_argument("tucker_als: negative iteration count");

    TuckerTensor cur = init;
    for (int it = 0; it < iterations; ++it) {
        for (int mode = 1; mode <= 3; ++mode) {
            const int m1 = cyclic_succ(mode), m2 = cyclic_succ(m1);
            const Matrix& f1 = cur.factors[static_cast<size_t>(m1 - 1)];
            const Matrix& f2 = cur.factors[static_cast<size_t>(m2 - 1)];
            const Index r1 = f1.cols(), r2 = f2.cols();
            const Index n = src.shape()[mode];
            Index r = cur.factors[static_cast<size_t>(mode - 1)].cols();

            // reduced tensor from r1*r2 fibres along `mode`
            Matrix b(n, r1 * r2);  // columns paired (q, s), q fastest
            for (Index sidx = 0; sidx < r2; ++sidx)
                for (Index q = 0; q < r1; ++q)
                    b.col(q + r1 * sidx) = src.tenvec(mode, f1.col(q), f2.col(sidx));

            Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU);
            const auto& sv = svd.singularValues();
            Index effective = 0;
            for (Index i = 0; i < std::min(r, sv.size()); ++i)
                if (sv[i] > 1e-13 * sv[0]) ++effective;
            if (effective < r) {
                if (warnings)
                    warnings->push_back("tucker_als: mode " + std::to_string(mode) +
                                        " rank collapsed to " + std::to_string(effective));
                r = std::max<Index>(effective, 1);
            }
            const Matrix u = svd.matrixU().leftCols(r);
            const Matrix g = u.transpose() * b;  // r x (r1*r2)

            cur.factors[static_cast<size_t>(mode - 1)] = u;
            cur.orthonormal[static_cast<size_t>(mode - 1)] = true;
            // reshape g into the core with `mode` first, then unpermute
            DenseTensor3 gperm({r, r1, r2},
                               std::vector<double>(g.data(), g.data() + g.size()));
            switch (mode) {
                case 1: cur.core = std::move(gperm); break;
                case 2: {
                    DenseTensor3 core(r2, r, r1);
                    for (Index c = 0; c < r2; ++c)
                        for (Index bq = 0; bq < r1; ++bq)
                            for (Index a = 0; a < r; ++a) core(c, a, bq) = gperm(a, bq, c);
                    cur.core = std::move(core);
                    break;
                }
                default: {
                    DenseTensor3 core(r1, r2, r);
                    for (Index c = 0; c < r2; ++c)
                        for (Index bq = 0; bq < r1; ++bq)
                            for (Index a = 0; a < r; ++a) core(bq, c, a) = gperm(a, bq, c);
                    cur.core = std::move(core);
                    break;
                }
            }
        }
    }
    return cur;
}

Rank1Result brute_rank1(const DenseTensor3& t, int restarts, int sweeps,
                        std::uint64_t seed) {
    if (restarts < 1 || sweeps < 1)
        throw std::invalid_argument("brute_rank1: restarts and sweeps must be >= 1");
    const DenseSource src(t);
    auto rng = make_rng(seed);
    Rank1Result best;
    best.sigma = -1.0;
    for (int r = 0; r < restarts; ++r) {
        const Vector v0 = random_unit_vector(t.n2(), rng);
        const Vector w0 = random_unit_vector(t.n3(), rng);
        Rank1Result cand = als_rank1(src, v0, w0, sweeps);
        if (cand.sigma > best.sigma) best = cand;
    }
    if (best.sigma < 0.0) best.sigma = 0.0;
    return best;
}

}  // namespace tenkrylov
