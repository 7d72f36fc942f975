#include "tenkrylov/generators.hpp"

#include "tenkrylov/rng.hpp"
#include "tenkrylov/tensor_ops.hpp"

namespace tenkrylov {

TuckerTensor generate_exact_tucker(Shape3 shape, std::array<Index, 3> ranks,
                                   std::uint64_t seed) {
    for (int l = 0; l < 3; ++l)
        if (ranks[static_cast<size_t>(l)] < 1 || ranks[static_cast<size_t>(l)] > shape[l + 1])
            throw std::invalid_argument("generate_exact_tucker: rank out of range");
    auto rng = make_rng(seed);
    TuckerTensor t;
    t.core = DenseTensor3(ranks[0], ranks[1], ranks[2]);
    for (int l = 0; l < 3; ++l) {
        t.factors[static_cast<size_t>(l)] =
            random_orthonormal(shape[l + 1], ranks[static_cast<size_t>(l)], rng);
        t.orthonormal[static_cast<size_t>(l)] = true;
    }
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Index i = 0; i < t.core.size(); ++i) t.core.data()[i] = dist(rng);
    return t;
}

DenseTensor3 generate_two_slice(Index n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_two_slice: n must be >= 2");
    auto rng = make_rng(seed);
    DenseTensor3 t(n, n, n);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Index k = 0; k < 2; ++k)
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) t(i, j, k) = dist(rng);
    return t;
}

DenseTensor3 generate_decaying_spectrum(Index n, double rate, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_decaying_spectrum: n must be >= 1");
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("generate_decaying_spectrum: rate must lie in (0,1)");
    auto rng = make_rng(seed);
    TuckerTensor t;
    t.core = DenseTensor3(n, n, n);
    double s = 1.0;
    for (Index i = 0; i < n; ++i, s *= rate) t.core(i, i, i) = s;
    for (int l = 0; l < 3; ++l) {
        t.factors[static_cast<size_t>(l)] = random_orthonormal(n, n, rng);
        t.orthonormal[static_cast<size_t>(l)] = true;
    }
    return tucker_reconstruct(t);
}

}  // namespace tenkrylov
