#ifndef TENKRYLOV_GENERATORS_HPP
#define TENKRYLOV_GENERATORS_HPP

#include "tenkrylov/types.hpp"

#include <cstdint>

namespace tenkrylov {

/// Random Tucker tensor with orthonormal factors and a Gaussian core: exact
/// mode ranks (r1,r2,r3) with probability one, provided each rank does not
/// exceed the product of the other two (a core unfolding has rank at most
/// min(r_l, r_m * r_k)).
TuckerTensor generate_exact_tucker(Shape3 shape, std::array<Index, 3> ranks,
                                   std::uint64_t seed);

/// n x n x n tensor whose only nonzero mode-3 slices are the first two
/// (independent Gaussian matrices): mode-3 rank exactly 2, the classic
/// stagnation instance for the minimal Krylov recursion.
DenseTensor3 generate_two_slice(Index n, std::uint64_t seed);

/// n^3 tensor with a superdiagonal core decaying geometrically
/// (core(i,i,i) = rate^i) under random orthonormal factors; every mode
/// unfolding has singular values exactly rate^i.
DenseTensor3 generate_decaying_spectrum(Index n, double rate, std::uint64_t seed);

}  // namespace tenkrylov

#endif
