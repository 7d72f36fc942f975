#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tenkrylov/generators.hpp"
#include "tenkrylov/oracle.hpp"
#include "tenkrylov/rng.hpp"
#include "tenkrylov/sources.hpp"
#include "tenkrylov/tensor_ops.hpp"

#include <Eigen/SVD>

using namespace tenkrylov;

namespace {

DenseTensor3 random_tensor(Index n1, Index n2, Index n3, std::mt19937_64& rng) {
    DenseTensor3 t(n1, n2, n3);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
    return t;
}

DenseTensor3 rank1_tensor(const Vector& u, const Vector& v, const Vector& w) {
    DenseTensor3 t(u.size(), v.size(), w.size());
    for (Index k = 0; k < w.size(); ++k)
        for (Index j = 0; j < v.size(); ++j)
            for (Index i = 0; i < u.size(); ++i) t(i, j, k) = u[i] * v[j] * w[k];
    return t;
}

}  // namespace

TEST_CASE("unfold matches the hand-enumerated 2x2x2 example") {
    DenseTensor3 t(2, 2, 2);
    for (Index k = 0; k < 2; ++k)
        for (Index j = 0; j < 2; ++j)
            for (Index i = 0; i < 2; ++i) t(i, j, k) = static_cast<double>(i + 2 * j + 4 * k);
    const Matrix m = unfold(t, 1);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 4);
    const double row0[] = {0, 2, 4, 6};
    const double row1[] = {1, 3, 5, 7};
    for (int c = 0; c < 4; ++c) {
        CHECK(m(0, c) == row0[c]);
        CHECK(m(1, c) == row1[c]);
    }
    CHECK_THROWS_AS(unfold(t, 4), std::invalid_argument);
}

TEST_CASE("unfold/refold round-trips bit-exactly for every mode") {
    auto rng = make_rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const Index n1 = 2 + static_cast<Index>(rng() % 6);
        const Index n2 = 2 + static_cast<Index>(rng() % 5);
        const Index n3 = 2 + static_cast<Index>(rng() % 4);
        const DenseTensor3 t = random_tensor(n1, n2, n3, rng);
        for (int mode = 1; mode <= 3; ++mode) {
            const DenseTensor3 back = refold(unfold(t, mode), mode, t.shape());
            REQUIRE(back.shape() == t.shape());
            for (Index i = 0; i < t.size(); ++i) CHECK(back.data()[i] == t.data()[i]);
        }
    }
}

TEST_CASE("unfolding of a rank-1 tensor is the rank-1 matrix u (v kron w)^T") {
    auto rng = make_rng(3);
    const Vector u = random_unit_vector(4, rng);
    const Vector v = random_unit_vector(3, rng);
    const Vector w = random_unit_vector(5, rng);
    const DenseTensor3 t = rank1_tensor(u, v, w);
    const Matrix m = unfold(t, 1);
    const Matrix expected = u * kron_pair(v, w).transpose();
    CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::JacobiSVD<Matrix> svd(m);
    CHECK(svd.singularValues()[1] < 1e-12 * svd.singularValues()[0]);
}

TEST_CASE("unfolding columns pair with tenvec long vectors") {
    // A^(1) (p kron q) must equal the tenvec at skip mode 1
    auto rng = make_rng(9);
    const DenseTensor3 t = random_tensor(3, 4, 5, rng);
    const Vector p = random_unit_vector(4, rng);
    const Vector q = random_unit_vector(5, rng);
    const DenseSource src(t);
    const Vector direct = src.tenvec(1, p, q);
    const Vector via_unfold = unfold(t, 1) * kron_pair(p, q);
    CHECK((direct - via_unfold).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("mode_multiply basics") {
    auto rng = make_rng(5);
    const DenseTensor3 t = random_tensor(3, 4, 5, rng);

    SUBCASE("identity is exact") {
        for (int mode = 1; mode <= 3; ++mode) {
            const Index n = t.shape()[mode];
            const DenseTensor3 r = mode_multiply(t, mode, Matrix::Identity(n, n));
            for (Index i = 0; i < t.size(); ++i) CHECK(r.data()[i] == t.data()[i]);
        }
    }
    SUBCASE("all-ones row sum") {
        DenseTensor3 ones(2, 2, 2);
        for (Index i = 0; i < 8; ++i) ones.data()[i] = 1.0;
        Matrix row(1, 2);
        row << 1.0, 1.0;
        const DenseTensor3 r = mode_multiply(ones, 2, row);
        REQUIRE(r.shape() == Shape3{2, 1, 2});
        for (Index i = 0; i < r.size(); ++i) CHECK(r.data()[i] == doctest::Approx(2.0));
    }
    SUBCASE("two successive mode-2 multiplies match the product matrix") {
        const Matrix m1 = random_gaussian_matrix(6, 4, rng);
        const Matrix m2 = random_gaussian_matrix(3, 6, rng);
        const DenseTensor3 two_step = mode_multiply(mode_multiply(t, 2, m1), 2, m2);
        const DenseTensor3 one_step = mode_multiply(t, 2, Matrix(m2 * m1));
        const double scale = frobenius_norm(one_step);
        CHECK(frobenius_norm(two_step) > 0.0);
        double dev = 0.0;
        for (Index i = 0; i < one_step.size(); ++i)
            dev = std::max(dev, std::abs(two_step.data()[i] - one_step.data()[i]));
        CHECK(dev < 1e-13 * scale);
    }
    SUBCASE("multiplies on distinct modes commute") {
        const Matrix p = random_gaussian_matrix(2, 3, rng);
        const Matrix q = random_gaussian_matrix(5, 4, rng);
        const DenseTensor3 a = mode_multiply(mode_multiply(t, 1, p), 2, q);
        const DenseTensor3 b = mode_multiply(mode_multiply(t, 2, q), 1, p);
        double dev = 0.0;
        for (Index i = 0; i < a.size(); ++i)
            dev = std::max(dev, std::abs(a.data()[i] - b.data()[i]));
        CHECK(dev < 1e-13 * frobenius_norm(a));
    }
    SUBCASE("orthogonal invariance of the Frobenius norm") {
        for (int mode = 1; mode <= 3; ++mode) {
            const Index n = t.shape()[mode];
            const Matrix q = random_orthonormal(n, n, rng);
            const DenseTensor3 r = mode_multiply(t, mode, q);
            CHECK(frobenius_norm(r) ==
                  doctest::Approx(frobenius_norm(t)).epsilon(1e-12));
        }
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(mode_multiply(t, 2, Matrix::Identity(3, 3)), std::invalid_argument);
    }
}

TEST_CASE("frobenius_inner") {
    DenseTensor3 ones(2, 2, 2);
    for (Index i = 0; i < 8; ++i) ones.data()[i] = 1.0;
    CHECK(frobenius_inner(ones, ones) == 8.0);

    DenseTensor3 a(2, 2, 2), b(2, 2, 2);
    a(0, 0, 0) = 3.0;  // disjoint supports
    b(1, 1, 1) = 4.0;
    CHECK(frobenius_inner(a, b) == 0.0);

    auto rng = make_rng(17);
    const DenseTensor3 x = random_tensor(3, 3, 3, rng);
    const DenseTensor3 y = random_tensor(3, 3, 3, rng);
    double naive = 0.0;
    for (Index k = 0; k < 3; ++k)
        for (Index j = 0; j < 3; ++j)
            for (Index i = 0; i < 3; ++i) naive += x(i, j, k) * y(i, j, k);
    CHECK(frobenius_inner(x, y) == doctest::Approx(naive).epsilon(1e-13));

    CHECK_THROWS_AS(frobenius_inner(a, random_tensor(2, 2, 3, rng)), std::invalid_argument);
}

TEST_CASE("tucker_reconstruct") {
    auto rng = make_rng(23);
    SUBCASE("rank-1 core") {
        const Vector u = random_unit_vector(4, rng);
        const Vector v = random_unit_vector(3, rng);
        const Vector w = random_unit_vector(5, rng);
        TuckerTensor t;
        t.core = DenseTensor3(1, 1, 1);
        t.core(0, 0, 0) = 2.5;
        t.factors = {Matrix(u), Matrix(v), Matrix(w)};
        const DenseTensor3 dense = tucker_reconstruct(t);
        const DenseTensor3 expected = rank1_tensor(u, v, w);
        for (Index i = 0; i < dense.size(); ++i)
            CHECK(dense.data()[i] == doctest::Approx(2.5 * expected.data()[i]).epsilon(1e-13));
    }
    SUBCASE("identity factors reproduce the core") {
        const DenseTensor3 core = random_tensor(3, 4, 2, rng);
        TuckerTensor t;
        t.core = core;
        t.factors = {Matrix::Identity(3, 3), Matrix::Identity(4, 4), Matrix::Identity(2, 2)};
        const DenseTensor3 dense = tucker_reconstruct(t);
        for (Index i = 0; i < dense.size(); ++i) CHECK(dense.data()[i] == core.data()[i]);
    }
    SUBCASE("matches the quadruple-loop oracle") {
        TuckerTensor t;
        t.core = random_tensor(2, 2, 2, rng);
        for (int l = 0; l < 3; ++l) {
            t.factors[static_cast<size_t>(l)] = random_orthonormal(5, 2, rng);
            t.orthonormal[static_cast<size_t>(l)] = true;
        }
        const DenseTensor3 dense = tucker_reconstruct(t);
        DenseTensor3 oracle(5, 5, 5);
        for (Index k = 0; k < 5; ++k)
            for (Index j = 0; j < 5; ++j)
                for (Index i = 0; i < 5; ++i) {
                    double acc = 0.0;
                    for (Index c = 0; c < 2; ++c)
                        for (Index b = 0; b < 2; ++b)
                            for (Index a = 0; a < 2; ++a)
                                acc += t.core(a, b, c) * t.factors[0](i, a) *
                                       t.factors[1](j, b) * t.factors[2](k, c);
                    oracle(i, j, k) = acc;
                }
        double dev = 0.0;
        for (Index i = 0; i < dense.size(); ++i)
            dev = std::max(dev, std::abs(dense.data()[i] - oracle.data()[i]));
        CHECK(dev < 1e-13 * frobenius_norm(oracle));
    }
}

TEST_CASE("tucker_residual_norm") {
    auto rng = make_rng(31);
    auto random_tucker = [&](Shape3 s, std::array<Index, 3> r) {
        TuckerTensor t;
        t.core = random_tensor(r[0], r[1], r[2], rng);
        for (int l = 0; l < 3; ++l)
            t.factors[static_cast<size_t>(l)] = random_gaussian_matrix(s[l + 1], r[static_cast<size_t>(l)], rng);
        return t;
    };
    const Shape3 s{6, 5, 4};
    const TuckerTensor a = random_tucker(s, {2, 3, 2});
    const TuckerTensor b = random_tucker(s, {3, 2, 2});

    SUBCASE("identical operands give zero") {
        const double n = tucker_residual_norm(a, a);
        CHECK(n <= 1e-12 * frobenius_norm(tucker_reconstruct(a)));
    }
    SUBCASE("zero second operand with orthonormal factors recovers the core norm") {
        TuckerTensor c;
        c.core = random_tensor(2, 2, 2, rng);
        for (int l = 0; l < 3; ++l) {
            c.factors[static_cast<size_t>(l)] = random_orthonormal(s[l + 1], 2, rng);
            c.orthonormal[static_cast<size_t>(l)] = true;
        }
        TuckerTensor zero = c;
        for (Index i = 0; i < zero.core.size(); ++i) zero.core.data()[i] = 0.0;
        CHECK(tucker_residual_norm(c, zero) ==
              doctest::Approx(frobenius_norm(c.core)).epsilon(1e-12));
    }
    SUBCASE("matches the densified oracle") {
        const double direct = tucker_residual_norm(a, b);
        DenseTensor3 da = tucker_reconstruct(a);
        const DenseTensor3 db = tucker_reconstruct(b);
        for (Index i = 0; i < da.size(); ++i) da.data()[i] -= db.data()[i];
        CHECK(direct == doctest::Approx(frobenius_norm(da)).epsilon(1e-11));
    }
    SUBCASE("symmetric in its arguments") {
        const double ab = tucker_residual_norm(a, b);
        const double ba = tucker_residual_norm(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
    }
    SUBCASE("ambient mismatch throws") {
        const TuckerTensor c = random_tucker({6, 5, 5}, {2, 2, 2});
        CHECK_THROWS_AS(tucker_residual_norm(a, c), std::invalid_argument);
    }
}

TEST_CASE("spectral_norm_estimate") {
    auto rng = make_rng(40);
    SUBCASE("rank-1 tensor gives its weight") {
        const Vector u = random_unit_vector(5, rng);
        const Vector v = random_unit_vector(4, rng);
        const Vector w = random_unit_vector(3, rng);
        DenseTensor3 t = rank1_tensor(u, v, w);
        for (Index i = 0; i < t.size(); ++i) t.data()[i] *= 3.0;
        const DenseSource src(t);
        CHECK(spectral_norm_estimate(src, 20, 1) == doctest::Approx(3.0).epsilon(1e-10));
    }
    SUBCASE("zero tensor gives zero") {
        const DenseSource src(DenseTensor3(3, 3, 3));
        CHECK(spectral_norm_estimate(src, 5, 1) == 0.0);
    }
    SUBCASE("matches the multi-restart dense oracle on a random 4x4x4") {
        const DenseTensor3 t = random_tensor(4, 4, 4, rng);
        const DenseSource src(t);
        double best = 0.0;
        for (int restart = 0; restart < 20; ++restart)
            best = std::max(best, spectral_norm_estimate(src, 50, 100 + restart));
        const Rank1Result oracle = brute_rank1(t, 20, 50, 4242);
        CHECK(best == doctest::Approx(oracle.sigma).epsilon(1e-6));
    }
    SUBCASE("never exceeds the Frobenius norm") {
        for (int trial = 0; trial < 10; ++trial) {
            const DenseTensor3 t = random_tensor(4, 5, 3, rng);
            const DenseSource src(t);
            CHECK(spectral_norm_estimate(src, 30, trial) <=
                  frobenius_norm(t) * (1.0 + 1e-12));
        }
    }
}
