#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coarse/generators.hpp"
#include "coarse/linalg.hpp"

using namespace coarse;

namespace {

DenseMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix m(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) m.set_sym(r, c, u(rng));
    return m;
}

}  // namespace

TEST(Jacobi, DiagonalMatrix) {
    DenseMatrix m(3);
    m(0, 0) = 3;
    m(1, 1) = -1;
    m(2, 2) = 2;
    auto e = jacobi_eigen(m);
    EXPECT_EQ(e.values, (std::vector<double>{-1, 2, 3}));
}

TEST(Jacobi, CycleAdjacencySpectrum) {
    const std::size_t n = 9;
    auto g = cycle_graph(n);
    DenseMatrix a(n);
    for (const auto& e : g.edges()) a.set_sym(e.u, e.v, 1.0);
    auto eig = jacobi_eigen(a);
    std::vector<double> expected;
    for (std::size_t k = 0; k < n; ++k) expected.push_back(2.0 * std::cos(2.0 * std::numbers::pi * k / n));
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(eig.values[i], expected[i], 1e-12);
}

TEST(Jacobi, ReconstructsRandomMatrices) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1u, 2u, 5u, 12u, 25u}) {
        auto m = random_symmetric(n, rng);
        auto e = jacobi_eigen(m);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double rec = 0.0, dot = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    rec += e.vectors(r, j) * e.values[j] * e.vectors(c, j);
                    dot += e.vectors(j, r) * e.vectors(j, c);
                }
                ASSERT_NEAR(rec, m(r, c), 1e-10);
                ASSERT_NEAR(dot, r == c ? 1.0 : 0.0, 1e-10);
            }
        }
        ASSERT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    }
}

TEST(Jacobi, ValuesWithoutVectorsMatch) {
    std::mt19937_64 rng(4);
    auto m = random_symmetric(15, rng);
    auto a = jacobi_eigen(m, true), b = jacobi_eigen(m, false);
    EXPECT_EQ(b.vectors.size(), 0u);
    for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
}

TEST(Jacobi, TraceIsPreserved) {
    std::mt19937_64 rng(6);
    auto m = random_symmetric(20, rng);
    double trace = 0.0;
    for (std::size_t i = 0; i < 20; ++i) trace += m(i, i);
    auto e = jacobi_eigen(m, false);
    double sum = 0.0;
    for (double v : e.values) sum += v;
    EXPECT_NEAR(sum, trace, 1e-11);
}

TEST(Center, AnnihilatesConstantsAndMatchesExplicitProjection) {
    std::mt19937_64 rng(8);
    const std::size_t n = 7;
    auto m = random_symmetric(n, rng);
    auto c = center(m);
    DenseMatrix p(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) p(r, s) = (r == s ? 1.0 : 0.0) - 1.0 / n;
    for (std::size_t r = 0; r < n; ++r) {
        double row = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double explicit_entry = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) explicit_entry += p(r, a) * m(a, b) * p(b, s);
            EXPECT_NEAR(c(r, s), explicit_entry, 1e-12);
            row += c(r, s);
        }
        EXPECT_NEAR(row, 0.0, 1e-12);
    }
    auto constant = center(DenseMatrix(5, 3.25));
    for (double x : constant.raw()) EXPECT_EQ(x, 0.0);
}
