#include <gtest/gtest.h>

#include "hitkernel/bounds.hpp"
#include "hitkernel/qpspace.hpp"

using namespace hitkernel;

TEST(Bounds, ZeroCountMatchesDirectSquares)
{
    for (int q = 1; q <= 4; ++q)
        for (unsigned t = 0; t <= 3; ++t)
            for (unsigned s = 0; s <= 12; ++s) {
                std::uint64_t zero = 0;
                for_each_exponent(q, s, [&](const ExponentTuple& m) {
                    if (sq(1u << t, Polynomial(m)).is_zero())
                        ++zero;
                });
                ASSERT_EQ(z_prime(t, q, s), zero) << t << " " << q << " " << s;
            }
}

TEST(Bounds, ZeroCountBasics)
{
    // Sq^1 kills exactly the monomials with every exponent even.
    EXPECT_EQ(z_prime(0, 3, 6), monomial_count(3, 3));
    EXPECT_EQ(z_prime(0, 3, 5), 0u);
    // Sq^k vanishes on every monomial of degree below k.
    EXPECT_EQ(z_prime(3, 4, 5), monomial_count(4, 5));
    EXPECT_EQ(w_bound(1, 1), 0u);
    EXPECT_EQ(w_bound(1, 2), 1u);
}

TEST(Bounds, SandwichAroundExactRank)
{
    for (int q = 1; q <= 5; ++q)
        for (unsigned n = 1; n <= (q <= 3 ? 20u : 14u); ++n) {
            const auto ds = build_degree_space(q, n);
            const auto b = rank_bounds(q, n, ds.rank());
            ASSERT_LE(b.match.lb, ds.rank()) << "q=" << q << " n=" << n;
            ASSERT_LE(ds.rank(), b.upper()) << "q=" << q << " n=" << n;
            ASSERT_TRUE(b.sandwich_holds());
            ASSERT_EQ(dim_from_rank(q, n, ds.rank()), ds.dim());
        }
}

TEST(Bounds, SixVariablesDegree15)
{
    const auto ds = build_degree_space(6, 15);
    const auto b = rank_bounds(6, 15, ds.rank());
    EXPECT_EQ(b.total, 15504u);
    EXPECT_TRUE(b.sandwich_holds());
    EXPECT_GE(b.upper(), 13320u);
}

TEST(Bounds, DegenerateDegrees)
{
    const auto zero = rank_bounds(3, 0);
    EXPECT_EQ(zero.match.lb, 0u);
    EXPECT_EQ(zero.w_bound, 0u);
    EXPECT_TRUE(zero.sandwich_holds());
    EXPECT_EQ(rank_bounds(1, 3, 0).match.lb, 0u);
}

TEST(Bounds, DimFromRank)
{
    EXPECT_EQ(dim_from_rank(6, 15, 13320), 2184u);
    EXPECT_EQ(dim_from_rank(2, 3, 3), 1u);
    EXPECT_THROW(dim_from_rank(2, 3, 5), Error);
}
