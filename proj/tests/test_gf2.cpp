#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "hitkernel/gf2.hpp"

using namespace hitkernel;
using namespace hitkernel::gf2;

namespace {

BitRow row(std::size_t n, std::vector<std::uint32_t> idx) { return BitRow::from_indices(n, idx); }

BitMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, unsigned density = 2)
{
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (rng() % density == 0)
                m.set(i, j);
    return m;
}

// Every vector of the column space with M v = 0, by enumeration.
std::vector<std::uint32_t> brute_kernel(const BitMatrix& m)
{
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < (1u << m.ncols()); ++v) {
        BitRow x(m.ncols());
        for (std::size_t j = 0; j < m.ncols(); ++j)
            if ((v >> j) & 1u)
                x.set(j);
        if (m.apply(x).none())
            out.push_back(v);
    }
    return out;
}

std::uint32_t as_mask(const BitRow& r)
{
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (r.test(j))
            v |= 1u << j;
    return v;
}

// Span size of the given vectors, by closure.
std::size_t span_size(const std::vector<std::uint32_t>& gens)
{
    std::set<std::uint32_t> span{0};
    for (auto g : gens) {
        std::set<std::uint32_t> next = span;
        for (auto s : span)
            next.insert(s ^ g);
        span = std::move(next);
    }
    return span.size();
}

// Textbook dense rank for comparison.
std::size_t dense_rank(std::vector<std::vector<bool>> a)
{
    std::size_t r = 0;
    const std::size_t cols = a.empty() ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
        std::size_t p = r;
        while (p < a.size() && !a[p][c])
            ++p;
        if (p == a.size())
            continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (i != r && a[i][c])
                for (std::size_t k = 0; k < cols; ++k)
                    a[i][k] = a[i][k] ^ a[r][k];
        ++r;
    }
    return r;
}

}  // namespace

TEST(BitRow, Basics)
{
    BitRow r(130);
    r.set(0);
    r.set(64);
    r.set(129);
    EXPECT_EQ(r.count(), 3u);
    EXPECT_EQ(r.leading(), 0u);
    r.flip(0);
    EXPECT_EQ(r.leading(), 64u);
    EXPECT_EQ(r.indices(), (std::vector<std::uint32_t>{64, 129}));
    BitRow s = r;
    s ^= r;
    EXPECT_TRUE(s.none());
    EXPECT_FALSE(BitRow(10).leading().has_value());
}

TEST(SparseRow, SymmetricDifference)
{
    auto a = SparseRow::from_indices(10, {1, 4, 4, 7, 2});
    EXPECT_EQ(std::vector<std::uint32_t>(a.indices().begin(), a.indices().end()), (std::vector<std::uint32_t>{1, 2, 7}));
    a ^= SparseRow::from_sorted(10, {2, 3});
    EXPECT_EQ(std::vector<std::uint32_t>(a.indices().begin(), a.indices().end()), (std::vector<std::uint32_t>{1, 3, 7}));
    EXPECT_EQ(a.leading(), 1u);
}

TEST(OnlineReduce, Examples)
{
    PivotMap<BitRow> pm(8);
    auto r1 = online_reduce(row(8, {3}), pm);
    EXPECT_TRUE(r1.new_pivot);
    EXPECT_TRUE(pm.is_pivot(3));

    PivotMap<BitRow> pm2(8);
    online_reduce(row(8, {3, 7}), pm2);
    auto r2 = online_reduce(row(8, {3, 7}), pm2);
    EXPECT_FALSE(r2.new_pivot);
    EXPECT_TRUE(r2.row.none());
    EXPECT_EQ(pm2.rank(), 1u);

    PivotMap<BitRow> pm3(4);
    EXPECT_TRUE(online_reduce(row(4, {1, 2}), pm3).new_pivot);
    EXPECT_TRUE(online_reduce(row(4, {2, 3}), pm3).new_pivot);
    EXPECT_FALSE(online_reduce(row(4, {1, 3}), pm3).new_pivot);
    EXPECT_EQ(pm3.rank(), 2u);
}

TEST(OnlineReduce, LengthMismatchIsAnError)
{
    PivotMap<BitRow> pm(8);
    EXPECT_THROW(online_reduce(row(9, {1}), pm), Error);
}

TEST(PivotMap, LeadingBitsAreKeys)
{
    std::mt19937 rng(3);
    const auto m = random_matrix(rng, 40, 70);
    PivotMap<BitRow> pm(70);
    for (const auto& r : m.rows())
        online_reduce(r, pm);
    for (std::size_t i = 0; i < pm.rank(); ++i)
        ASSERT_EQ(pm.rows()[i].leading(), pm.keys()[i]);
    pm.back_substitute();
    for (std::size_t i = 0; i < pm.rank(); ++i)
        for (std::uint32_t k : pm.keys())
            if (k != pm.keys()[i]) {
                ASSERT_FALSE(pm.rows()[i].test(k));
            }
}

TEST(PivotMap, RankMatchesDenseElimination)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t r = 1 + rng() % 64, c = 1 + rng() % 64;
        const auto m = random_matrix(rng, r, c, 2 + trial % 4);
        PivotMap<BitRow> packed(c);
        PivotMap<SparseRow> sparse(c);
        std::vector<std::vector<bool>> dense(r, std::vector<bool>(c));
        for (std::size_t i = 0; i < r; ++i) {
            online_reduce(m.row(i), packed);
            online_reduce(SparseRow::from_sorted(c, m.row(i).indices()), sparse);
            for (std::size_t j = 0; j < c; ++j)
                dense[i][j] = m.test(i, j);
        }
        ASSERT_EQ(packed.rank(), dense_rank(dense));
        ASSERT_EQ(sparse.rank(), packed.rank());
        ASSERT_TRUE(std::equal(packed.keys().begin(), packed.keys().end(), sparse.keys().begin()));
    }
}

TEST(PivotMap, DeterministicForSameOrder)
{
    std::mt19937 rng(9);
    const auto m = random_matrix(rng, 50, 50);
    PivotMap<BitRow> a(50), b(50);
    for (const auto& r : m.rows()) {
        online_reduce(r, a);
        online_reduce(r, b);
    }
    EXPECT_TRUE(a == b);
}

TEST(SparseReducer, AgreesWithMergeReduction)
{
    std::mt19937 rng(21);
    for (std::size_t cols : {1u, 63u, 64u, 65u, 4097u, 300000u}) {
        PivotMap<SparseRow> merged(cols), tree(cols);
        SparseReducer reducer(cols);
        for (int i = 0; i < 400; ++i) {
            std::vector<std::uint32_t> idx;
            for (int t = 0; t < 1 + static_cast<int>(rng() % 6); ++t)
                idx.push_back(static_cast<std::uint32_t>(rng() % std::min<std::size_t>(cols, 200 + i)));
            auto a = SparseRow::from_indices(cols, idx);
            auto b = a;
            merged.reduce(a);
            reducer.reduce(b, tree);
            ASSERT_EQ(a, b);
            if (a.any()) {
                merged.insert_reduced(std::move(a));
                tree.insert_reduced(std::move(b));
            }
        }
        EXPECT_TRUE(merged == tree);
    }
}

TEST(Nullspace, Examples)
{
    BitMatrix id(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        id.set(i, i);
    auto ns = nullspace(id);
    EXPECT_EQ(ns.rank, 4u);
    EXPECT_TRUE(ns.basis.empty());

    BitMatrix ones(1, 2);
    ones.set(0, 0);
    ones.set(0, 1);
    ns = nullspace(ones);
    EXPECT_EQ(ns.rank, 1u);
    ASSERT_EQ(ns.basis.size(), 1u);
    EXPECT_EQ(ns.basis[0].indices(), (std::vector<std::uint32_t>{0, 1}));
}

TEST(Nullspace, RandomAgainstBruteForce)
{
    std::mt19937 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = random_matrix(rng, 8, 12);
        const auto ns = nullspace(m);
        ASSERT_EQ(ns.rank + ns.basis.size(), m.ncols());
        std::vector<std::uint32_t> gens;
        for (const auto& v : ns.basis) {
            ASSERT_TRUE(m.apply(v).none());
            gens.push_back(as_mask(v));
        }
        const auto all = brute_kernel(m);
        ASSERT_EQ(span_size(gens), all.size());
    }
}

TEST(SolveStacked, Examples)
{
    std::mt19937 rng(17);
    const auto a = random_matrix(rng, 4, 6);
    const auto single = solve_stacked(std::vector<BitMatrix>{a});
    const auto direct = nullspace(a);
    EXPECT_EQ(single.rank, direct.rank);
    EXPECT_EQ(single.basis, direct.basis);

    const auto with_zero = solve_stacked(std::vector<BitMatrix>{a, BitMatrix(3, 6)});
    EXPECT_EQ(with_zero.basis, direct.basis);

    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_matrix(rng, 4, 6);
        const auto y = random_matrix(rng, 4, 6);
        const auto ns = solve_stacked(std::vector<BitMatrix>{x, y});
        std::set<std::uint32_t> kx, ky;
        for (auto v : brute_kernel(x))
            kx.insert(v);
        std::size_t both = 0;
        for (auto v : brute_kernel(y))
            both += kx.count(v);
        std::vector<std::uint32_t> gens;
        for (const auto& v : ns.basis) {
            ASSERT_TRUE(x.apply(v).none());
            ASSERT_TRUE(y.apply(v).none());
            gens.push_back(as_mask(v));
        }
        ASSERT_EQ(span_size(gens), both);
    }
    EXPECT_THROW(solve_stacked(std::vector<BitMatrix>{BitMatrix(1, 3), BitMatrix(1, 4)}), Error);
}

TEST(Checkpoint, RoundTripBothRowKinds)
{
    std::mt19937 rng(21);
    const auto m = random_matrix(rng, 30, 200, 3);
    PivotMap<BitRow> packed(200);
    PivotMap<SparseRow> sparse(200);
    for (const auto& r : m.rows()) {
        online_reduce(r, packed);
        online_reduce(SparseRow::from_sorted(200, r.indices()), sparse);
    }
    std::stringstream a, b;
    write_pivot_map(a, packed);
    write_pivot_map(b, sparse);
    EXPECT_TRUE(read_pivot_map<BitRow>(a) == packed);
    EXPECT_TRUE(read_pivot_map<SparseRow>(b) == sparse);

    std::stringstream wrong;
    write_pivot_map(wrong, packed);
    EXPECT_THROW(read_pivot_map<SparseRow>(wrong), Error);
}

TEST(Checkpoint, LittleEndianLayout)
{
    std::stringstream s;
    io::put_u32(s, 0x01020304u);
    const std::string bytes = s.str();
    ASSERT_EQ(bytes.size(), 4u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 0x04);
    EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x01);
}

TEST(Checkpoint, RejectsGarbage)
{
    std::stringstream s("not a checkpoint at all");
    EXPECT_THROW(read_pivot_map<BitRow>(s), Error);
}
