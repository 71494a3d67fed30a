#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "hitkernel/invariants.hpp"
#include "hitkernel/oracle.hpp"
#include "test_util.hpp"

using namespace hitkernel;

namespace {

Polynomial load(const std::string& name) { return read_polynomial_file(hktest::data_file(name)).poly; }

const DegreeSpace& space_6_15()
{
    static const DegreeSpace ds = build_degree_space(6, 15);
    return ds;
}

}  // namespace

TEST(Rho, Examples)
{
    EXPECT_EQ(to_string(apply_rho(1, Polynomial(ExponentTuple{3, 1, 0}))), "x1*x2^3");
    EXPECT_EQ(apply_rho(6, Polynomial(ExponentTuple{0, 0, 0, 0, 0, 3})).size(), 4u);
    EXPECT_EQ(apply_rho(6, Polynomial(ExponentTuple{0, 0, 0, 0, 2, 2})).size(), 2u);
    EXPECT_EQ(apply_rho(1, Polynomial(ExponentTuple{7})), Polynomial(ExponentTuple{7}));
    EXPECT_THROW(apply_rho(4, Polynomial(ExponentTuple{1, 1, 1})), Error);
}

TEST(Rho, AgreesWithIndependentExpansion)
{
    std::mt19937 rng(12);
    for (int q = 1; q <= 6; ++q)
        for (int i = 0; i < 100; ++i) {
            const auto m = hktest::random_tuple(rng, q, 1 + rng() % 30);
            for (int j = 1; j <= q; ++j)
                ASSERT_EQ(apply_rho(j, Polynomial(m)), oracle::rho_dense(j, m)) << to_string(m) << " j=" << j;
        }
}

TEST(Rho, PreservesTheHitSpace)
{
    std::mt19937 rng(3);
    const auto ds = build_degree_space(4, 12);
    for (int i = 0; i < 100; ++i) {
        const unsigned k = 1u << (rng() % 3);
        const Polynomial hit = sq(k, Polynomial(hktest::random_tuple(rng, 4, 12 - k)));
        for (int j = 1; j <= 4; ++j)
            ASSERT_TRUE(ds.reduce_to_admissible(apply_rho(j, hit)).empty());
    }
}

TEST(Invariants, SixVariablesDegree15)
{
    const auto rep = full_space_invariants(6, 15);
    EXPECT_EQ(rep.route, "direct");
    ASSERT_EQ(rep.invariants.size(), 1u);
    const auto& ds = space_6_15();
    EXPECT_EQ(ds.reduce_to_admissible(load("xi_6_15.poly")), rep.invariants.front());
    EXPECT_TRUE(check_invariant(rep.polynomials.front(), ds).invariant);
}

TEST(Invariants, SixVariablesDegree15Checks)
{
    const auto& ds = space_6_15();
    EXPECT_TRUE(check_invariant(load("xi_6_15.poly"), ds).invariant);
    for (const char* name : {"h1_6_15.poly", "h2_6_15.poly", "h3_6_15.poly", "h4_6_15.poly", "h5_6_15.poly"})
        EXPECT_FALSE(check_invariant(load(name), ds).invariant) << name;
    const auto spike = check_invariant(Polynomial(ExponentTuple{15, 0, 0, 0, 0, 0}), ds);
    EXPECT_FALSE(spike.invariant);
    EXPECT_EQ(spike.residuals.size(), 6u);
    EXPECT_EQ(spike.residuals[0], 2u);  // x1^15 + x2^15
    EXPECT_EQ(spike.residuals[5], 0u);
}

TEST(Invariants, WeightwiseGLInsideSigma)
{
    const auto& ds = space_6_15();
    RhoTable rho(ds);
    std::vector<std::uint32_t> all(ds.dim());
    std::iota(all.begin(), all.end(), 0u);
    for (const auto& w : weightwise_invariants(rho, all, 4)) {
        EXPECT_LE(w.gl.size(), w.sigma.size()) << to_string(w.omega);
        EXPECT_LE(w.sigma.size(), w.support);
    }
}

TEST(Invariants, MatchExhaustiveSearch)
{
    int compared = 0;
    for (auto [q, top] : {std::pair{1, 10u}, std::pair{2, 12u}, std::pair{3, 12u}, std::pair{4, 9u}})
        for (unsigned n = 0; n <= top; ++n) {
            if (oracle::dense_qp_dim(q, n) > oracle::kInvariantGuard)
                continue;
            ASSERT_EQ(full_space_invariants(q, n).invariants.size(), oracle::dense_invariant_dim(q, n))
                << "q=" << q << " n=" << n;
            ++compared;
        }
    EXPECT_GT(compared, 30);
}

TEST(Invariants, KernelRouteMatchesDirectRoute)
{
    for (int q = 2; q <= 4; ++q)
        for (unsigned n = static_cast<unsigned>(q); n <= 16; n += 2) {
            const auto ds = build_degree_space(q, n);
            const auto tgt = build_degree_space(q, *kameko_target_degree(q, n));
            const auto kernel = invariants_of(ds, &tgt, {});
            const auto direct = invariants_of(ds, nullptr, {});
            ASSERT_EQ(kernel.invariants, direct.invariants) << "q=" << q << " n=" << n;
        }
}

TEST(Invariants, EveryReportedVectorIsInvariant)
{
    for (auto [q, n] : {std::pair{3, 9u}, std::pair{4, 11u}, std::pair{4, 14u}, std::pair{5, 9u}}) {
        const auto rep = full_space_invariants(q, n);
        const auto ds = build_degree_space(q, n);
        for (const auto& p : rep.polynomials)
            ASSERT_TRUE(check_invariant(p, ds).invariant);
    }
}

TEST(Invariants, CheckIsLinear)
{
    // Sum of an invariant and a non-invariant is never invariant.
    const auto& ds = space_6_15();
    const Polynomial xi = load("xi_6_15.poly");
    const Polynomial h = load("h1_6_15.poly");
    EXPECT_FALSE(check_invariant(xi + h, ds).invariant);
    EXPECT_TRUE(check_invariant(xi + xi, ds).invariant);
    const auto a = check_invariant(h, ds).residuals;
    const auto b = check_invariant(xi + h, ds).residuals;
    EXPECT_EQ(a, b);
}

TEST(Invariants, DeterministicAcrossWorkerCounts)
{
    InvariantOptions one, many;
    many.threads = 8;
    many.build.threads = 8;
    const auto a = full_space_invariants(5, 13, one);
    const auto b = full_space_invariants(5, 13, many);
    EXPECT_EQ(a.invariants, b.invariants);
    EXPECT_EQ(a.kernel_invariants, b.kernel_invariants);
}

TEST(Invariants, LibraryIsValidated)
{
    const auto ds = build_degree_space(4, 10);
    const auto tgt = build_degree_space(4, 3);
    InvariantOptions o;
    o.library = std::vector<Polynomial>{Polynomial(ExponentTuple{2, 0, 0, 0})};
    EXPECT_THROW(invariants_of(ds, &tgt, o), Error);
    o.library = std::vector<Polynomial>{Polynomial(ExponentTuple{3, 0, 0, 0})};
    EXPECT_THROW(invariants_of(ds, &tgt, o), Error);
}

TEST(Invariants, FiveVariablesDegree35)
{
    const auto rep = full_space_invariants(5, 35);
    EXPECT_EQ(rep.route, "kernel");
    EXPECT_EQ(rep.invariants.size(), 1u);
    EXPECT_TRUE(rep.kernel_invariants.empty());
}
