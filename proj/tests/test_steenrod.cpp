#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "hitkernel/oracle.hpp"
#include "hitkernel/steenrod.hpp"
#include "test_util.hpp"

using namespace hitkernel;

namespace {

Polynomial mono(std::initializer_list<unsigned> e) { return Polynomial(ExponentTuple(e)); }

}  // namespace

TEST(Sq, Examples)
{
    EXPECT_EQ(sq_on_monomial(1, {1}), mono({2}));
    EXPECT_EQ(sq_on_monomial(2, {3}), mono({5}));
    EXPECT_EQ(sq_on_monomial(2, {1, 2}), mono({1, 4}));
    EXPECT_EQ(sq_on_monomial(0, {4, 1, 3}), mono({4, 1, 3}));
    EXPECT_TRUE(sq_on_monomial(1, {2}).is_zero());
}

TEST(Sq, HitColumns)
{
    EXPECT_EQ(hit_column({1, 0, 0}, 1), std::vector<ExponentTuple>{ExponentTuple({2, 0, 0})});
    EXPECT_EQ(hit_column({3, 0, 0}, 2), std::vector<ExponentTuple>{ExponentTuple({5, 0, 0})});
    EXPECT_EQ(hit_column({1, 2}, 2), std::vector<ExponentTuple>{ExponentTuple({1, 4})});
    const auto col = hit_column({1, 1, 1}, 1);
    EXPECT_EQ(col.size(), 3u);
    EXPECT_TRUE(std::is_sorted(col.begin(), col.end()));
}

TEST(Sq, DegreeAndInstability)
{
    std::mt19937 rng(1);
    for (int i = 0; i < 500; ++i) {
        const int q = 1 + static_cast<int>(rng() % 4);
        const unsigned d = rng() % 11;
        const auto m = hktest::random_tuple(rng, q, d);
        for (unsigned k = 0; k <= d + 2; ++k) {
            const auto s = sq_on_monomial(k, m);
            for (const auto& t : s.terms())
                ASSERT_EQ(t.degree(), d + k);
            if (k > d) {
                ASSERT_TRUE(s.is_zero());
            }
        }
        ExponentTuple doubled(q);
        for (int v = 0; v < q; ++v)
            doubled.set(v, 2 * m[v]);
        ASSERT_EQ(sq_on_monomial(d, m), Polynomial(doubled));
    }
}

TEST(Sq, MatchesFullCartanExpansion)
{
    std::mt19937 rng(2);
    for (int i = 0; i < 300; ++i) {
        const int q = 1 + static_cast<int>(rng() % 4);
        const auto m = hktest::random_tuple(rng, q, rng() % 14);
        const unsigned k = rng() % 12;
        ASSERT_EQ(sq_on_monomial(k, m), oracle::sq_full(k, m)) << to_string(m) << " k=" << k;
    }
}

TEST(Sq, CartanIdentityOnProducts)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 300; ++i) {
        const int q = 1 + static_cast<int>(rng() % 3);
        const Polynomial u(hktest::random_tuple(rng, q, rng() % 7));
        const Polynomial v(hktest::random_tuple(rng, q, rng() % 7));
        const unsigned k = rng() % 10;
        Polynomial rhs;
        for (unsigned a = 0; a <= k; ++a)
            rhs += sq(a, u) * sq(k - a, v);
        ASSERT_EQ(sq(k, u * v), rhs);
    }
}

TEST(Polynomial, XorSemantics)
{
    Polynomial p = Polynomial::from_terms({ExponentTuple{1, 2}, ExponentTuple{2, 1}, ExponentTuple{1, 2}});
    EXPECT_EQ(p, mono({2, 1}));
    p += ExponentTuple{2, 1};
    EXPECT_TRUE(p.is_zero());
}

TEST(Polynomial, TextForm)
{
    const auto p = Polynomial::from_terms({ExponentTuple{1, 2, 0}, ExponentTuple{0, 0, 3}});
    EXPECT_EQ(to_string(p), "x3^3 + x1*x2^2");
    EXPECT_EQ(parse_polynomial("x3^3 + x1*x2^2", 3), p);
    EXPECT_EQ(parse_polynomial("x_{1}x_{2}^{2} + x_3^3", 3), p);
    EXPECT_EQ(to_string(Polynomial{}), "0");
    EXPECT_EQ(to_string(mono({0, 0})), "1");
}

TEST(Polynomial, ParseErrorsCarryPosition)
{
    try {
        parse_polynomial("x1^2 + x7", 3, 4);
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
    EXPECT_THROW(parse_polynomial("x1^^2", 3), Error);
}

TEST(PolynomialFile, ReadWrite)
{
    std::stringstream s("# comment\nq=3 n=3\nx1^2*x2 +\nx1*x2^2\nx3^3\n");
    const auto pf = read_polynomial(s);
    EXPECT_EQ(pf.q, 3);
    EXPECT_EQ(pf.n, 3u);
    EXPECT_EQ(pf.poly.size(), 3u);
    std::stringstream out;
    write_polynomial(out, pf.q, pf.n, pf.poly);
    EXPECT_EQ(read_polynomial(out).poly, pf.poly);

    std::stringstream bad("q=3 n=4\nx1^2*x2\n");
    EXPECT_THROW(read_polynomial(bad), Error);
    std::stringstream nohdr("x1^2*x2\n");
    EXPECT_THROW(read_polynomial(nohdr), Error);
}

TEST(PolynomialFile, BundledData)
{
    const std::pair<const char*, std::size_t> files[] = {
        {"xi_6_15.poly", 63},    {"h1_6_15.poly", 15},        {"h2_6_15.poly", 15}, {"h3_6_15.poly", 6},
        {"h4_6_15.poly", 6},     {"h5_6_15.poly", 20},        {"zeta1_6_36.poly", 39},
        {"zeta2_6_36.poly", 539}, {"zeta_tilde_6_36.poly", 87}, {"h0_6_36.poly", 108},
    };
    for (const auto& [name, terms] : files) {
        const auto pf = read_polynomial_file(hktest::data_file(name));
        EXPECT_EQ(pf.q, 6) << name;
        EXPECT_EQ(pf.poly.size(), terms) << name;
    }
}
