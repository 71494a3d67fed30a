#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "hitkernel/monomials.hpp"
#include "hitkernel/steenrod.hpp"

namespace hitkernel {

/// Number of degree-s monomials in q variables killed by Sq^(2^t). Cached.
inline std::uint64_t z_prime(unsigned t, int q, unsigned s)
{
    static std::mutex mutex;
    static std::map<std::tuple<unsigned, int, unsigned>, std::uint64_t> memo;
    const auto key = std::make_tuple(t, q, s);
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
    }
    const unsigned k = 1u << t;
    std::uint64_t zero = 0;
    for_each_exponent(q, s, [&](const ExponentTuple& m) {
        bool any = false;
        // terms never cancel, so a single term means Sq^k(m) != 0
        for_each_square_term(k, m, [&](const ExponentTuple&) { any = true; });
        if (!any)
            ++zero;
    });
    std::lock_guard lock(mutex);
    memo.emplace(key, zero);
    return zero;
}

/// Column bound: hit columns Sq^(2^t)(b) that are not identically zero.
inline std::uint64_t w_bound(int q, unsigned n)
{
    std::uint64_t w = 0;
    for (unsigned t = 0; (std::uint64_t{1} << t) <= n; ++t) {
        const unsigned s = n - (1u << t);
        w += monomial_count(q, s) - z_prime(t, q, s);
    }
    return w;
}

struct MatchBound {
    std::uint64_t lb = 0;
    std::uint64_t edges = 0;   // E: nonzero entries over all hit columns
    std::uint64_t max_degree = 0;  // Delta: over rows and columns
};

/// ceil(E / Delta) for the bipartite support graph of the hit matrix.
inline MatchBound lb_match(int q, unsigned n)
{
    MatchBound out;
    const ExponentRanker ranker(q, n);
    std::vector<std::uint32_t> row_degree(ranker.total(), 0);
    for (unsigned t = 0; (std::uint64_t{1} << t) <= n; ++t) {
        const unsigned k = 1u << t;
        for_each_exponent(q, n - k, [&](const ExponentTuple& b) {
            std::uint64_t col = 0;
            for_each_square_term(k, b, [&](const ExponentTuple& m) {
                ++col;
                ++row_degree[ranker.rank(m)];
            });
            out.edges += col;
            out.max_degree = std::max(out.max_degree, col);
        });
    }
    for (std::uint32_t d : row_degree)
        out.max_degree = std::max<std::uint64_t>(out.max_degree, d);
    if (out.edges > 0)
        out.lb = (out.edges + out.max_degree - 1) / out.max_degree;
    return out;
}

inline std::uint64_t dim_from_rank(int q, unsigned n, std::uint64_t rank)
{
    const std::uint64_t total = monomial_count(q, n);
    require(rank <= total, ErrorKind::invalid_argument,
            "rank " + std::to_string(rank) + " exceeds the monomial count " + std::to_string(total));
    return total - rank;
}

struct RankBounds {
    int q = 0;
    unsigned n = 0;
    std::uint64_t total = 0;
    std::uint64_t spikes = 0;
    std::uint64_t w_bound = 0;
    MatchBound match;
    std::optional<std::uint64_t> exact_rank;

    std::uint64_t upper() const { return std::min(total - spikes, w_bound); }

    /// lb <= rank <= min(total - spikes, W); vacuous without an exact rank.
    bool sandwich_holds() const
    {
        if (!exact_rank)
            return true;
        return match.lb <= *exact_rank && *exact_rank <= upper();
    }
};

inline RankBounds rank_bounds(int q, unsigned n, std::optional<std::uint64_t> exact_rank = std::nullopt)
{
    RankBounds b;
    b.q = q;
    b.n = n;
    b.total = monomial_count(q, n);
    b.spikes = count_spikes(q, n);
    b.w_bound = w_bound(q, n);
    b.match = lb_match(q, n);
    b.exact_rank = exact_rank;
    return b;
}

}  // namespace hitkernel
