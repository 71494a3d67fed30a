#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hitkernel/error.hpp"

namespace hitkernel {

// Wide accumulator for exact binomial and spike counts before the overflow check.
__extension__ using uint128 = unsigned __int128;

inline constexpr int kMaxVariables = 12;
inline constexpr int kMaxWeightLength = 16;

using Exponent = std::uint16_t;

/// Exponent vector (a1, ..., aq) of the monomial x1^a1 ... xq^aq.
///
/// Storage is inline so tuples are trivially copyable; entries past size()
/// are kept at zero so the defaulted comparisons are the plain left
/// lexicographic order on exponents.
class ExponentTuple {
public:
    ExponentTuple() = default;

    explicit ExponentTuple(int q)
        : size_(checked_size(q))
    {
    }

    ExponentTuple(std::initializer_list<unsigned> exps)
        : size_(checked_size(static_cast<int>(exps.size())))
    {
        int i = 0;
        for (unsigned e : exps)
            set(i++, e);
    }

    static ExponentTuple from_span(std::span<const unsigned> exps)
    {
        ExponentTuple t(static_cast<int>(exps.size()));
        for (std::size_t i = 0; i < exps.size(); ++i)
            t.set(static_cast<int>(i), exps[i]);
        return t;
    }

    int size() const noexcept { return size_; }
    unsigned degree() const noexcept { return degree_; }

    unsigned operator[](int i) const noexcept { return exps_[static_cast<std::size_t>(i)]; }

    void set(int i, unsigned value)
    {
        require(value <= std::numeric_limits<Exponent>::max(), ErrorKind::overflow,
                "exponent exceeds 16 bits");
        auto& slot = exps_[static_cast<std::size_t>(i)];
        degree_ = degree_ - slot + value;
        slot = static_cast<Exponent>(value);
    }

    std::span<const Exponent> exponents() const noexcept { return {exps_.data(), size_}; }
    auto begin() const noexcept { return exps_.begin(); }
    auto end() const noexcept { return exps_.begin() + size_; }

    friend bool operator==(const ExponentTuple&, const ExponentTuple&) = default;
    friend auto operator<=>(const ExponentTuple&, const ExponentTuple&) = default;

private:
    static std::uint8_t checked_size(int q)
    {
        require(q >= 0 && q <= kMaxVariables, ErrorKind::invalid_argument,
                "number of variables must be in [0, " + std::to_string(kMaxVariables) + "]");
        return static_cast<std::uint8_t>(q);
    }

    std::array<Exponent, kMaxVariables> exps_{};
    std::uint8_t size_ = 0;
    std::uint32_t degree_ = 0;
};

struct ExponentTupleHash {
    std::size_t operator()(const ExponentTuple& t) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        for (Exponent e : t.exponents()) {
            h ^= e;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(t.size()));
    }
};

/// Weight vector (w1, w2, ...), stored 0-based, trailing zeros trimmed.
/// wj counts the exponents whose bit (j-1) is set.
class WeightVector {
public:
    WeightVector() = default;

    WeightVector(std::initializer_list<unsigned> entries)
    {
        require(entries.size() <= kMaxWeightLength, ErrorKind::invalid_argument,
                "weight vector too long");
        for (unsigned v : entries) {
            require(v <= 255, ErrorKind::invalid_argument, "weight entry too large");
            w_[len_++] = static_cast<std::uint8_t>(v);
        }
        trim();
    }

    static WeightVector from_span(std::span<const unsigned> entries)
    {
        require(entries.size() <= kMaxWeightLength, ErrorKind::invalid_argument,
                "weight vector too long");
        WeightVector w;
        for (unsigned v : entries) {
            require(v <= 255, ErrorKind::invalid_argument, "weight entry too large");
            w.w_[w.len_++] = static_cast<std::uint8_t>(v);
        }
        w.trim();
        return w;
    }

    int size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }

    /// 0-based access; entry j is the conventional w_{j+1}. Zero past size().
    unsigned operator[](int j) const noexcept
    {
        return j < kMaxWeightLength ? w_[static_cast<std::size_t>(j)] : 0u;
    }

    std::vector<unsigned> entries() const { return {w_.begin(), w_.begin() + len_}; }

    // Arrays are zero past len_, so array comparison is left-lex with zero padding.
    friend bool operator==(const WeightVector&, const WeightVector&) = default;
    friend auto operator<=>(const WeightVector&, const WeightVector&) = default;

private:
    void trim() noexcept
    {
        while (len_ > 0 && w_[len_ - 1] == 0)
            --len_;
    }

    std::array<std::uint8_t, kMaxWeightLength> w_{};
    std::uint8_t len_ = 0;
};

inline WeightVector weight_vector(const ExponentTuple& a)
{
    std::array<unsigned, kMaxWeightLength> counts{};
    std::size_t len = 0;
    for (Exponent e : a.exponents()) {
        unsigned bits = e;
        while (bits != 0) {
            auto b = static_cast<std::size_t>(std::countr_zero(bits));
            ++counts[b];
            len = std::max(len, b + 1);
            bits &= bits - 1;
        }
    }
    return WeightVector::from_span(std::span<const unsigned>(counts.data(), len));
}

inline std::uint64_t deg_omega(const WeightVector& w)
{
    std::uint64_t d = 0;
    for (int j = 0; j < w.size(); ++j)
        d += static_cast<std::uint64_t>(w[j]) << j;
    return d;
}

inline unsigned alpha(std::uint64_t n) noexcept { return static_cast<unsigned>(std::popcount(n)); }

/// Smallest number of terms 2^d - 1 (d >= 1) summing to n; mu(0) = 0.
inline unsigned mu(std::uint64_t n)
{
    require(n <= 50'000'000, ErrorKind::guard, "mu: argument too large for the table");
    std::vector<std::uint32_t> best(n + 1, std::numeric_limits<std::uint32_t>::max());
    best[0] = 0;
    for (std::uint64_t s = 1; s <= n; ++s) {
        for (std::uint64_t c = 1; c <= s; c = 2 * c + 1) {
            std::uint32_t prev = best[s - c];
            if (prev + 1 < best[s])
                best[s] = prev + 1;
        }
    }
    return best[n];
}

/// The (omega, sigma) order on monomials of equal degree: weight vectors
/// left-lex first, exponent vectors left-lex on ties.
inline std::strong_ordering compare(const ExponentTuple& a, const ExponentTuple& b)
{
    require(a.degree() == b.degree() && a.size() == b.size(), ErrorKind::invalid_argument,
            "compare: monomials must share degree and variable count");
    if (auto c = weight_vector(a) <=> weight_vector(b); c != 0)
        return c;
    return a <=> b;
}

inline bool is_spike(const ExponentTuple& a) noexcept
{
    return std::ranges::all_of(a.exponents(), [](Exponent e) {
        unsigned v = e;
        return (v & (v + 1)) == 0;
    });
}

/// C(n, k) with overflow reported rather than wrapped.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    uint128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            fail(ErrorKind::overflow, "binomial coefficient overflows 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

/// Number of degree-n monomials in q variables, C(n+q-1, q-1).
inline std::uint64_t monomial_count(int q, unsigned n)
{
    require(q >= 1, ErrorKind::invalid_argument, "q must be positive");
    return binomial(static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(q) - 1,
                    static_cast<std::uint64_t>(q) - 1);
}

/// Streams all exponent tuples of degree n in q variables in ascending
/// lexicographic order, starting at (0, ..., 0, n).
class ExponentEnumerator {
public:
    ExponentEnumerator(int q, unsigned n)
        : current_(q)
    {
        require(q >= 1, ErrorKind::invalid_argument, "q must be positive");
        current_.set(q - 1, n);
    }

    /// Starts from an arbitrary tuple; used when resuming a stream.
    explicit ExponentEnumerator(const ExponentTuple& start)
        : current_(start)
    {
    }

    bool next(ExponentTuple& out)
    {
        if (done_)
            return false;
        out = current_;
        advance();
        return true;
    }

private:
    void advance()
    {
        const int q = current_.size();
        int j = q - 1;
        while (j >= 0 && current_[j] == 0)
            --j;
        if (j <= 0) {
            done_ = true;
            return;
        }
        unsigned s = current_[j];
        current_.set(j - 1, current_[j - 1] + 1);
        current_.set(j, 0);
        current_.set(q - 1, s - 1);
    }

    ExponentTuple current_;
    bool done_ = false;
};

template <class F>
void for_each_exponent(int q, unsigned n, F&& f)
{
    ExponentEnumerator it(q, n);
    ExponentTuple t;
    while (it.next(t))
        f(t);
}

inline std::vector<ExponentTuple> enumerate_exponents(int q, unsigned n)
{
    std::vector<ExponentTuple> out;
    out.reserve(monomial_count(q, n));
    for_each_exponent(q, n, [&](const ExponentTuple& t) { out.push_back(t); });
    return out;
}

/// Position of a tuple in the ExponentEnumerator stream and its inverse.
class ExponentRanker {
public:
    ExponentRanker() = default;

    ExponentRanker(int q, unsigned n)
        : q_(q), n_(n), table_(static_cast<std::size_t>(q + 1) * (n + 1))
    {
        require(q >= 1, ErrorKind::invalid_argument, "q must be positive");
        for (int k = 0; k <= q; ++k)
            for (unsigned s = 0; s <= n; ++s)
                at(k, s) = k == 0 ? (s == 0 ? 1 : 0) : monomial_count(k, s);
    }

    int q() const noexcept { return q_; }
    unsigned n() const noexcept { return n_; }
    std::uint64_t total() const { return at(q_, n_); }

    std::uint64_t rank(const ExponentTuple& a) const
    {
        std::uint64_t r = 0;
        unsigned rem = n_;
        for (int i = 0; i + 1 < q_; ++i) {
            unsigned ai = a[i];
            int k = q_ - i;  // parts left including this one
            // compositions of rem into k parts whose first part is < ai
            r += at(k, rem) - at(k, rem - ai);
            rem -= ai;
        }
        return r;
    }

    ExponentTuple unrank(std::uint64_t r) const
    {
        require(r < total(), ErrorKind::invalid_argument, "unrank: rank out of range");
        ExponentTuple a(q_);
        unsigned rem = n_;
        for (int i = 0; i + 1 < q_; ++i) {
            int k = q_ - i;
            unsigned v = 0;
            // first part v covers ranks [N(k,rem) - N(k,rem-v), N(k,rem) - N(k,rem-v-1))
            while (v < rem && at(k, rem) - at(k, rem - (v + 1)) <= r)
                ++v;
            r -= at(k, rem) - at(k, rem - v);
            a.set(i, v);
            rem -= v;
        }
        a.set(q_ - 1, rem);
        return a;
    }

private:
    std::uint64_t& at(int k, unsigned s) { return table_[static_cast<std::size_t>(k) * (n_ + 1) + s]; }
    std::uint64_t at(int k, unsigned s) const
    {
        return table_[static_cast<std::size_t>(k) * (n_ + 1) + s];
    }

    int q_ = 0;
    unsigned n_ = 0;
    std::vector<std::uint64_t> table_;
};

namespace detail {

inline void spike_multisets(unsigned m, std::uint64_t count, std::uint64_t sum,
                            uint128 coeff, uint128& total)
{
    if (m == 0) {
        if (count == sum)
            total += coeff;
        if (total > std::numeric_limits<std::uint64_t>::max())
            fail(ErrorKind::overflow, "spike count overflows 64 bits");
        return;
    }
    const std::uint64_t part = std::uint64_t{1} << m;
    for (std::uint64_t c = 0; c <= count && c * part <= sum; ++c) {
        std::uint64_t rest = count - c;
        std::uint64_t left = sum - c * part;
        // the remaining parts are powers of two in [1, 2^(m-1)]
        if (left < rest || left > rest * (part / 2))
            continue;
        spike_multisets(m - 1, rest, left, coeff * binomial(count, c), total);
    }
}

}  // namespace detail

/// Number of spike monomials of degree n in q variables: multisets of q
/// powers of two summing to n + q, each weighted by its multinomial.
inline std::uint64_t count_spikes(int q, std::uint64_t n)
{
    require(q >= 1, ErrorKind::invalid_argument, "q must be positive");
    const std::uint64_t sum = n + static_cast<std::uint64_t>(q);
    unsigned top = static_cast<unsigned>(std::bit_width(sum) - 1);
    uint128 total = 0;
    detail::spike_multisets(top, static_cast<std::uint64_t>(q), sum, 1, total);
    return static_cast<std::uint64_t>(total);
}

inline std::string to_string(const ExponentTuple& a)
{
    std::string s = "[";
    for (int i = 0; i < a.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(a[i]);
    }
    return s + "]";
}

inline std::string to_string(const WeightVector& w)
{
    std::string s = "(";
    for (int j = 0; j < w.size(); ++j) {
        if (j)
            s += ',';
        s += std::to_string(w[j]);
    }
    return s + ")";
}

/// Parses the bracketed form "[3,5,9,16,1,2]".
inline ExponentTuple parse_tuple(std::string_view text)
{
    auto fail_parse = [&] { fail(ErrorKind::parse, "malformed exponent tuple: " + std::string(text)); };
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        fail_parse();
    text = text.substr(1, text.size() - 2);
    std::vector<unsigned> exps;
    while (!text.empty()) {
        while (!text.empty() && text.front() == ' ')
            text.remove_prefix(1);
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc())
            fail_parse();
        exps.push_back(v);
        text.remove_prefix(static_cast<std::size_t>(ptr - text.data()));
        while (!text.empty() && text.front() == ' ')
            text.remove_prefix(1);
        if (!text.empty()) {
            if (text.front() != ',')
                fail_parse();
            text.remove_prefix(1);
        }
    }
    if (exps.size() > kMaxVariables)
        fail_parse();
    return ExponentTuple::from_span(exps);
}

}  // namespace hitkernel
