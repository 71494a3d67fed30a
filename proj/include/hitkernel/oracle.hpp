#pragma once

// Dense brute-force references for tests. Deliberately independent of the
// gf2 and qpspace modules: own bit grid, own elimination, own rho.

#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "hitkernel/monomials.hpp"
#include "hitkernel/steenrod.hpp"

namespace hitkernel::oracle {

class DenseMatrix {
public:
    DenseMatrix(std::size_t nrows, std::size_t ncols)
        : nrows_(nrows), ncols_(ncols), words_((ncols + 63) / 64), bits_(nrows * words_, 0)
    {
    }

    std::size_t nrows() const noexcept { return nrows_; }
    std::size_t ncols() const noexcept { return ncols_; }

    bool get(std::size_t r, std::size_t c) const { return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u; }
    void flip(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] ^= std::uint64_t{1} << (c % 64); }

    void add_row(std::size_t dst, std::size_t src)
    {
        for (std::size_t w = 0; w < words_; ++w)
            bits_[dst * words_ + w] ^= bits_[src * words_ + w];
    }

    void swap_rows(std::size_t a, std::size_t b)
    {
        for (std::size_t w = 0; w < words_; ++w)
            std::swap(bits_[a * words_ + w], bits_[b * words_ + w]);
    }

    /// Textbook Gauss-Jordan; returns the pivot column of each leading row.
    std::vector<std::size_t> rref()
    {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < ncols_ && r < nrows_; ++c) {
            std::size_t p = r;
            while (p < nrows_ && !get(p, c))
                ++p;
            if (p == nrows_)
                continue;
            swap_rows(p, r);
            for (std::size_t i = 0; i < nrows_; ++i)
                if (i != r && get(i, c))
                    add_row(i, r);
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

private:
    std::size_t nrows_, ncols_, words_;
    std::vector<std::uint64_t> bits_;
};

inline constexpr std::uint64_t kMonomialGuard = 20000;
inline constexpr std::size_t kInvariantGuard = 20;

/// Binomial coefficient mod 2 by Pascal's triangle (no Lucas shortcut).
inline bool binomial_odd(unsigned n, unsigned k)
{
    if (k > n)
        return false;
    std::vector<std::uint8_t> row{1};
    for (unsigned i = 1; i <= n; ++i) {
        std::vector<std::uint8_t> next(i + 1, 1);
        for (unsigned j = 1; j < i; ++j)
            next[j] = row[j - 1] ^ row[j];
        row = std::move(next);
    }
    return row[k];
}

/// Sq^k(m) by the full Cartan formula over all compositions of k.
inline Polynomial sq_full(unsigned k, const ExponentTuple& m)
{
    std::vector<ExponentTuple> terms;
    ExponentTuple t = m;
    auto rec = [&](auto&& self, int var, unsigned left) -> void {
        if (var == m.size()) {
            if (left == 0)
                terms.push_back(t);
            return;
        }
        for (unsigned i = 0; i <= left; ++i) {
            if (!binomial_odd(m[var], i))
                continue;
            t.set(var, m[var] + i);
            self(self, var + 1, left - i);
        }
        t.set(var, m[var]);
    };
    rec(rec, 0, k);
    return Polynomial::from_terms(std::move(terms));
}

struct DenseQuotient {
    std::vector<ExponentTuple> monomials;      // lex order
    std::map<ExponentTuple, std::size_t> index;
    DenseMatrix hit{0, 0};                     // RREF of the hit space, rank rows
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> basis;            // non-pivot columns
};

/// Hit space of degree n, materialized densely and fully reduced.
inline DenseQuotient dense_quotient(int q, unsigned n)
{
    const std::uint64_t total = monomial_count(q, n);
    require(total <= kMonomialGuard, ErrorKind::guard,
            "dense oracle limited to " + std::to_string(kMonomialGuard) + " monomials");
    DenseQuotient dq;
    dq.monomials = enumerate_exponents(q, n);
    for (std::size_t i = 0; i < dq.monomials.size(); ++i)
        dq.index.emplace(dq.monomials[i], i);

    std::vector<std::vector<std::size_t>> columns;
    for (unsigned k = 1; k <= n; k <<= 1)
        for (const auto& b : enumerate_exponents(q, n - k)) {
            const Polynomial image = sq_full(k, b);
            if (image.is_zero())
                continue;
            std::vector<std::size_t> col;
            for (const auto& t : image.terms())
                col.push_back(dq.index.at(t));
            columns.push_back(std::move(col));
        }

    DenseMatrix m(std::max<std::size_t>(columns.size(), 1), dq.monomials.size());
    for (std::size_t r = 0; r < columns.size(); ++r)
        for (std::size_t c : columns[r])
            m.flip(r, c);
    dq.pivots = m.rref();
    DenseMatrix reduced(dq.pivots.size(), dq.monomials.size());
    for (std::size_t r = 0; r < dq.pivots.size(); ++r)
        for (std::size_t c = 0; c < dq.monomials.size(); ++c)
            if (m.get(r, c))
                reduced.flip(r, c);
    dq.hit = std::move(reduced);
    std::vector<bool> is_pivot(dq.monomials.size(), false);
    for (std::size_t p : dq.pivots)
        is_pivot[p] = true;
    for (std::size_t c = 0; c < dq.monomials.size(); ++c)
        if (!is_pivot[c])
            dq.basis.push_back(c);
    return dq;
}

inline std::size_t dense_qp_dim(int q, unsigned n) { return dense_quotient(q, n).basis.size(); }

/// Coordinates of a polynomial modulo the hit space, over dq.basis.
inline std::vector<bool> dense_coordinates(const DenseQuotient& dq, const Polynomial& f)
{
    std::vector<bool> v(dq.monomials.size(), false);
    for (const auto& t : f.terms())
        v[dq.index.at(t)] = !v[dq.index.at(t)];
    for (std::size_t r = 0; r < dq.pivots.size(); ++r)
        if (v[dq.pivots[r]])
            for (std::size_t c = 0; c < dq.monomials.size(); ++c)
                if (dq.hit.get(r, c))
                    v[c] = !v[c];
    std::vector<bool> out;
    out.reserve(dq.basis.size());
    for (std::size_t c : dq.basis)
        out.push_back(v[c]);
    return out;
}

/// rho_j written out independently: transposition, or x_q -> x_q + x_(q-1).
inline Polynomial rho_dense(int j, const ExponentTuple& m)
{
    const int q = m.size();
    std::vector<ExponentTuple> terms;
    if (j < q) {
        ExponentTuple t = m;
        t.set(j - 1, m[j]);
        t.set(j, m[j - 1]);
        terms.push_back(t);
    } else if (q == 1) {
        terms.push_back(m);
    } else {
        for (unsigned i = 0; i <= m[q - 1]; ++i) {
            if (!binomial_odd(m[q - 1], i))
                continue;
            ExponentTuple t = m;
            t.set(q - 2, m[q - 2] + i);
            t.set(q - 1, m[q - 1] - i);
            terms.push_back(t);
        }
    }
    return Polynomial::from_terms(std::move(terms));
}

/// dim of [(QP_q)_n]^GL(q) by testing every vector of coordinates.
inline std::size_t dense_invariant_dim(int q, unsigned n)
{
    const DenseQuotient dq = dense_quotient(q, n);
    const std::size_t d = dq.basis.size();
    require(d <= kInvariantGuard, ErrorKind::guard,
            "exhaustive invariant oracle limited to dimension " + std::to_string(kInvariantGuard));
    // effect[j][i]: coordinates of (rho_j + Id)(u_i) as a bit mask
    std::vector<std::vector<std::uint32_t>> effect(static_cast<std::size_t>(q), std::vector<std::uint32_t>(d, 0));
    for (int j = 1; j <= q; ++j)
        for (std::size_t i = 0; i < d; ++i) {
            const ExponentTuple& u = dq.monomials[dq.basis[i]];
            const auto coords = dense_coordinates(dq, rho_dense(j, u) + Polynomial(u));
            for (std::size_t c = 0; c < d; ++c)
                if (coords[c])
                    effect[static_cast<std::size_t>(j - 1)][i] |= 1u << c;
        }
    std::size_t count = 0;
    for (std::uint32_t v = 0; v < (1u << d); ++v) {
        bool ok = true;
        for (int j = 0; j < q && ok; ++j) {
            std::uint32_t acc = 0;
            for (std::size_t i = 0; i < d; ++i)
                if ((v >> i) & 1u)
                    acc ^= effect[static_cast<std::size_t>(j)][i];
            ok = acc == 0;
        }
        if (ok)
            ++count;
    }
    return static_cast<std::size_t>(std::countr_zero(count));
}

}  // namespace hitkernel::oracle
