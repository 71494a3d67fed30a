#pragma once

#include <optional>
#include <vector>

#include "hitkernel/gf2.hpp"
#include "hitkernel/qpspace.hpp"

namespace hitkernel {

/// Halved-odd image ((a1-1)/2, ..., (aq-1)/2), or none if some exponent is even.
inline std::optional<ExponentTuple> kameko_image(const ExponentTuple& a)
{
    ExponentTuple out(a.size());
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] % 2 == 0)
            return std::nullopt;
        out.set(i, (a[i] - 1) / 2);
    }
    return out;
}

/// The section e -> 2e + 1 of the Kameko map.
inline ExponentTuple psi_lift(const ExponentTuple& m)
{
    ExponentTuple out(m.size());
    for (int i = 0; i < m.size(); ++i)
        out.set(i, 2 * m[i] + 1);
    return out;
}

inline Polynomial psi_lift(const Polynomial& g)
{
    std::vector<ExponentTuple> terms;
    terms.reserve(g.size());
    for (const auto& m : g.terms())
        terms.push_back(psi_lift(m));
    return Polynomial::from_terms(std::move(terms));
}

/// Target degree of the Kameko map out of degree n, if n - q is even and non-negative.
inline std::optional<unsigned> kameko_target_degree(int q, unsigned n)
{
    const long long d = static_cast<long long>(n) - q;
    if (d < 0 || d % 2 != 0)
        return std::nullopt;
    return static_cast<unsigned>(d / 2);
}

/// Column c: target admissible coordinates of the image of source admissible c.
inline std::vector<std::vector<std::uint32_t>> kameko_columns(const DegreeSpace& src, const DegreeSpace& tgt)
{
    require(src.q() == tgt.q(), ErrorKind::invalid_argument, "Kameko map needs equal variable counts");
    const auto td = kameko_target_degree(src.q(), src.n());
    require(td && *td == tgt.n(), ErrorKind::invalid_argument,
            "target degree must be (n - q) / 2 = " + (td ? std::to_string(*td) : std::string("undefined")));
    std::vector<std::vector<std::uint32_t>> cols(src.dim());
    for (std::uint32_t c = 0; c < src.dim(); ++c)
        if (auto image = kameko_image(src.admissible_monomial(c)))
            cols[c] = tgt.normal_form(tgt.position(*image));
    return cols;
}

/// Rows: target admissible basis; columns: source admissible basis.
inline gf2::BitMatrix build_kameko_matrix(const DegreeSpace& src, const DegreeSpace& tgt)
{
    const auto cols = kameko_columns(src, tgt);
    gf2::BitMatrix L(tgt.dim(), src.dim());
    for (std::uint32_t c = 0; c < cols.size(); ++c)
        for (std::uint32_t r : cols[c])
            L.flip(r, c);
    return L;
}

struct KamekoKernel {
    int q = 0;
    unsigned n = 0;
    std::size_t src_dim = 0;
    std::size_t tgt_dim = 0;
    std::size_t rank = 0;
    std::vector<gf2::BitRow> basis;      // over source admissible ranks
    std::vector<std::uint32_t> support;  // sorted source admissible ranks
    bool coordinate_aligned = false;     // every basis vector is a unit vector

    std::size_t dim() const noexcept { return basis.size(); }
};

namespace detail {

inline void finish_kernel(KamekoKernel& kk)
{
    std::vector<std::uint8_t> used(kk.src_dim, 0);
    kk.coordinate_aligned = true;
    for (const auto& v : kk.basis) {
        if (v.count() != 1)
            kk.coordinate_aligned = false;
        gf2::PivotMap<gf2::BitRow>::for_each_set(v, [&](std::size_t c) { used[c] = 1; });
    }
    for (std::uint32_t c = 0; c < kk.src_dim; ++c)
        if (used[c])
            kk.support.push_back(c);
}

}  // namespace detail

/// Kernel of the Kameko map from `src` (degree n) to `tgt` (degree (n-q)/2).
/// Pass tgt = nullptr when the target is absent or zero-dimensional.
inline KamekoKernel kernel_basis(const DegreeSpace& src, const DegreeSpace* tgt)
{
    KamekoKernel kk;
    kk.q = src.q();
    kk.n = src.n();
    kk.src_dim = src.dim();
    if (tgt == nullptr || tgt->dim() == 0) {
        for (std::size_t c = 0; c < src.dim(); ++c)
            kk.basis.push_back(gf2::BitRow::from_indices(src.dim(), std::vector<std::uint32_t>{
                                                                        static_cast<std::uint32_t>(c)}));
        detail::finish_kernel(kk);
        return kk;
    }

    const auto cols = kameko_columns(src, *tgt);
    gf2::BitMatrix L(tgt->dim(), src.dim());
    for (std::uint32_t c = 0; c < cols.size(); ++c)
        for (std::uint32_t r : cols[c])
            L.flip(r, c);
    auto ns = gf2::nullspace(L);
    kk.tgt_dim = tgt->dim();
    kk.rank = ns.rank;
    kk.basis = std::move(ns.basis);
    require(kk.rank == kk.tgt_dim, ErrorKind::internal,
            "Kameko map is not surjective: rank " + std::to_string(kk.rank) + " < " + std::to_string(kk.tgt_dim));
    for (const auto& v : kk.basis) {
        std::vector<std::uint32_t> image;
        gf2::PivotMap<gf2::BitRow>::for_each_set(v, [&](std::size_t c) {
            image.insert(image.end(), cols[c].begin(), cols[c].end());
        });
        require(DegreeSpace::cancel_pairs(std::move(image)).empty(), ErrorKind::internal,
                "kernel vector does not map to zero");
    }
    detail::finish_kernel(kk);
    return kk;
}

/// Kernel support grouped by weight, ascending.
inline std::vector<WeightBlock> kernel_weight_table(const DegreeSpace& src, const KamekoKernel& kk)
{
    return weight_decomposition(src, kk.support);
}

}  // namespace hitkernel
