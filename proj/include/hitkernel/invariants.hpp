#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hitkernel/gf2.hpp"
#include "hitkernel/kameko.hpp"
#include "hitkernel/parallel.hpp"
#include "hitkernel/qpspace.hpp"

namespace hitkernel {

/// Calls f(term) for each monomial of rho_j(m). For j < q, rho_j swaps x_j
/// and x_{j+1}; rho_q sends x_q to x_q + x_{q-1}. For q = 1, rho_1 is the
/// identity (GL(1, F2) is trivial).
template <class F>
void for_each_rho_term(int j, const ExponentTuple& m, F&& f)
{
    const int q = m.size();
    require(j >= 1 && j <= q, ErrorKind::invalid_argument, "rho index " + std::to_string(j) + " out of range");
    if (j < q) {
        ExponentTuple t = m;
        t.set(j - 1, m[j]);
        t.set(j, m[j - 1]);
        f(static_cast<const ExponentTuple&>(t));
        return;
    }
    if (q == 1) {
        f(m);
        return;
    }
    // x_{q-1}^a (x_q + x_{q-1})^e = sum over bit-submasks i of e of x_{q-1}^(a+i) x_q^(e-i)
    const unsigned a = m[q - 2];
    const unsigned e = m[q - 1];
    ExponentTuple t = m;
    for (unsigned i = 0;; i = (i - e) & e) {
        t.set(q - 2, a + i);
        t.set(q - 1, e - i);
        f(static_cast<const ExponentTuple&>(t));
        if (i == e)
            break;
    }
}

inline Polynomial apply_rho(int j, const Polynomial& f)
{
    std::vector<ExponentTuple> terms;
    for (const auto& m : f.terms())
        for_each_rho_term(j, m, [&](const ExponentTuple& t) { terms.push_back(t); });
    return Polynomial::from_terms(std::move(terms));
}

/// Admissible coordinates of (rho_j + Id)(u_i) for admissible u_i, computed
/// on first use and cached.
class RhoTable {
public:
    explicit RhoTable(const DegreeSpace& ds)
        : ds_(&ds), rows_(static_cast<std::size_t>(ds.q()), std::vector<Entry>(ds.dim()))
    {
    }

    const DegreeSpace& space() const noexcept { return *ds_; }
    int q() const noexcept { return ds_->q(); }

    const std::vector<std::uint32_t>& row(int j, std::uint32_t rank)
    {
        Entry& e = rows_[static_cast<std::size_t>(j - 1)][rank];
        if (!e.done) {
            const ExponentTuple& u = ds_->admissible_monomial(rank);
            std::vector<std::uint32_t> positions{ds_->admissible()[rank]};
            for_each_rho_term(j, u, [&](const ExponentTuple& t) { positions.push_back(ds_->position(t)); });
            e.coords = ds_->reduce_positions(positions);
            e.done = true;
        }
        return e.coords;
    }

    /// Fills every row for the given ranks, so later reads are lock-free lookups.
    void precompute(std::span<const std::uint32_t> ranks)
    {
        for (int j = 1; j <= q(); ++j)
            for (std::uint32_t r : ranks)
                row(j, r);
    }

    /// Cached row; precompute() must have covered `rank`.
    const std::vector<std::uint32_t>& cached(int j, std::uint32_t rank) const
    {
        const Entry& e = rows_[static_cast<std::size_t>(j - 1)][rank];
        require(e.done, ErrorKind::internal, "rho row requested before precompute");
        return e.coords;
    }

private:
    struct Entry {
        bool done = false;
        std::vector<std::uint32_t> coords;
    };

    const DegreeSpace* ds_;
    std::vector<std::vector<Entry>> rows_;
};

/// Linear system for invariant combinations. Unknowns are one coefficient per
/// extra vector plus one per unit coordinate; the combination must satisfy
/// (rho_j - Id) f == 0 for every j in `js`.
///
/// Vectors and images live on `universe` (sorted admissible ranks). With a
/// weight filter, image coordinates of lower weight are dropped (equivalence
/// modulo lower weights) and a coordinate of higher weight is a hard error.
struct InvariantSystem {
    std::vector<std::uint32_t> universe;
    std::vector<std::vector<std::uint32_t>> extras;
    std::vector<std::uint32_t> units;
    std::vector<int> js;
    std::optional<std::uint16_t> weight_id;
};

struct InvariantSolution {
    std::vector<std::vector<std::uint32_t>> vectors;  // sorted admissible ranks
    std::vector<gf2::BitRow> gammas;                  // coefficients on the extras
};

namespace detail {

class LocalIndex {
public:
    LocalIndex(std::size_t dim, std::span<const std::uint32_t> universe)
        : local_(dim, -1), universe_(universe.begin(), universe.end())
    {
        for (std::size_t i = 0; i < universe_.size(); ++i)
            local_[universe_[i]] = static_cast<std::int32_t>(i);
    }

    std::int32_t operator[](std::uint32_t rank) const { return local_[rank]; }
    std::uint32_t global(std::size_t i) const { return universe_[i]; }
    std::size_t size() const noexcept { return universe_.size(); }

private:
    std::vector<std::int32_t> local_;
    std::vector<std::uint32_t> universe_;
};

inline std::size_t padded(std::size_t bits) { return gf2::blocks_for(bits) * gf2::kBlockBits; }

inline void copy_blocks(const gf2::BitRow& from, std::size_t from_block, gf2::BitRow& to, std::size_t to_block,
                        std::size_t count)
{
    auto src = from.blocks();
    auto dst = to.blocks();
    for (std::size_t b = 0; b < count; ++b)
        dst[to_block + b] = src[from_block + b];
}

// Image of the local vector in `state` under (rho_j - Id), XORed into bits
// [0, universe size) of `out`.
inline void image_into(RhoTable& rho, const InvariantSystem& sys, const LocalIndex& idx, int j,
                       const gf2::BitRow& state, gf2::BitRow& out)
{
    const DegreeSpace& ds = rho.space();
    const std::size_t u = idx.size();
    gf2::PivotMap<gf2::BitRow>::for_each_set(state, [&](std::size_t c) {
        if (c >= u)
            return;
        for (std::uint32_t r : rho.cached(j, idx.global(c))) {
            if (sys.weight_id) {
                const auto w = ds.admissible_weight_id(r);
                if (w < *sys.weight_id)
                    continue;
                require(w == *sys.weight_id, ErrorKind::internal,
                        "rho image raised the weight of " + to_string(ds.admissible_monomial(idx.global(c))));
            }
            const auto l = idx[r];
            require(l >= 0, ErrorKind::internal,
                    "rho image of " + to_string(ds.admissible_monomial(idx.global(c))) +
                        " leaves the solve universe at " + to_string(ds.admissible_monomial(r)));
            out.flip(static_cast<std::size_t>(l));
        }
    });
}

}  // namespace detail

/// Solves the system by intersecting nullspaces one operator at a time.
inline InvariantSolution solve_invariants(RhoTable& rho, const InvariantSystem& sys)
{
    const DegreeSpace& ds = rho.space();
    const detail::LocalIndex idx(ds.dim(), sys.universe);
    const std::size_t u = idx.size();
    const std::size_t up = detail::padded(u);
    const std::size_t e = sys.extras.size();
    const std::size_t ub = up / gf2::kBlockBits;
    const std::size_t eb = gf2::blocks_for(e);

    rho.precompute(sys.universe);

    // state row: [vector on universe (padded) | coefficients on extras]
    std::vector<gf2::BitRow> state;
    state.reserve(e + sys.units.size());
    for (std::size_t i = 0; i < e; ++i) {
        gf2::BitRow r(up + e);
        for (std::uint32_t c : sys.extras[i]) {
            const auto l = idx[c];
            require(l >= 0, ErrorKind::internal, "extra vector leaves the solve universe");
            r.flip(static_cast<std::size_t>(l));
        }
        r.set(up + i);
        state.push_back(std::move(r));
    }
    for (std::uint32_t c : sys.units) {
        const auto l = idx[c];
        require(l >= 0, ErrorKind::internal, "unit coordinate outside the solve universe");
        gf2::BitRow r(up + e);
        r.set(static_cast<std::size_t>(l));
        state.push_back(std::move(r));
    }

    for (int j : sys.js) {
        if (state.empty())
            break;
        // augmented row: [image (padded) | state]
        gf2::PivotMap<gf2::BitRow> pm(up + up + e);
        std::vector<gf2::BitRow> next;
        for (const auto& s : state) {
            gf2::BitRow row(up + up + e);
            detail::image_into(rho, sys, idx, j, s, row);
            detail::copy_blocks(s, 0, row, ub, ub + eb);
            pm.reduce(row);
            auto lead = row.leading();
            if (lead && *lead < up) {
                pm.insert_reduced(std::move(row));
            } else if (lead) {
                gf2::BitRow t(up + e);
                detail::copy_blocks(row, ub, t, 0, ub + eb);
                next.push_back(std::move(t));
            }
        }
        state = std::move(next);
    }

    // Canonical form: reduced row echelon over (vector, coefficients).
    gf2::PivotMap<gf2::BitRow> rref(up + e);
    for (auto& s : state) {
        rref.reduce(s);
        require(s.any(), ErrorKind::internal, "invariant solve produced dependent rows");
        rref.insert_reduced(std::move(s));
    }
    rref.back_substitute();
    std::vector<std::uint32_t> keys(rref.keys().begin(), rref.keys().end());
    std::ranges::sort(keys);

    InvariantSolution out;
    for (std::uint32_t k : keys) {
        const gf2::BitRow& r = *rref.find(k);
        std::vector<std::uint32_t> v;
        gf2::BitRow g(e);
        gf2::PivotMap<gf2::BitRow>::for_each_set(r, [&](std::size_t c) {
            if (c < u)
                v.push_back(idx.global(c));
            else if (c >= up)
                g.set(c - up);
        });
        require(!v.empty(), ErrorKind::internal, "invariant combination with zero vector");
        out.vectors.push_back(std::move(v));
        out.gammas.push_back(std::move(g));
    }
    return out;
}

/// Per-operator count of surviving admissible coordinates of (rho_j - Id) f,
/// f given by admissible ranks. Uses the cached rows.
inline std::vector<std::size_t> rho_residuals(RhoTable& rho, std::span<const std::uint32_t> f)
{
    std::vector<std::size_t> out;
    for (int j = 1; j <= rho.q(); ++j) {
        std::vector<std::uint32_t> acc;
        for (std::uint32_t r : f) {
            const auto& row = rho.row(j, r);
            acc.insert(acc.end(), row.begin(), row.end());
        }
        out.push_back(DegreeSpace::cancel_pairs(std::move(acc)).size());
    }
    return out;
}

struct InvariantCheck {
    bool invariant = false;
    std::vector<std::size_t> residuals;  // per j = 1..q
};

/// Residuals of (rho_j + Id) f in the admissible basis, straight from the polynomial.
inline InvariantCheck check_invariant(const Polynomial& f, const DegreeSpace& ds)
{
    require(f.is_homogeneous() && (f.is_zero() || f.degree() == ds.n()), ErrorKind::invalid_argument,
            "check_invariant: polynomial is not in degree " + std::to_string(ds.n()));
    InvariantCheck out;
    out.invariant = true;
    for (int j = 1; j <= ds.q(); ++j) {
        const auto residual = ds.reduce_to_admissible(apply_rho(j, f) + f);
        out.residuals.push_back(residual.size());
        if (!residual.empty())
            out.invariant = false;
    }
    return out;
}

struct WeightInvariants {
    WeightVector omega;
    std::uint16_t weight_id = 0;
    std::size_t support = 0;
    std::vector<std::vector<std::uint32_t>> sigma;
    std::vector<std::vector<std::uint32_t>> gl;
};

inline std::vector<int> sigma_operators(int q)
{
    std::vector<int> js;
    for (int j = 1; j < q; ++j)
        js.push_back(j);
    return js;
}

inline std::vector<int> all_operators(int q)
{
    auto js = sigma_operators(q);
    js.push_back(q);
    return js;
}

/// Sigma_q- and GL(q)-invariants of one weight block, modulo lower weights.
inline WeightInvariants sigma_gl_on_weight(RhoTable& rho, const WeightBlock& block)
{
    const DegreeSpace& ds = rho.space();
    require(!block.admissible.empty(), ErrorKind::invalid_argument,
            "weight " + to_string(block.omega) + " has no support");
    WeightInvariants out;
    out.omega = block.omega;
    out.weight_id = ds.admissible_weight_id(block.admissible.front());
    out.support = block.admissible.size();

    InvariantSystem sigma;
    sigma.universe = block.admissible;
    sigma.units = block.admissible;
    sigma.js = sigma_operators(ds.q());
    sigma.weight_id = out.weight_id;
    out.sigma = solve_invariants(rho, sigma).vectors;

    InvariantSystem gl;
    gl.universe = block.admissible;
    gl.extras = out.sigma;
    gl.js = {ds.q()};
    gl.weight_id = out.weight_id;
    out.gl = solve_invariants(rho, gl).vectors;
    return out;
}

/// Weightwise stage over every weight block of `support`. Blocks are solved
/// in parallel after the rho rows are cached.
inline std::vector<WeightInvariants> weightwise_invariants(RhoTable& rho, std::span<const std::uint32_t> support,
                                                           unsigned threads = 1)
{
    const auto blocks = weight_decomposition(rho.space(), support);
    rho.precompute(support);
    std::vector<WeightInvariants> out(blocks.size());
    parallel_chunks(threads, blocks.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b)
            out[b] = sigma_gl_on_weight(rho, blocks[b]);
    });
    return out;
}

/// Largest weight carrying weightwise GL(q)-invariants, solved jointly with
/// every lower-weight coordinate of the support. The result spans the
/// GL(q)-invariants of the coordinate subspace spanned by `support`.
inline std::vector<std::vector<std::uint32_t>> correct_in_kernel(RhoTable& rho, std::span<const std::uint32_t> support,
                                                                 std::span<const WeightInvariants> weights)
{
    const DegreeSpace& ds = rho.space();
    const WeightInvariants* top = nullptr;
    for (const auto& w : weights)
        if (!w.gl.empty() && (top == nullptr || w.weight_id > top->weight_id))
            top = &w;
    if (top == nullptr)
        return {};

    InvariantSystem sys;
    for (std::uint32_t r : support) {
        const auto w = ds.admissible_weight_id(r);
        if (w <= top->weight_id)
            sys.universe.push_back(r);
        if (w < top->weight_id)
            sys.units.push_back(r);
    }
    sys.extras = top->gl;
    sys.js = all_operators(ds.q());
    auto sol = solve_invariants(rho, sys);
    for (const auto& v : sol.vectors)
        for (std::size_t r : rho_residuals(rho, v))
            require(r == 0, ErrorKind::internal, "accepted kernel invariant fails verification");
    return std::move(sol.vectors);
}

struct LiftResult {
    std::vector<std::vector<std::uint32_t>> invariants;  // basis of the corrected space
    std::size_t lift_rank = 0;                           // independent lift coefficients realised
};

/// Joint correction of lifts psi(g_i) by arbitrary kernel-support coordinates.
/// Invariants are returned over all admissible coordinates; lift_rank counts
/// how many independent combinations of the lifts survive the correction.
inline LiftResult correct_from_lifts(RhoTable& rho, std::span<const std::uint32_t> support,
                                     std::span<const Polynomial> targets)
{
    const DegreeSpace& ds = rho.space();
    InvariantSystem sys;
    sys.universe.resize(ds.dim());
    std::iota(sys.universe.begin(), sys.universe.end(), 0u);
    sys.units.assign(support.begin(), support.end());
    for (const auto& g : targets) {
        const Polynomial lift = psi_lift(g);
        require(lift.is_zero() || lift.degree() == ds.n(), ErrorKind::invalid_argument,
                "lift of a target invariant is not in degree " + std::to_string(ds.n()));
        sys.extras.push_back(ds.reduce_to_admissible(lift));
    }
    sys.js = all_operators(ds.q());
    auto sol = solve_invariants(rho, sys);

    LiftResult out;
    gf2::PivotMap<gf2::BitRow> gamma(targets.size());
    for (auto g : sol.gammas)
        online_reduce(std::move(g), gamma);
    out.lift_rank = gamma.rank();
    for (const auto& v : sol.vectors)
        for (std::size_t r : rho_residuals(rho, v))
            require(r == 0, ErrorKind::internal, "accepted lifted invariant fails verification");
    out.invariants = std::move(sol.vectors);
    return out;
}

/// Corrected invariant psi(g) + (kernel terms), or none when no correction exists.
inline std::optional<Polynomial> correct_from_lift(RhoTable& rho, std::span<const std::uint32_t> support,
                                                   const Polynomial& g)
{
    const DegreeSpace& ds = rho.space();
    InvariantSystem sys;
    sys.universe.resize(ds.dim());
    std::iota(sys.universe.begin(), sys.universe.end(), 0u);
    sys.units.assign(support.begin(), support.end());
    sys.extras.push_back(ds.reduce_to_admissible(psi_lift(g)));
    sys.js = all_operators(ds.q());
    const auto sol = solve_invariants(rho, sys);
    for (std::size_t i = 0; i < sol.vectors.size(); ++i)
        if (sol.gammas[i].test(0))
            return ds.from_admissible(sol.vectors[i]);
    return std::nullopt;
}

struct InvariantOptions {
    unsigned threads = 1;
    BuildOptions build;
    // Target-degree invariants for the lift step. When absent they are
    // computed recursively.
    std::optional<std::vector<Polynomial>> library;
};

struct InvariantReport {
    int q = 0;
    unsigned n = 0;
    std::string route;  // "kernel" or "direct"
    std::size_t dim = 0;
    std::optional<unsigned> target_degree;
    std::size_t target_dim = 0;
    std::size_t kernel_dim = 0;
    std::vector<WeightBlock> kernel_weights;
    std::vector<WeightInvariants> weights;
    std::optional<WeightVector> top_weight;
    std::vector<std::vector<std::uint32_t>> kernel_invariants;
    bool lift_step = false;
    std::size_t lifts_offered = 0;
    std::size_t lift_rank = 0;
    std::vector<std::vector<std::uint32_t>> invariants;  // admissible coordinates
    std::vector<Polynomial> polynomials;                 // admissible representatives
};

/// Basis of [(QP_q)_n]^GL(q) over the given degree space. `tgt` is the Kameko
/// target space when the kernel route applies, else nullptr.
inline InvariantReport invariants_of(const DegreeSpace& ds, const DegreeSpace* tgt, const InvariantOptions& opts)
{
    InvariantReport rep;
    rep.q = ds.q();
    rep.n = ds.n();
    rep.dim = ds.dim();
    rep.route = tgt ? "kernel" : "direct";

    const KamekoKernel kk = kernel_basis(ds, tgt);
    require(kk.coordinate_aligned, ErrorKind::internal, "Kameko kernel is not spanned by admissible monomials");
    rep.kernel_dim = kk.dim();
    rep.kernel_weights = kernel_weight_table(ds, kk);
    if (tgt) {
        rep.target_degree = tgt->n();
        rep.target_dim = tgt->dim();
    }

    RhoTable rho(ds);
    rep.weights = weightwise_invariants(rho, kk.support, opts.threads);
    for (const auto& w : rep.weights)
        if (!w.gl.empty())
            rep.top_weight = w.omega;
    rep.kernel_invariants = correct_in_kernel(rho, kk.support, rep.weights);
    rep.invariants = rep.kernel_invariants;

    if (tgt && tgt->dim() > 0) {
        std::vector<Polynomial> targets;
        if (opts.library) {
            for (const auto& g : *opts.library) {
                require(g.is_zero() || g.degree() == tgt->n(), ErrorKind::invalid_argument,
                        "library polynomial is not in degree " + std::to_string(tgt->n()));
                require(check_invariant(g, *tgt).invariant, ErrorKind::invalid_argument,
                        "library polynomial is not GL(" + std::to_string(ds.q()) + ")-invariant");
                targets.push_back(g);
            }
        } else {
            InvariantOptions sub = opts;
            sub.library.reset();
            const auto ttd = kameko_target_degree(ds.q(), tgt->n());
            std::optional<DegreeSpace> ttgt;
            if (ttd)
                ttgt = DegreeSpace::build(ds.q(), *ttd, opts.build);
            targets = invariants_of(*tgt, ttgt ? &*ttgt : nullptr, sub).polynomials;
        }
        rep.lifts_offered = targets.size();
        if (!targets.empty()) {
            rep.lift_step = true;
            auto lifted = correct_from_lifts(rho, kk.support, targets);
            rep.lift_rank = lifted.lift_rank;
            rep.invariants = std::move(lifted.invariants);
        }
    }
    for (const auto& v : rep.invariants)
        rep.polynomials.push_back(ds.from_admissible(v));
    return rep;
}

/// Builds the degree spaces and runs the kernel route when n - q is even and
/// non-negative, else the direct route on the whole space.
inline InvariantReport full_space_invariants(int q, unsigned n, const InvariantOptions& opts = {})
{
    const DegreeSpace ds = DegreeSpace::build(q, n, opts.build);
    if (auto td = kameko_target_degree(q, n)) {
        const DegreeSpace tgt = DegreeSpace::build(q, *td, opts.build);
        return invariants_of(ds, &tgt, opts);
    }
    return invariants_of(ds, nullptr, opts);
}

}  // namespace hitkernel
