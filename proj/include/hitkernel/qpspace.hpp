#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hitkernel/gf2.hpp"
#include "hitkernel/monomials.hpp"
#include "hitkernel/parallel.hpp"
#include "hitkernel/steenrod.hpp"

namespace hitkernel {

struct BuildProgress {
    unsigned power = 0;           // current Sq^(2^power)
    std::uint64_t sources_done = 0;
    std::uint64_t sources_total = 0;
    std::size_t rank = 0;
    std::size_t heap_bytes = 0;
};

struct BuildOptions {
    unsigned threads = 1;
    std::size_t batch = 8192;
    std::size_t mem_soft = std::size_t{512} << 20;
    std::size_t mem_hard = 0;  // 0 disables the hard limit
    std::string checkpoint;    // empty disables checkpoint files
    bool resume = true;        // pick up an existing checkpoint file
    std::function<void(const BuildProgress&)> on_progress;
};

struct BuildStats {
    std::uint64_t columns = 0;       // hit columns streamed
    std::uint64_t soft_marks = 0;    // soft-threshold crossings (each writes a checkpoint if enabled)
    std::uint64_t checkpoints_written = 0;
    bool resumed = false;
};

/// Admissible sorted positions of one weight vector.
struct WeightBlock {
    WeightVector omega;
    std::vector<std::uint32_t> admissible;  // admissible ranks
};

/// Monomials of (P_q)_n indexed in DESCENDING (omega, sigma) order, the
/// online pivot map of the hit space over those positions, and the
/// admissible positions (non-pivots) that index a basis of (QP_q)_n.
///
/// With descending indexing the leading (lowest) bit of a hit row is its
/// largest monomial, so pivot keys are exactly the inadmissible monomials.
class DegreeSpace {
public:
    DegreeSpace() = default;
    DegreeSpace(DegreeSpace&& other) noexcept { *this = std::move(other); }
    DegreeSpace& operator=(DegreeSpace&& other) noexcept
    {
        q_ = other.q_;
        n_ = other.n_;
        ranker_ = std::move(other.ranker_);
        monomials_ = std::move(other.monomials_);
        weights_ = std::move(other.weights_);
        weight_id_ = std::move(other.weight_id_);
        lex_to_pos_ = std::move(other.lex_to_pos_);
        pivots_ = std::move(other.pivots_);
        admissible_ = std::move(other.admissible_);
        adm_rank_ = std::move(other.adm_rank_);
        stats_ = other.stats_;
        nf_ = std::move(other.nf_);
        nf_done_ = std::move(other.nf_done_);
        return *this;
    }

    static DegreeSpace build(int q, unsigned n, const BuildOptions& opts = {});

    int q() const noexcept { return q_; }
    unsigned n() const noexcept { return n_; }
    std::size_t total() const noexcept { return monomials_.size(); }
    std::size_t dim() const noexcept { return admissible_.size(); }
    std::size_t rank() const noexcept { return pivots_.rank(); }
    const BuildStats& stats() const noexcept { return stats_; }

    const ExponentTuple& monomial(std::size_t pos) const { return monomials_[pos]; }
    std::span<const ExponentTuple> monomials() const noexcept { return monomials_; }

    /// Global position of a degree-n tuple.
    std::uint32_t position(const ExponentTuple& a) const
    {
        require(a.size() == q_ && a.degree() == n_, ErrorKind::invalid_argument,
                "monomial " + to_string(a) + " is not in degree " + std::to_string(n_));
        return lex_to_pos_[ranker_.rank(a)];
    }

    std::span<const std::uint32_t> admissible() const noexcept { return admissible_; }
    const ExponentTuple& admissible_monomial(std::size_t rank) const { return monomials_[admissible_[rank]]; }

    bool is_admissible(std::size_t pos) const noexcept { return adm_rank_[pos] >= 0; }
    std::optional<std::uint32_t> admissible_rank(std::size_t pos) const noexcept
    {
        auto r = adm_rank_[pos];
        return r < 0 ? std::nullopt : std::optional<std::uint32_t>(static_cast<std::uint32_t>(r));
    }

    const gf2::PivotMap<gf2::SparseRow>& pivots() const noexcept { return pivots_; }

    /// Distinct weight vectors present in degree n, ascending.
    std::span<const WeightVector> weights() const noexcept { return weights_; }
    const WeightVector& weight_at(std::size_t pos) const { return weights_[weight_id_[pos]]; }
    std::uint16_t weight_id_at(std::size_t pos) const { return weight_id_[pos]; }
    const WeightVector& admissible_weight(std::size_t rank) const { return weight_at(admissible_[rank]); }
    std::uint16_t admissible_weight_id(std::size_t rank) const { return weight_id_[admissible_[rank]]; }

    /// Admissible coordinates (sorted ranks) of the class of the monomial at `pos`.
    std::vector<std::uint32_t> normal_form(std::uint32_t pos) const
    {
        std::lock_guard lock(nf_mutex_);
        auto nf = normal_form_locked(pos);
        return {nf.begin(), nf.end()};
    }

    /// Coordinates of [f] in the admissible basis, as sorted admissible ranks.
    std::vector<std::uint32_t> reduce_to_admissible(const Polynomial& f) const
    {
        std::vector<std::uint32_t> positions;
        positions.reserve(f.size());
        for (const auto& m : f.terms()) {
            require(m.degree() == n_ && m.size() == q_, ErrorKind::invalid_argument,
                    "reduce_to_admissible: polynomial is not in degree " + std::to_string(n_));
            positions.push_back(position(m));
        }
        return reduce_positions(positions);
    }

    /// Coordinates of the sum of the monomials at `positions` (repeats cancel).
    std::vector<std::uint32_t> reduce_positions(std::span<const std::uint32_t> positions) const
    {
        std::vector<std::uint32_t> acc;
        std::lock_guard lock(nf_mutex_);
        for (std::uint32_t p : positions) {
            auto nf = normal_form_locked(p);
            acc.insert(acc.end(), nf.begin(), nf.end());
        }
        return cancel_pairs(std::move(acc));
    }

    /// Sum of admissible monomials with the given ranks.
    Polynomial from_admissible(std::span<const std::uint32_t> ranks) const
    {
        std::vector<ExponentTuple> terms;
        terms.reserve(ranks.size());
        for (std::uint32_t r : ranks)
            terms.push_back(admissible_monomial(r));
        return Polynomial::from_terms(std::move(terms));
    }

    void clear_cache() const
    {
        std::lock_guard lock(nf_mutex_);
        nf_.assign(nf_.size(), {});
        std::ranges::fill(nf_done_, 0);
    }

    /// Sorted, pair-cancelled copy of `v`.
    static std::vector<std::uint32_t> cancel_pairs(std::vector<std::uint32_t> v)
    {
        std::ranges::sort(v);
        std::size_t out = 0;
        for (std::size_t i = 0; i < v.size();) {
            std::size_t j = i;
            while (j < v.size() && v[j] == v[i])
                ++j;
            if ((j - i) % 2 == 1)
                v[out++] = v[i];
            i = j;
        }
        v.resize(out);
        return v;
    }

private:
    void index_monomials();
    void stream_hit_columns(const BuildOptions& opts);
    void finalize();

    std::span<const std::uint32_t> normal_form_locked(std::uint32_t pos) const;

    int q_ = 0;
    unsigned n_ = 0;
    ExponentRanker ranker_;
    std::vector<ExponentTuple> monomials_;
    std::vector<WeightVector> weights_;
    std::vector<std::uint16_t> weight_id_;
    std::vector<std::uint32_t> lex_to_pos_;
    gf2::PivotMap<gf2::SparseRow> pivots_;
    std::vector<std::uint32_t> admissible_;
    std::vector<std::int32_t> adm_rank_;
    BuildStats stats_;

    mutable std::mutex nf_mutex_;
    mutable std::vector<std::vector<std::uint32_t>> nf_;
    mutable std::vector<std::uint8_t> nf_done_;
};

inline void DegreeSpace::index_monomials()
{
    ranker_ = ExponentRanker(q_, n_);
    const std::uint64_t total = ranker_.total();
    require(total < std::numeric_limits<std::uint32_t>::max(), ErrorKind::guard,
            "degree space exceeds 2^32 monomials");
    std::vector<ExponentTuple> lex = enumerate_exponents(q_, n_);

    std::vector<WeightVector> wv(lex.size());
    for (std::size_t i = 0; i < lex.size(); ++i)
        wv[i] = weight_vector(lex[i]);

    std::vector<std::uint32_t> order(lex.size());
    std::iota(order.begin(), order.end(), 0u);
    std::ranges::sort(order, [&](std::uint32_t a, std::uint32_t b) {
        if (auto c = wv[a] <=> wv[b]; c != 0)
            return c > 0;
        return lex[a] > lex[b];
    });

    weights_ = wv;
    std::ranges::sort(weights_);
    weights_.erase(std::unique(weights_.begin(), weights_.end()), weights_.end());
    require(weights_.size() < 65535, ErrorKind::guard, "too many distinct weight vectors");

    monomials_.resize(lex.size());
    weight_id_.resize(lex.size());
    lex_to_pos_.resize(lex.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::uint32_t l = order[pos];
        monomials_[pos] = lex[l];
        lex_to_pos_[l] = static_cast<std::uint32_t>(pos);
        auto it = std::ranges::lower_bound(weights_, wv[l]);
        weight_id_[pos] = static_cast<std::uint16_t>(it - weights_.begin());
    }
}

namespace detail {

inline constexpr char kSpaceMagic[4] = {'H', 'K', 'D', 'S'};
inline constexpr std::uint32_t kSpaceVersion = 1;

struct StreamCursor {
    unsigned power = 0;
    std::uint64_t next_source = 0;
};

inline void write_space_checkpoint(const std::string& path, int q, unsigned n, const StreamCursor& cur,
                                   const BuildStats& stats, const gf2::PivotMap<gf2::SparseRow>& pm)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            fail(ErrorKind::io, "cannot write checkpoint " + tmp);
        os.write(kSpaceMagic, 4);
        gf2::io::put_u32(os, kSpaceVersion);
        gf2::io::put_u32(os, static_cast<std::uint32_t>(q));
        gf2::io::put_u32(os, n);
        gf2::io::put_u32(os, cur.power);
        gf2::io::put_u64(os, cur.next_source);
        gf2::io::put_u64(os, stats.columns);
        gf2::io::put_u64(os, stats.soft_marks);
        gf2::write_pivot_map(os, pm);
        if (!os)
            fail(ErrorKind::io, "failed writing checkpoint " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline bool read_space_checkpoint(const std::string& path, int q, unsigned n, StreamCursor& cur,
                                  BuildStats& stats, gf2::PivotMap<gf2::SparseRow>& pm)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return false;
    char magic[4];
    if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kSpaceMagic))
        fail(ErrorKind::io, path + " is not a degree-space checkpoint");
    if (gf2::io::get_u32(is) != kSpaceVersion)
        fail(ErrorKind::io, path + ": unsupported checkpoint version");
    const auto cq = static_cast<int>(gf2::io::get_u32(is));
    const auto cn = gf2::io::get_u32(is);
    if (cq != q || cn != n)
        fail(ErrorKind::invalid_argument, path + ": checkpoint is for q=" + std::to_string(cq) +
                                              " n=" + std::to_string(cn));
    cur.power = gf2::io::get_u32(is);
    cur.next_source = gf2::io::get_u64(is);
    stats.columns = gf2::io::get_u64(is);
    stats.soft_marks = gf2::io::get_u64(is);
    pm = gf2::read_pivot_map<gf2::SparseRow>(is);
    return true;
}

}  // namespace detail

inline void DegreeSpace::stream_hit_columns(const BuildOptions& opts)
{
    pivots_ = gf2::PivotMap<gf2::SparseRow>(monomials_.size());
    detail::StreamCursor cur;
    if (!opts.checkpoint.empty() && opts.resume &&
        detail::read_space_checkpoint(opts.checkpoint, q_, n_, cur, stats_, pivots_)) {
        stats_.resumed = true;
        require(pivots_.ncols() == monomials_.size(), ErrorKind::io, "checkpoint column count mismatch");
    }

    const std::size_t batch = std::max<std::size_t>(1, opts.batch);
    std::vector<std::vector<std::uint32_t>> rows;
    gf2::SparseReducer reducer(monomials_.size());
    std::vector<ExponentTuple> sources;

    // Deterministic footprint estimate: independent of allocator growth.
    std::size_t entries = 0;
    for (const auto& r : pivots_.rows())
        entries += r.count();
    auto footprint = [&] {
        return entries * sizeof(std::uint32_t) + pivots_.rank() * sizeof(gf2::SparseRow) +
               monomials_.size() * (sizeof(ExponentTuple) + 2 * sizeof(std::uint32_t) + 2);
    };
    std::size_t next_mark = opts.mem_soft == 0 ? std::numeric_limits<std::size_t>::max()
                                               : opts.mem_soft * (stats_.soft_marks + 1);

    for (unsigned p = cur.power; (std::uint64_t{1} << p) <= n_; ++p) {
        const unsigned k = 1u << p;
        const unsigned source_degree = n_ - k;
        const ExponentRanker source_ranker(q_, source_degree);
        const std::uint64_t source_total = source_ranker.total();
        std::uint64_t done = p == cur.power ? cur.next_source : 0;
        if (done >= source_total)
            continue;
        ExponentEnumerator it(source_ranker.unrank(done));

        while (done < source_total) {
            sources.clear();
            ExponentTuple b;
            while (sources.size() < batch && it.next(b))
                sources.push_back(b);
            rows.assign(sources.size(), {});

            parallel_chunks(opts.threads, sources.size(), [&](std::size_t begin, std::size_t end) {
                for (std::size_t s = begin; s < end; ++s) {
                    auto& row = rows[s];
                    for_each_square_term(k, sources[s], [&](const ExponentTuple& t) {
                        row.push_back(lex_to_pos_[ranker_.rank(t)]);
                    });
                    std::ranges::sort(row);
                }
            });

            for (auto& r : rows) {
                ++stats_.columns;
                if (r.empty())
                    continue;
                auto row = gf2::SparseRow::from_sorted(monomials_.size(), std::move(r));
                reducer.reduce(row, pivots_);
                if (row.any()) {
                    entries += row.count();
                    pivots_.insert_reduced(std::move(row));
                }
            }
            done += sources.size();

            if (opts.on_progress)
                opts.on_progress({p, done, source_total, pivots_.rank(), footprint()});

            const std::size_t bytes = footprint();
            const detail::StreamCursor here{p, done};
            if (bytes >= next_mark) {
                ++stats_.soft_marks;
                next_mark = opts.mem_soft * (stats_.soft_marks + 1);
                if (!opts.checkpoint.empty()) {
                    detail::write_space_checkpoint(opts.checkpoint, q_, n_, here, stats_, pivots_);
                    ++stats_.checkpoints_written;
                }
            }
            if (opts.mem_hard != 0 && bytes >= opts.mem_hard) {
                if (!opts.checkpoint.empty()) {
                    detail::write_space_checkpoint(opts.checkpoint, q_, n_, here, stats_, pivots_);
                    ++stats_.checkpoints_written;
                }
                fail(ErrorKind::guard, "hard memory threshold reached (" + std::to_string(bytes) + " bytes)" +
                                           (opts.checkpoint.empty() ? std::string()
                                                                    : "; checkpoint saved to " + opts.checkpoint));
            }
        }
    }
}

inline void DegreeSpace::finalize()
{
    adm_rank_.assign(monomials_.size(), -1);
    admissible_.clear();
    for (std::size_t pos = 0; pos < monomials_.size(); ++pos) {
        if (!pivots_.is_pivot(pos)) {
            adm_rank_[pos] = static_cast<std::int32_t>(admissible_.size());
            admissible_.push_back(static_cast<std::uint32_t>(pos));
        }
    }
    for (std::size_t pos = 0; pos < monomials_.size(); ++pos)
        if (is_spike(monomials_[pos]) && !is_admissible(pos))
            fail(ErrorKind::internal, "spike " + to_string(monomials_[pos]) + " reduced as hit");
    nf_.assign(monomials_.size(), {});
    nf_done_.assign(monomials_.size(), 0);
}

inline DegreeSpace DegreeSpace::build(int q, unsigned n, const BuildOptions& opts)
{
    require(q >= 1 && q <= kMaxVariables, ErrorKind::invalid_argument, "q out of range");
    DegreeSpace ds;
    ds.q_ = q;
    ds.n_ = n;
    ds.index_monomials();
    ds.stream_hit_columns(opts);
    ds.finalize();
    return ds;
}

inline std::span<const std::uint32_t> DegreeSpace::normal_form_locked(std::uint32_t pos) const
{
    if (nf_done_[pos])
        return nf_[pos];
    if (adm_rank_[pos] >= 0) {
        nf_[pos] = {static_cast<std::uint32_t>(adm_rank_[pos])};
        nf_done_[pos] = 1;
        return nf_[pos];
    }
    // x_k = sum of the other monomials of its pivot row (all smaller), so
    // NF(k) = XOR of their normal forms; resolve dependencies depth-first.
    std::vector<std::uint32_t> stack{pos};
    while (!stack.empty()) {
        const std::uint32_t top = stack.back();
        if (nf_done_[top]) {
            stack.pop_back();
            continue;
        }
        if (adm_rank_[top] >= 0) {
            nf_[top] = {static_cast<std::uint32_t>(adm_rank_[top])};
            nf_done_[top] = 1;
            stack.pop_back();
            continue;
        }
        const auto* row = pivots_.find(top);
        bool ready = true;
        for (std::uint32_t c : row->indices())
            if (c != top && !nf_done_[c]) {
                stack.push_back(c);
                ready = false;
            }
        if (!ready)
            continue;
        std::vector<std::uint32_t> acc;
        for (std::uint32_t c : row->indices())
            if (c != top)
                acc.insert(acc.end(), nf_[c].begin(), nf_[c].end());
        nf_[top] = cancel_pairs(std::move(acc));
        nf_[top].shrink_to_fit();
        nf_done_[top] = 1;
        stack.pop_back();
    }
    return nf_[pos];
}

inline DegreeSpace build_degree_space(int q, unsigned n, const BuildOptions& opts = {})
{
    return DegreeSpace::build(q, n, opts);
}

/// Admissible basis grouped by weight vector, ascending by weight.
inline std::vector<WeightBlock> weight_decomposition(const DegreeSpace& ds)
{
    std::vector<WeightBlock> blocks(ds.weights().size());
    for (std::size_t w = 0; w < blocks.size(); ++w)
        blocks[w].omega = ds.weights()[w];
    for (std::uint32_t r = 0; r < ds.dim(); ++r)
        blocks[ds.admissible_weight_id(r)].admissible.push_back(r);
    std::erase_if(blocks, [](const WeightBlock& b) { return b.admissible.empty(); });
    return blocks;
}

/// Groups a subset of admissible ranks by weight, ascending.
inline std::vector<WeightBlock> weight_decomposition(const DegreeSpace& ds, std::span<const std::uint32_t> ranks)
{
    std::map<std::uint16_t, std::vector<std::uint32_t>> by_weight;
    for (std::uint32_t r : ranks)
        by_weight[ds.admissible_weight_id(r)].push_back(r);
    std::vector<WeightBlock> blocks;
    for (auto& [id, members] : by_weight) {
        std::ranges::sort(members);
        blocks.push_back({ds.weights()[id], std::move(members)});
    }
    return blocks;
}

}  // namespace hitkernel
