#pragma once

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hitkernel/error.hpp"

namespace hitkernel::gf2 {

using Block = std::uint64_t;
inline constexpr std::size_t kBlockBits = 64;

inline constexpr std::size_t blocks_for(std::size_t bits) noexcept
{
    return (bits + kBlockBits - 1) / kBlockBits;
}

/// Packed row of bits; bits past size() are always zero.
class BitRow {
public:
    BitRow() = default;

    explicit BitRow(std::size_t size)
        : blocks_(blocks_for(size)), size_(size)
    {
    }

    static BitRow from_indices(std::size_t size, std::span<const std::uint32_t> indices)
    {
        BitRow r(size);
        for (std::uint32_t i : indices)
            r.flip(i);
        return r;
    }

    std::size_t size() const noexcept { return size_; }
    std::span<const Block> blocks() const noexcept { return blocks_; }
    std::span<Block> blocks() noexcept { return blocks_; }

    bool test(std::size_t i) const noexcept
    {
        return (blocks_[i / kBlockBits] >> (i % kBlockBits)) & 1u;
    }
    void set(std::size_t i) noexcept { blocks_[i / kBlockBits] |= Block{1} << (i % kBlockBits); }
    void reset(std::size_t i) noexcept { blocks_[i / kBlockBits] &= ~(Block{1} << (i % kBlockBits)); }
    void flip(std::size_t i) noexcept { blocks_[i / kBlockBits] ^= Block{1} << (i % kBlockBits); }

    BitRow& operator^=(const BitRow& other)
    {
        require(size_ == other.size_, ErrorKind::invalid_argument, "BitRow length mismatch");
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            blocks_[b] ^= other.blocks_[b];
        return *this;
    }

    friend BitRow operator^(BitRow a, const BitRow& b) { return a ^= b; }
    friend bool operator==(const BitRow&, const BitRow&) = default;

    bool any() const noexcept
    {
        return std::ranges::any_of(blocks_, [](Block b) { return b != 0; });
    }
    bool none() const noexcept { return !any(); }

    std::size_t count() const noexcept
    {
        std::size_t c = 0;
        for (Block b : blocks_)
            c += static_cast<std::size_t>(std::popcount(b));
        return c;
    }

    /// Lowest set bit at or after block `from_block`.
    std::optional<std::size_t> leading(std::size_t from_block = 0) const noexcept
    {
        for (std::size_t b = from_block; b < blocks_.size(); ++b)
            if (blocks_[b] != 0)
                return b * kBlockBits + static_cast<std::size_t>(std::countr_zero(blocks_[b]));
        return std::nullopt;
    }

    std::vector<std::uint32_t> indices() const
    {
        std::vector<std::uint32_t> out;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            Block w = blocks_[b];
            while (w != 0) {
                out.push_back(static_cast<std::uint32_t>(b * kBlockBits +
                                                         static_cast<std::size_t>(std::countr_zero(w))));
                w &= w - 1;
            }
        }
        return out;
    }

    /// Parity of the bitwise AND; the GF(2) dot product.
    bool dot(const BitRow& other) const
    {
        require(size_ == other.size_, ErrorKind::invalid_argument, "BitRow length mismatch");
        Block acc = 0;
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            acc ^= blocks_[b] & other.blocks_[b];
        return std::popcount(acc) & 1;
    }

    std::size_t heap_bytes() const noexcept { return blocks_.capacity() * sizeof(Block); }

private:
    std::vector<Block> blocks_;
    std::size_t size_ = 0;
};

/// Sorted set of column indices; the sparse counterpart of BitRow used by
/// the hit elimination, where rows have a handful of entries over 10^5-10^6
/// columns.
class SparseRow {
public:
    SparseRow() = default;

    explicit SparseRow(std::size_t size)
        : size_(size)
    {
    }

    /// Duplicate indices cancel in pairs.
    static SparseRow from_indices(std::size_t size, std::vector<std::uint32_t> indices)
    {
        std::ranges::sort(indices);
        SparseRow r(size);
        for (std::size_t i = 0; i < indices.size();) {
            std::size_t j = i;
            while (j < indices.size() && indices[j] == indices[i])
                ++j;
            if ((j - i) % 2 == 1)
                r.idx_.push_back(indices[i]);
            i = j;
        }
        return r;
    }

    /// Caller guarantees `sorted` is strictly increasing.
    static SparseRow from_sorted(std::size_t size, std::vector<std::uint32_t> sorted)
    {
        SparseRow r(size);
        r.idx_ = std::move(sorted);
        return r;
    }

    std::size_t size() const noexcept { return size_; }
    std::span<const std::uint32_t> indices() const noexcept { return idx_; }
    std::size_t count() const noexcept { return idx_.size(); }
    bool any() const noexcept { return !idx_.empty(); }
    bool none() const noexcept { return idx_.empty(); }

    bool test(std::size_t i) const noexcept
    {
        return std::ranges::binary_search(idx_, static_cast<std::uint32_t>(i));
    }

    std::optional<std::size_t> leading() const noexcept
    {
        if (idx_.empty())
            return std::nullopt;
        return idx_.front();
    }

    SparseRow& operator^=(const SparseRow& other)
    {
        require(size_ == other.size_, ErrorKind::invalid_argument, "SparseRow length mismatch");
        std::vector<std::uint32_t> out;
        out.reserve(idx_.size() + other.idx_.size());
        std::ranges::set_symmetric_difference(idx_, other.idx_, std::back_inserter(out));
        idx_ = std::move(out);
        return *this;
    }

    friend bool operator==(const SparseRow&, const SparseRow&) = default;

    std::size_t heap_bytes() const noexcept { return idx_.capacity() * sizeof(std::uint32_t); }

private:
    std::vector<std::uint32_t> idx_;
    std::size_t size_ = 0;
};

template <class R>
concept Row = requires(R r, const R cr, std::size_t i) {
    { cr.size() } -> std::convertible_to<std::size_t>;
    { cr.leading() } -> std::same_as<std::optional<std::size_t>>;
    { cr.test(i) } -> std::convertible_to<bool>;
    { cr.any() } -> std::convertible_to<bool>;
    { r ^= cr };
    { cr.heap_bytes() } -> std::convertible_to<std::size_t>;
};

/// Reduced rows keyed by their leading (lowest-index) set bit.
template <Row R>
class PivotMap {
public:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    PivotMap() = default;

    explicit PivotMap(std::size_t ncols)
        : ncols_(ncols), slot_(ncols, kNone)
    {
        require(ncols < kNone, ErrorKind::invalid_argument, "PivotMap: too many columns");
    }

    std::size_t ncols() const noexcept { return ncols_; }
    std::size_t rank() const noexcept { return rows_.size(); }

    bool is_pivot(std::size_t col) const noexcept { return slot_[col] != kNone; }

    const R* find(std::size_t col) const noexcept
    {
        auto s = slot_[col];
        return s == kNone ? nullptr : &rows_[s];
    }

    /// Pivot keys in insertion order.
    std::span<const std::uint32_t> keys() const noexcept { return keys_; }
    std::span<const R> rows() const noexcept { return rows_; }

    /// XOR-reduces `row` until its leading bit is not a pivot key (or it is zero).
    void reduce(R& row) const
    {
        require(row.size() == ncols_, ErrorKind::invalid_argument, "row length does not match pivot map");
        while (auto lead = row.leading()) {
            auto s = slot_[*lead];
            if (s == kNone)
                return;
            row ^= rows_[s];
        }
    }

    /// Adds an already reduced, nonzero row whose leading bit is free.
    void insert_reduced(R row)
    {
        auto lead = row.leading();
        require(lead.has_value() && slot_[*lead] == kNone, ErrorKind::internal,
                "insert_reduced: row is zero or its leading bit is taken");
        slot_[*lead] = static_cast<std::uint32_t>(rows_.size());
        keys_.push_back(static_cast<std::uint32_t>(*lead));
        bytes_ += row.heap_bytes() + sizeof(R);
        rows_.push_back(std::move(row));
    }

    /// Approximate heap footprint of the stored rows.
    std::size_t heap_bytes() const noexcept
    {
        return bytes_ + slot_.capacity() * sizeof(std::uint32_t) + keys_.capacity() * sizeof(std::uint32_t);
    }

    /// Brings every stored row to reduced row-echelon form: no pivot key
    /// other than its own appears in any stored row.
    void back_substitute()
    {
        std::vector<std::uint32_t> order(keys_.begin(), keys_.end());
        std::ranges::sort(order, std::greater<>{});
        for (std::uint32_t key : order) {
            R& row = rows_[slot_[key]];
            std::vector<std::uint32_t> hits;
            for_each_set(row, [&](std::size_t c) {
                if (c != key && slot_[c] != kNone)
                    hits.push_back(static_cast<std::uint32_t>(c));
            });
            for (std::uint32_t c : hits)
                row ^= rows_[slot_[c]];
        }
    }

    template <class F>
    static void for_each_set(const R& row, F&& f)
    {
        if constexpr (std::same_as<R, SparseRow>) {
            for (std::uint32_t c : row.indices())
                f(static_cast<std::size_t>(c));
        } else {
            auto blocks = row.blocks();
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                Block w = blocks[b];
                while (w != 0) {
                    f(b * kBlockBits + static_cast<std::size_t>(std::countr_zero(w)));
                    w &= w - 1;
                }
            }
        }
    }

    friend bool operator==(const PivotMap& a, const PivotMap& b)
    {
        return a.ncols_ == b.ncols_ && a.keys_ == b.keys_ && a.rows_ == b.rows_;
    }

private:
    std::size_t ncols_ = 0;
    std::vector<std::uint32_t> slot_;
    std::vector<std::uint32_t> keys_;
    std::vector<R> rows_;
    std::size_t bytes_ = 0;
};

/// Scratch space for reducing sparse rows against a sparse pivot map. The
/// working row lives in a dense bit array with a 64-ary summary tree on top,
/// so each elimination step costs the length of the pivot row rather than a
/// merge with the whole (possibly long) remainder.
class SparseReducer {
public:
    explicit SparseReducer(std::size_t ncols)
    {
        std::size_t words = blocks_for(std::max<std::size_t>(ncols, 1));
        for (;;) {
            levels_.emplace_back(words, 0);
            if (words == 1)
                break;
            words = blocks_for(words);
        }
    }

    /// Same result as pm.reduce(row).
    void reduce(SparseRow& row, const PivotMap<SparseRow>& pm)
    {
        const auto lead = row.leading();
        if (!lead || !pm.is_pivot(*lead))
            return;
        for (std::uint32_t c : row.indices())
            flip(c);
        while (auto low = lowest()) {
            const SparseRow* p = pm.find(*low);
            if (p == nullptr)
                break;
            for (std::uint32_t c : p->indices())
                flip(c);
        }
        std::vector<std::uint32_t> out;
        while (auto low = lowest()) {
            out.push_back(static_cast<std::uint32_t>(*low));
            flip(*low);
        }
        row = SparseRow::from_sorted(row.size(), std::move(out));
    }

private:
    void flip(std::size_t i)
    {
        for (auto& level : levels_) {
            Block& w = level[i / kBlockBits];
            const bool was_empty = w == 0;
            w ^= Block{1} << (i % kBlockBits);
            if (was_empty == (w == 0))
                return;  // occupancy of this word unchanged, parents stay valid
            i /= kBlockBits;
        }
    }

    std::optional<std::size_t> lowest() const
    {
        if (levels_.back()[0] == 0)
            return std::nullopt;
        std::size_t i = 0;
        for (auto level = levels_.rbegin(); level != levels_.rend(); ++level)
            i = i * kBlockBits + static_cast<std::size_t>(std::countr_zero((*level)[i]));
        return i;
    }

    std::vector<std::vector<Block>> levels_;  // levels_[0] holds the row bits
};

template <Row R>
struct ReduceResult {
    R row;
    bool new_pivot = false;
};

/// Reduces `row` against `pm`; a nonzero remainder becomes a new pivot.
template <Row R>
ReduceResult<R> online_reduce(R row, PivotMap<R>& pm)
{
    pm.reduce(row);
    if (!row.any())
        return {std::move(row), false};
    pm.insert_reduced(row);
    return {std::move(row), true};
}

class BitMatrix {
public:
    BitMatrix() = default;

    BitMatrix(std::size_t nrows, std::size_t ncols)
        : rows_(nrows, BitRow(ncols)), ncols_(ncols)
    {
    }

    explicit BitMatrix(std::size_t ncols)
        : ncols_(ncols)
    {
    }

    std::size_t nrows() const noexcept { return rows_.size(); }
    std::size_t ncols() const noexcept { return ncols_; }

    const BitRow& row(std::size_t r) const { return rows_[r]; }
    BitRow& row(std::size_t r) { return rows_[r]; }
    std::span<const BitRow> rows() const noexcept { return rows_; }

    void set(std::size_t r, std::size_t c) { rows_[r].set(c); }
    void flip(std::size_t r, std::size_t c) { rows_[r].flip(c); }
    bool test(std::size_t r, std::size_t c) const { return rows_[r].test(c); }

    void push_row(BitRow row)
    {
        require(row.size() == ncols_, ErrorKind::invalid_argument, "BitMatrix: row length mismatch");
        rows_.push_back(std::move(row));
    }

    /// M * v over GF(2).
    BitRow apply(const BitRow& v) const
    {
        require(v.size() == ncols_, ErrorKind::invalid_argument, "BitMatrix::apply: length mismatch");
        BitRow out(rows_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (rows_[r].dot(v))
                out.set(r);
        return out;
    }

private:
    std::vector<BitRow> rows_;
    std::size_t ncols_ = 0;
};

struct Nullspace {
    std::size_t rank = 0;
    std::vector<BitRow> basis;  // vectors over the column space
};

namespace detail {

inline Nullspace nullspace_from(PivotMap<BitRow>& pm)
{
    const std::size_t ncols = pm.ncols();
    pm.back_substitute();
    // free column f contributes e_f + sum of e_p over pivot rows p containing f
    std::vector<std::int64_t> free_slot(ncols, -1);
    Nullspace out;
    out.rank = pm.rank();
    for (std::size_t c = 0; c < ncols; ++c) {
        if (!pm.is_pivot(c)) {
            free_slot[c] = static_cast<std::int64_t>(out.basis.size());
            BitRow v(ncols);
            v.set(c);
            out.basis.push_back(std::move(v));
        }
    }
    auto keys = pm.keys();
    auto rows = pm.rows();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const std::uint32_t key = keys[i];
        PivotMap<BitRow>::for_each_set(rows[i], [&](std::size_t c) {
            if (c != key)
                out.basis[static_cast<std::size_t>(free_slot[c])].set(key);
        });
    }
    return out;
}

}  // namespace detail

/// Rank and a nullspace basis of M (vectors v with M v = 0).
inline Nullspace nullspace(const BitMatrix& m)
{
    PivotMap<BitRow> pm(m.ncols());
    for (const BitRow& r : m.rows())
        online_reduce(r, pm);
    return detail::nullspace_from(pm);
}

/// Nullspace of the vertical concatenation of `blocks`.
inline Nullspace solve_stacked(std::span<const BitMatrix> blocks)
{
    require(!blocks.empty(), ErrorKind::invalid_argument, "solve_stacked: no blocks");
    const std::size_t ncols = blocks.front().ncols();
    PivotMap<BitRow> pm(ncols);
    for (const BitMatrix& b : blocks) {
        require(b.ncols() == ncols, ErrorKind::invalid_argument, "solve_stacked: column count mismatch");
        for (const BitRow& r : b.rows())
            online_reduce(r, pm);
    }
    return detail::nullspace_from(pm);
}

// Checkpoint serialization: little-endian, version-tagged.
//   magic "HKPM" | u32 version | u32 row kind (0 packed, 1 sparse)
//   u64 ncols | u64 pivot count | per pivot: u64 key, u64 length, payload
// Packed payload is the block array (u64 each); sparse payload is the
// index list (u32 each).
namespace io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void put_u32(std::ostream& os, std::uint32_t v)
{
    char buf[4];
    for (int i = 0; i < 4; ++i)
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v)
{
    char buf[8];
    for (int i = 0; i < 8; ++i)
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, 8);
}

inline std::uint32_t get_u32(std::istream& is)
{
    unsigned char buf[4];
    if (!is.read(reinterpret_cast<char*>(buf), 4))
        fail(ErrorKind::io, "checkpoint truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& is)
{
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8))
        fail(ErrorKind::io, "checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace io

template <Row R>
void write_pivot_map(std::ostream& os, const PivotMap<R>& pm)
{
    os.write("HKPM", 4);
    io::put_u32(os, io::kCheckpointVersion);
    io::put_u32(os, std::same_as<R, SparseRow> ? 1u : 0u);
    io::put_u64(os, pm.ncols());
    io::put_u64(os, pm.rank());
    auto keys = pm.keys();
    auto rows = pm.rows();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        io::put_u64(os, keys[i]);
        if constexpr (std::same_as<R, SparseRow>) {
            io::put_u64(os, rows[i].count());
            for (std::uint32_t c : rows[i].indices())
                io::put_u32(os, c);
        } else {
            io::put_u64(os, rows[i].blocks().size());
            for (Block b : rows[i].blocks())
                io::put_u64(os, b);
        }
    }
    if (!os)
        fail(ErrorKind::io, "failed writing pivot map");
}

template <Row R>
PivotMap<R> read_pivot_map(std::istream& is)
{
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "HKPM")
        fail(ErrorKind::io, "not a pivot-map checkpoint");
    if (io::get_u32(is) != io::kCheckpointVersion)
        fail(ErrorKind::io, "unsupported checkpoint version");
    const std::uint32_t kind = io::get_u32(is);
    if (kind != (std::same_as<R, SparseRow> ? 1u : 0u))
        fail(ErrorKind::io, "checkpoint row kind mismatch");
    const std::uint64_t ncols = io::get_u64(is);
    const std::uint64_t count = io::get_u64(is);
    PivotMap<R> pm(ncols);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t key = io::get_u64(is);
        const std::uint64_t len = io::get_u64(is);
        R row;
        if constexpr (std::same_as<R, SparseRow>) {
            std::vector<std::uint32_t> idx(len);
            for (auto& c : idx)
                c = io::get_u32(is);
            if (!std::ranges::is_sorted(idx) || std::ranges::adjacent_find(idx) != idx.end())
                fail(ErrorKind::io, "checkpoint row not strictly increasing");
            row = SparseRow::from_sorted(ncols, std::move(idx));
        } else {
            if (len != blocks_for(ncols))
                fail(ErrorKind::io, "checkpoint block count mismatch");
            row = BitRow(ncols);
            for (auto& b : row.blocks())
                b = io::get_u64(is);
        }
        if (row.leading() != std::optional<std::size_t>(key))
            fail(ErrorKind::io, "checkpoint row leading bit does not match its key");
        pm.insert_reduced(std::move(row));
    }
    return pm;
}

}  // namespace hitkernel::gf2
