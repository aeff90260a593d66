#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynrepset/pseudorandom.hpp"
#include "dynrepset/util.hpp"

namespace dynrepset {

struct context_options {
    family_build_options families;
    std::size_t max_rank = std::size_t(1) << 26;  // ceiling on r; representations are r-sized
    std::filesystem::path cache_dir;              // empty = no on-disk family cache
};

// One column of the factorization: a hash pair (outer, inner) and one
// (F, p) choice per block.
struct column_index {
    int outer_idx = 0;
    int inner_idx = 0;
    std::vector<std::pair<int, int>> blocks;  // (family set index, p in 0..s)
};

// Implicit rank-r factorization D = L * R over universe [0, n) for subset
// sizes up to k_user. Internally k is padded to the square s*s with d
// phantom elements appended after the real universe, and u = k*k. Rows of
// L are lifted by the phantom set; columns of R are never padded. All
// stored tables are semiring-independent: every matrix entry here is 0/1.
struct factorization_context {
    int n = 0, k_user = 0;
    int s = 0, k = 0, d = 0, n_pad = 0, u = 0;

    splitter_family outer;  // (n_pad, k, u)-splitter
    splitter_family inner;  // (u, k, s)-splitter
    universal_family fam;   // (u, s)-universal

    std::size_t h = 0;    // |outer| * |inner|
    std::size_t ell = 0;  // |fam| * (s+1)
    std::size_t r = 0;    // h * ell^s

    std::vector<std::size_t> pow_ell;  // ell^0 .. ell^s

    // All A with |A| <= s in enumeration order (size ascending), plus lookup.
    std::vector<bitset128> rows;
    std::unordered_map<bitset128, std::uint32_t, bitset128_hash> row_ids;
    // Per row: the columns c = (F, p) of X with A subset of F and |A| <= p.
    std::vector<std::vector<std::uint32_t>> row_cols;

    // Element-convolution tables, one per v in [0, u): the rows that can
    // feed an output column after inserting v, and per column (F, p) the
    // local row indices A with A | {v} subset of F and |A| + 1 <= p.
    struct conv_tables {
        std::vector<std::uint32_t> rows;               // global row ids
        std::vector<std::vector<std::uint32_t>> cols;  // ell lists of local indices
    };
    std::vector<conv_tables> conv;

    int col_of(int f_idx, int p) const { return f_idx * (s + 1) + p; }
    std::pair<int, int> col_split(int c) const { return {c / (s + 1), c % (s + 1)}; }

    std::size_t stride(int block) const { return pow_ell[s - 1 - block]; }

    std::size_t encode(const column_index& ci) const {
        std::size_t flat = ((std::size_t)ci.outer_idx * inner.size() + ci.inner_idx) * pow_ell[s];
        for (int i = 0; i < s; ++i)
            flat += (std::size_t)col_of(ci.blocks[i].first, ci.blocks[i].second) * stride(i);
        return flat;
    }

    column_index decode(std::size_t flat) const {
        column_index ci;
        std::size_t hash = flat / pow_ell[s];
        std::size_t rest = flat % pow_ell[s];
        ci.outer_idx = (int)(hash / inner.size());
        ci.inner_idx = (int)(hash % inner.size());
        ci.blocks.resize(s);
        for (int i = s - 1; i >= 0; --i) {
            ci.blocks[i] = col_split((int)(rest % ell));
            rest /= ell;
        }
        return ci;
    }
};

// X[A, (F,p)] = 1 iff A is inside F and has at most p elements.
inline bool x_entry(const factorization_context& ctx, bitset128 a, int f_idx, int p) {
    return a.subset_of(ctx.fam.sets[f_idx]) && a.count() <= p;
}

// Y[(F,p), B] = 1 iff B avoids F and has at most s-p elements.
inline bool y_entry(const factorization_context& ctx, int f_idx, int p, bitset128 b) {
    return !ctx.fam.sets[f_idx].intersects(b) && b.count() <= ctx.s - p;
}

namespace detail {

// Hash A under the column's outer function and scatter it into per-block
// subsets of [0, u); fails when the function collides on A.
inline bool block_images(const factorization_context& ctx, const std::vector<std::uint16_t>& pi,
                         const std::vector<std::uint16_t>& sigma, std::span<const int> elems,
                         std::vector<bitset128>& blocks_out) {
    blocks_out.assign(ctx.s, bitset128{});
    bitset128 seen;
    for (int e : elems) {
        int v = pi[e];
        if (seen.test(v)) return false;
        seen.set(v);
        blocks_out[sigma[v]].set(v);
    }
    return true;
}

inline void check_universe(const factorization_context& ctx, std::span<const int> elems) {
    for (int e : elems)
        if (e < 0 || e >= ctx.n) throw std::invalid_argument("set element outside the universe [0, n)");
}

}  // namespace detail

// L[A, col] with A given as a sorted sequence of distinct elements of
// [0, n). A is lifted by the phantom elements before hashing; sets larger
// than k_user are identically 0.
inline bool l_entry(const factorization_context& ctx, std::span<const int> a_elems, const column_index& col) {
    detail::check_universe(ctx, a_elems);
    if ((int)a_elems.size() > ctx.k_user) return false;
    std::vector<int> padded(a_elems.begin(), a_elems.end());
    for (int i = 0; i < ctx.d; ++i) padded.push_back(ctx.n + i);
    const auto& pi = ctx.outer.functions[col.outer_idx];
    const auto& sigma = ctx.inner.functions[col.inner_idx];
    std::vector<bitset128> blocks;
    if (!detail::block_images(ctx, pi, sigma, padded, blocks)) return false;
    for (int i = 0; i < ctx.s; ++i)
        if (!x_entry(ctx, blocks[i], col.blocks[i].first, col.blocks[i].second)) return false;
    return true;
}

// R[col, B]; B is never padded.
inline bool r_entry(const factorization_context& ctx, const column_index& col, std::span<const int> b_elems) {
    detail::check_universe(ctx, b_elems);
    if ((int)b_elems.size() > ctx.k_user) return false;
    const auto& pi = ctx.outer.functions[col.outer_idx];
    const auto& sigma = ctx.inner.functions[col.inner_idx];
    std::vector<bitset128> blocks;
    if (!detail::block_images(ctx, pi, sigma, b_elems, blocks)) return false;
    for (int i = 0; i < ctx.s; ++i)
        if (!y_entry(ctx, col.blocks[i].first, col.blocks[i].second, blocks[i])) return false;
    return true;
}

// Assembles a context from explicitly given families; the normal entry
// point is build_context below. Exposed so tests can inject mutated
// families.
inline factorization_context make_context(int n, int k_user, splitter_family outer, splitter_family inner,
                                          universal_family fam, std::size_t max_rank = std::size_t(1) << 26) {
    if (k_user < 1 || k_user > n) throw std::invalid_argument("make_context: need 1 <= k <= n");
    factorization_context ctx;
    ctx.n = n;
    ctx.k_user = k_user;
    ctx.s = 1;
    while (ctx.s * ctx.s < k_user) ++ctx.s;
    ctx.k = ctx.s * ctx.s;
    ctx.d = ctx.k - k_user;
    ctx.n_pad = n + ctx.d;
    ctx.u = ctx.k * ctx.k;
    if (ctx.u > bitset128::capacity)
        throw resource_error("context: padded k^2 exceeds the 128-element hash universe");
    if (outer.n != ctx.n_pad || outer.k != ctx.k || outer.ell != ctx.u)
        throw std::invalid_argument("make_context: outer splitter has wrong parameters");
    if (inner.n != ctx.u || inner.k != ctx.k || inner.ell != ctx.s)
        throw std::invalid_argument("make_context: inner splitter has wrong parameters");
    if (fam.u != ctx.u || fam.s != ctx.s) throw std::invalid_argument("make_context: universal family has wrong parameters");

    ctx.outer = std::move(outer);
    ctx.inner = std::move(inner);
    ctx.fam = std::move(fam);

    ctx.h = ctx.outer.size() * ctx.inner.size();
    ctx.ell = ctx.fam.size() * (std::size_t)(ctx.s + 1);
    ctx.pow_ell.assign(ctx.s + 1, 1);
    for (int i = 1; i <= ctx.s; ++i) {
        if (ctx.pow_ell[i - 1] > max_rank / ctx.ell)
            throw resource_error("context: ell^s alone exceeds the rank ceiling " + std::to_string(max_rank));
        ctx.pow_ell[i] = ctx.pow_ell[i - 1] * ctx.ell;
    }
    if (ctx.h > max_rank / ctx.pow_ell[ctx.s])
        throw resource_error("context: rank r = h * ell^s = " + std::to_string(ctx.h) + " * " +
                             std::to_string(ctx.pow_ell[ctx.s]) + " exceeds the ceiling " + std::to_string(max_rank));
    ctx.r = ctx.h * ctx.pow_ell[ctx.s];

    // Row universe and X column-cover lists.
    for_each_subset_up_to(ctx.u, ctx.s, [&](const std::vector<int>& a) {
        bitset128 b;
        for (int e : a) b.set(e);
        ctx.row_ids.emplace(b, (std::uint32_t)ctx.rows.size());
        ctx.rows.push_back(b);
    });
    ctx.row_cols.resize(ctx.rows.size());
    for (std::size_t rid = 0; rid < ctx.rows.size(); ++rid) {
        bitset128 a = ctx.rows[rid];
        int sz = a.count();
        for (int f = 0; f < (int)ctx.fam.size(); ++f) {
            if (!a.subset_of(ctx.fam.sets[f])) continue;
            for (int p = sz; p <= ctx.s; ++p) ctx.row_cols[rid].push_back((std::uint32_t)ctx.col_of(f, p));
        }
    }

    // Convolution tables per hashed element v.
    ctx.conv.resize(ctx.u);
    for (int v = 0; v < ctx.u; ++v) {
        auto& cv = ctx.conv[v];
        cv.cols.resize(ctx.ell);
        std::unordered_map<std::uint32_t, std::uint32_t> local;
        for (int f = 0; f < (int)ctx.fam.size(); ++f) {
            bitset128 fset = ctx.fam.sets[f];
            if (!fset.test(v)) continue;
            bitset128 rest = fset;
            rest.reset(v);
            std::vector<int> elems = rest.elements();
            for_each_subset_up_to((int)elems.size(), ctx.s - 1, [&](const std::vector<int>& idxs) {
                bitset128 a;
                for (int i : idxs) a.set(elems[i]);
                std::uint32_t gid = ctx.row_ids.at(a);
                auto [it, fresh] = local.emplace(gid, (std::uint32_t)cv.rows.size());
                if (fresh) cv.rows.push_back(gid);
                for (int p = (int)idxs.size() + 1; p <= ctx.s; ++p)
                    cv.cols[ctx.col_of(f, p)].push_back(it->second);
            });
        }
    }
    return ctx;
}

namespace detail {

template <class Family, class Reader>
Family load_or_build(const std::filesystem::path& dir, const std::string& name, Reader&& reader, auto&& builder) {
    if (!dir.empty()) {
        std::filesystem::path file = dir / name;
        if (std::filesystem::exists(file)) {
            std::ifstream in(file);
            return reader(in);
        }
        Family fam = builder();
        std::filesystem::create_directories(dir);
        std::ofstream out(file);
        write_family(out, fam);
        return fam;
    }
    return builder();
}

}  // namespace detail

// Pads k_user up to the next square, constructs (or loads from cache) the
// three families on the padded parameters, and precomputes the column
// layout and convolution tables.
inline factorization_context build_context(int n, int k_user, const context_options& opt = {}) {
    if (k_user < 1 || k_user > n) throw std::invalid_argument("build_context: need 1 <= k <= n");
    int s = 1;
    while (s * s < k_user) ++s;
    int k = s * s, d = k - k_user, n_pad = n + d, u = k * k;
    if (u > bitset128::capacity)
        throw resource_error("build_context: padded k^2 = " + std::to_string(u) + " exceeds 128");

    auto tag = [&](const std::string& base) {
        std::ostringstream os;
        os << base << std::hex << "_" << opt.families.seed << ".txt";
        return os.str();
    };
    splitter_family outer = detail::load_or_build<splitter_family>(
        opt.cache_dir, tag("splitter_" + std::to_string(n_pad) + "_" + std::to_string(k) + "_" + std::to_string(u)),
        [](std::istream& in) { return read_splitter(in); },
        [&] { return build_outer_splitter(n_pad, k, opt.families); });
    splitter_family inner = detail::load_or_build<splitter_family>(
        opt.cache_dir, tag("splitter_" + std::to_string(u) + "_" + std::to_string(k) + "_" + std::to_string(s)),
        [](std::istream& in) { return read_splitter(in); },
        [&] { return build_inner_splitter(u, k, s, opt.families); });
    universal_family fam = detail::load_or_build<universal_family>(
        opt.cache_dir, tag("universal_" + std::to_string(u) + "_" + std::to_string(s)),
        [](std::istream& in) { return read_universal(in); },
        [&] { return build_universal_family(u, s, opt.families); });

    return make_context(n, k_user, std::move(outer), std::move(inner), std::move(fam), opt.max_rank);
}

inline std::shared_ptr<const factorization_context> build_shared_context(int n, int k_user,
                                                                         const context_options& opt = {}) {
    return std::make_shared<const factorization_context>(build_context(n, k_user, opt));
}

}  // namespace dynrepset
