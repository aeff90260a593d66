#pragma once

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynrepset/factorization.hpp"
#include "dynrepset/semiring.hpp"

namespace dynrepset {

// Dense length-r vector standing in for a dynamic-programming table over
// subsets of [0, n): the table a is represented when a*D <= b*R and
// b <= a*L, which pins b*R = a*D exactly.
template <semiring S>
struct representation {
    std::shared_ptr<const factorization_context> ctx;
    S sr;
    std::vector<typename S::value_type> values;

    representation(std::shared_ptr<const factorization_context> c, S semi)
        : ctx(std::move(c)), sr(semi), values(ctx->r, sr.zero()) {}

    bool all_zero() const {
        for (const auto& v : values)
            if (v != sr.zero()) return false;
        return true;
    }
};

// Sparse table over subsets of [0, u); rows never touched by an operation
// are absent and read as 0.
template <semiring S>
struct sparse_table {
    std::unordered_map<bitset128, typename S::value_type, bitset128_hash> entries;

    typename S::value_type at(const S& sr, bitset128 key) const {
        auto it = entries.find(key);
        return it == entries.end() ? sr.zero() : it->second;
    }
};

// b_init = a_init * L where a_init is 1 exactly on the empty set. Column
// col is live iff every block of the hashed phantom set fits its (F, p)
// pair; without padding that is every column.
template <semiring S>
representation<S> init(std::shared_ptr<const factorization_context> ctx, S sr) {
    representation<S> b(std::move(ctx), sr);
    const factorization_context& c = *b.ctx;
    std::vector<int> phantoms;
    for (int i = 0; i < c.d; ++i) phantoms.push_back(c.n + i);
    std::vector<bitset128> blocks;
    std::size_t hash = 0;
    for (std::size_t oi = 0; oi < c.outer.size(); ++oi) {
        for (std::size_t ii = 0; ii < c.inner.size(); ++ii, ++hash) {
            std::size_t base = hash * c.pow_ell[c.s];
            if (!detail::block_images(c, c.outer.functions[oi], c.inner.functions[ii], phantoms, blocks))
                continue;  // collision on the phantoms: whole hash slice stays 0
            // passing[i][c]: block i accepts column c
            std::vector<std::vector<char>> passing(c.s, std::vector<char>(c.ell, 0));
            for (int i = 0; i < c.s; ++i)
                for (std::size_t cc = 0; cc < c.ell; ++cc) {
                    auto [f, p] = c.col_split((int)cc);
                    passing[i][cc] = x_entry(c, blocks[i], f, p);
                }
            // walk the ell^s grid, skipping failing prefixes wholesale
            std::vector<std::size_t> cursor(c.s, 0);
            std::vector<std::size_t> offset(c.s + 1, 0);
            int level = 0;
            while (level >= 0) {
                if (level == c.s) {
                    b.values[base + offset[c.s]] = sr.one();
                    --level;
                    continue;
                }
                std::size_t& cur = cursor[level];
                bool moved = false;
                while (cur < c.ell) {
                    std::size_t cc = cur++;
                    if (!passing[level][cc]) continue;
                    offset[level + 1] = offset[level] + cc * c.stride(level);
                    ++level;
                    moved = true;
                    break;
                }
                if (!moved) {
                    cursor[level] = 0;
                    --level;
                }
            }
        }
    }
    return b;
}

// Unique minimal a* with b* <= a* X, one lcu per row; rows whose cover is
// empty get the order's bottom element. cover[j] lists the columns i with
// X[j, i] = 1.
template <semiring S>
std::vector<typename S::value_type> invert_cover(const S& sr, std::span<const std::vector<std::uint32_t>> cover,
                                                 std::span<const typename S::value_type> b_star) {
    std::vector<typename S::value_type> a_star(cover.size(), sr.bottom());
    for (std::size_t j = 0; j < cover.size(); ++j) {
        auto acc = sr.bottom();
        for (std::uint32_t i : cover[j]) acc = sr.lcu2(acc, b_star[i]);
        a_star[j] = acc;
    }
    return a_star;
}

// invert against this context's X matrix, materialized over every row
// A with |A| <= s.
template <semiring S>
sparse_table<S> invert(const factorization_context& ctx, const S& sr,
                       std::span<const typename S::value_type> b_star) {
    if (b_star.size() != ctx.ell) throw std::invalid_argument("invert: b* must have ell entries");
    sparse_table<S> out;
    auto vals = invert_cover(sr, std::span(ctx.row_cols), b_star);
    out.entries.reserve(vals.size());
    for (std::size_t rid = 0; rid < vals.size(); ++rid) out.entries.emplace(ctx.rows[rid], vals[rid]);
    return out;
}

// Element convolution: for each hash pair, locate the block i hit by e's
// hash v, and per choice of the other blocks' columns replace the b* slice
// over block i with invert(X, b*) * C_{u,v} * X. Slices are disjoint, so
// the hash loop can fan out across threads.
template <semiring S>
representation<S> convolve(const representation<S>& b, int e, int threads = 1) {
    const factorization_context& c = *b.ctx;
    const S& sr = b.sr;
    if (e < 0 || e >= c.n) throw std::invalid_argument("convolve: element outside the universe [0, n)");
    representation<S> out(b.ctx, sr);

    parallel_for(threads, c.h, [&](std::size_t hash_lo, std::size_t hash_hi) {
        using V = typename S::value_type;
        std::vector<V> b_star(c.ell), a_star;
        for (std::size_t hash = hash_lo; hash < hash_hi; ++hash) {
            std::size_t oi = hash / c.inner.size(), ii = hash % c.inner.size();
            int v = c.outer.functions[oi][e];
            int blk = c.inner.functions[ii][v];
            const auto& cv = c.conv[v];
            a_star.assign(cv.rows.size(), sr.bottom());

            std::size_t base_hash = hash * c.pow_ell[c.s];
            std::size_t stride_i = c.stride(blk);
            // Enumerate the ell^(s-1) choices of off-block columns; their
            // combined offset is every flat index with digit blk zeroed.
            std::size_t combos = c.pow_ell[c.s] / c.ell;
            for (std::size_t t = 0; t < combos; ++t) {
                // offset of this combo inside the hash slice
                std::size_t rest = t, off = 0;
                for (int j = c.s - 1; j >= 0; --j) {
                    if (j == blk) continue;
                    off += (rest % c.ell) * c.stride(j);
                    rest /= c.ell;
                }
                std::size_t slice_base = base_hash + off;

                bool any = false;
                for (std::size_t cc = 0; cc < c.ell; ++cc) {
                    V val = b.values[slice_base + cc * stride_i];
                    b_star[cc] = val;
                    any = any || (val != sr.zero());
                }
                if (!any) continue;  // 0 slice maps to a 0 slice

                // a*[A] = lcu of covered b* entries, only for rows that can
                // reach an output column of this v.
                for (std::size_t lr = 0; lr < cv.rows.size(); ++lr) {
                    auto acc = sr.bottom();
                    for (std::uint32_t col : c.row_cols[cv.rows[lr]]) acc = sr.lcu2(acc, b_star[col]);
                    a_star[lr] = acc;
                }
                // (a* C_{u,v} X)[(F,p)] = sum of a*[A] over A|{v} inside F,
                // |A|+1 <= p.
                for (std::size_t cc = 0; cc < c.ell; ++cc) {
                    const auto& contrib = cv.cols[cc];
                    if (contrib.empty()) continue;
                    auto acc = sr.zero();
                    for (std::uint32_t lr : contrib) acc = sr.add(acc, a_star[lr]);
                    out.values[slice_base + cc * stride_i] = acc;
                }
            }
        }
    });
    return out;
}

// Left-to-right iterated convolve; repeating an element collapses the
// represented table to all-0.
template <semiring S>
representation<S> convolve_set(const representation<S>& b, std::span<const int> elems, int threads = 1) {
    representation<S> cur = b;
    for (int e : elems) cur = convolve(cur, e, threads);
    return cur;
}

template <semiring S>
representation<S> add_reps(const representation<S>& a, const representation<S>& b) {
    if (a.ctx.get() != b.ctx.get()) throw std::invalid_argument("add_reps: context mismatch");
    representation<S> out(a.ctx, a.sr);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.sr.add(a.values[i], b.values[i]);
    return out;
}

template <semiring S>
representation<S> scale_left(typename S::value_type lambda, const representation<S>& b) {
    representation<S> out(b.ctx, b.sr);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = b.sr.mul(lambda, b.values[i]);
    return out;
}

template <semiring S>
representation<S> scale_right(const representation<S>& b, typename S::value_type lambda) {
    representation<S> out(b.ctx, b.sr);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = b.sr.mul(b.values[i], lambda);
    return out;
}

// (v * R)[B] for a raw length-r vector v. Columns are walked per hash pair
// through the per-block lists of (F, p) pairs compatible with B, so only
// live columns are touched.
template <semiring S>
typename S::value_type query_values(const factorization_context& c, const S& sr,
                                    std::span<const typename S::value_type> values,
                                    std::span<const int> b_elems) {
    detail::check_universe(c, b_elems);
    auto result = sr.zero();
    if ((int)b_elems.size() > c.k_user) return result;  // all r_entry vanish

    std::vector<bitset128> blocks;
    std::vector<std::vector<std::uint32_t>> pass(c.s);
    std::size_t hash = 0;
    for (std::size_t oi = 0; oi < c.outer.size(); ++oi) {
        for (std::size_t ii = 0; ii < c.inner.size(); ++ii, ++hash) {
            if (!detail::block_images(c, c.outer.functions[oi], c.inner.functions[ii], b_elems, blocks)) continue;
            bool feasible = true;
            for (int i = 0; i < c.s && feasible; ++i) {
                pass[i].clear();
                for (std::size_t cc = 0; cc < c.ell; ++cc) {
                    auto [f, p] = c.col_split((int)cc);
                    if (y_entry(c, f, p, blocks[i])) pass[i].push_back((std::uint32_t)cc);
                }
                feasible = !pass[i].empty();
            }
            if (!feasible) continue;
            // sum over the product of the per-block passing lists
            std::size_t base = hash * c.pow_ell[c.s];
            std::vector<std::size_t> pos(c.s, 0);
            std::vector<std::size_t> offset(c.s + 1, base);
            int level = 0;
            while (level >= 0) {
                if (level == c.s) {
                    result = sr.add(result, values[offset[c.s]]);
                    --level;
                    continue;
                }
                if (pos[level] < pass[level].size()) {
                    offset[level + 1] = offset[level] + pass[level][pos[level]] * c.stride(level);
                    ++pos[level];
                    ++level;
                } else {
                    pos[level] = 0;
                    --level;
                }
            }
        }
    }
    return result;
}

// (b * R)[B]; when b represents a table a this equals (a * D)[B].
template <semiring S>
typename S::value_type query(const representation<S>& b, std::span<const int> b_elems) {
    return query_values(*b.ctx, b.sr, std::span<const typename S::value_type>(b.values), b_elems);
}

template <semiring S>
typename S::value_type query(const representation<S>& b, std::initializer_list<int> b_elems) {
    return query(b, std::span<const int>(b_elems.begin(), b_elems.end()));
}

}  // namespace dynrepset
