#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynrepset/repset.hpp"

// Dense brute-force references for every matrix identity the fast path
// relies on. Everything here may be exponential in n; it exists to check
// the real implementation on small instances.

namespace dynrepset::oracle {

// Table over subsets of [0, n) keyed by bitmask; absent keys read as 0.
template <semiring S>
using dense_table = std::unordered_map<std::uint64_t, typename S::value_type>;

inline std::uint64_t mask_of(std::span<const int> elems) {
    std::uint64_t m = 0;
    for (int e : elems) m |= 1ULL << e;
    return m;
}

inline std::vector<int> elems_of(std::uint64_t mask) {
    std::vector<int> out;
    for (int e = 0; e < 64; ++e)
        if (mask >> e & 1) out.push_back(e);
    return out;
}

// D[A,B] = 1 iff A and B are disjoint and their union has at most k elements.
inline bool d_entry(std::uint64_t a, std::uint64_t b, int k) {
    return (a & b) == 0 && __builtin_popcountll(a | b) <= k;
}

// C_e[A,B] = 1 iff e is not in A and B = A + e.
inline bool c_entry(std::uint64_t a, std::uint64_t b, int e) {
    return !(a >> e & 1) && (a | (1ULL << e)) == b;
}

template <semiring S>
typename S::value_type table_at(const S& sr, const dense_table<S>& t, std::uint64_t key) {
    auto it = t.find(key);
    return it == t.end() ? sr.zero() : it->second;
}

// a * D_{n,k}, keyed by every B with |B| <= k.
template <semiring S>
dense_table<S> dense_mul_D(const S& sr, const dense_table<S>& a, int n, int k) {
    dense_table<S> out;
    for_each_subset_up_to(n, k, [&](const std::vector<int>& belems) {
        std::uint64_t b = mask_of(belems);
        auto acc = sr.zero();
        for (const auto& [amask, val] : a)
            if (d_entry(amask, b, k)) acc = sr.add(acc, val);
        out[b] = acc;
    });
    return out;
}

// a * C_{n,e}: shifts mass from A to A + e, dropping sets that contain e.
template <semiring S>
dense_table<S> dense_mul_C(const S& sr, const dense_table<S>& a, int e) {
    dense_table<S> out;
    for (const auto& [amask, val] : a) {
        if (amask >> e & 1) continue;
        std::uint64_t key = amask | (1ULL << e);
        auto it = out.find(key);
        out[key] = it == out.end() ? val : sr.add(it->second, val);
    }
    return out;
}

// C_{n,e} * D_{n,k} == D_{n,k} * C^T_{n,e}, checked by expanding both
// products literally over every middle set E. The d hook lets tests verify
// the check notices a perturbed disjointness matrix.
inline bool check_commutation(int n, int k, int e, bool (*d)(std::uint64_t, std::uint64_t, int) = d_entry) {
    if (n > 20) throw resource_error("check_commutation: n too large for 2^n expansion");
    bool ok = true;
    for_each_subset_up_to(n, k, [&](const std::vector<int>& aelems) {
        if (!ok) return;
        std::uint64_t a = mask_of(aelems);
        for_each_subset_up_to(n, k, [&](const std::vector<int>& belems) {
            if (!ok) return;
            std::uint64_t b = mask_of(belems);
            bool lhs = false, rhs = false;
            for (std::uint64_t mid = 0; mid < (1ULL << n); ++mid) {
                lhs = lhs || (c_entry(a, mid, e) && d(mid, b, k));
                rhs = rhs || (d(a, mid, k) && c_entry(b, mid, e));  // C^T[mid,b] = C[b,mid]
            }
            if (lhs != rhs) ok = false;
        });
    });
    return ok;
}

// (L * R)[A,B] by summing l_entry * r_entry over every column index.
// Reference-grade; the factorization check below contracts per block
// instead, and the two are compared on sampled pairs in the tests.
inline bool lr_product_literal(const factorization_context& ctx, std::span<const int> a_elems,
                               std::span<const int> b_elems) {
    for (std::size_t flat = 0; flat < ctx.r; ++flat) {
        column_index col = ctx.decode(flat);
        if (l_entry(ctx, a_elems, col) && r_entry(ctx, col, b_elems)) return true;
    }
    return false;
}

namespace detail {

// Block images of a set under one hash pair; null when the outer function
// collides. Oversized blocks are kept (callers map them to empty covers).
inline bool hashed_blocks(const factorization_context& ctx, std::size_t oi, std::size_t ii,
                          std::span<const int> elems, std::vector<bitset128>& out) {
    return dynrepset::detail::block_images(ctx, ctx.outer.functions[oi], ctx.inner.functions[ii], elems, out);
}

}  // namespace detail

// (L * R)[A,B] contracted per hash pair and block: the column sum
// factorizes into a product over blocks of "some (F,p) passes both X and
// Y", which is an intersection test on precomputable column sets.
inline bool lr_product(const factorization_context& ctx, std::span<const int> a_elems, std::span<const int> b_elems) {
    if ((int)a_elems.size() > ctx.k_user || (int)b_elems.size() > ctx.k_user) return false;
    std::vector<int> padded(a_elems.begin(), a_elems.end());
    for (int i = 0; i < ctx.d; ++i) padded.push_back(ctx.n + i);

    std::vector<bitset128> ablocks, bblocks;
    for (std::size_t oi = 0; oi < ctx.outer.size(); ++oi) {
        for (std::size_t ii = 0; ii < ctx.inner.size(); ++ii) {
            if (!detail::hashed_blocks(ctx, oi, ii, padded, ablocks)) continue;
            if (!detail::hashed_blocks(ctx, oi, ii, b_elems, bblocks)) continue;
            bool all = true;
            for (int i = 0; i < ctx.s && all; ++i) {
                bool block_ok = false;
                for (std::size_t cc = 0; cc < ctx.ell && !block_ok; ++cc) {
                    auto [f, p] = ctx.col_split((int)cc);
                    block_ok = x_entry(ctx, ablocks[i], f, p) && y_entry(ctx, f, p, bblocks[i]);
                }
                all = block_ok;
            }
            if (all) return true;
        }
    }
    return false;
}

// Exhaustive factorization identity: (L*R)[A,B] = D[A,B] for every pair of
// sets of size at most k_user.
inline verify_result check_factorization(const factorization_context& ctx, std::uint64_t budget = 10'000'000) {
    if (ctx.n > 63) return verify_result::unverifiable;
    long double pairs = 0, count = 0;
    for (int j = 0; j <= ctx.k_user; ++j) count += binom_ld(ctx.n, j);
    pairs = count * count;
    if (pairs > (long double)budget) return verify_result::unverifiable;

    std::vector<std::vector<int>> sets;
    for_each_subset_up_to(ctx.n, ctx.k_user, [&](const std::vector<int>& s) { sets.push_back(s); });
    for (const auto& a : sets) {
        std::uint64_t amask = mask_of(a);
        for (const auto& b : sets) {
            bool want = d_entry(amask, mask_of(b), ctx.k_user);
            if (lr_product(ctx, a, b) != want) return verify_result::fail;
        }
    }
    return verify_result::pass;
}

// C_{n,e} * H == H * hat(C)_e on the restricted column range (block sets of
// size at most s). For a fixed hash pair and row A, each side is supported
// on at most one column tuple; the check compares those supports. Requires
// an unpadded context. block_shift perturbs the block selected for hat(C)
// and exists for mutation tests.
inline verify_result check_hat_commutation(const factorization_context& ctx, int e, int block_shift = 0) {
    if (ctx.d != 0) throw std::invalid_argument("check_hat_commutation: needs an unpadded context (square k)");
    if (ctx.n > 63) return verify_result::unverifiable;
    if (e < 0 || e >= ctx.n) throw std::invalid_argument("check_hat_commutation: element outside [0, n)");

    bool ok = true;
    std::vector<bitset128> blocks_a, blocks_ae;
    for (std::size_t oi = 0; oi < ctx.outer.size() && ok; ++oi) {
        for (std::size_t ii = 0; ii < ctx.inner.size() && ok; ++ii) {
            int v = ctx.outer.functions[oi][e];
            int blk = (ctx.inner.functions[ii][v] + block_shift) % ctx.s;
            for_each_subset_up_to(ctx.n, ctx.k, [&](const std::vector<int>& a) {
                if (!ok) return;
                std::uint64_t amask = mask_of(a);
                // Left side: H[A + e, col] — support is the block tuple of A + e.
                bool lhs_live = false;
                if (!(amask >> e & 1)) {
                    std::vector<int> ae(a);
                    ae.push_back(e);
                    lhs_live = detail::hashed_blocks(ctx, oi, ii, ae, blocks_ae);
                }
                // Right side: needs pi injective on A and pi(e) outside A's
                // block; support adds pi(e) to block blk of A's tuple.
                bool rhs_live = detail::hashed_blocks(ctx, oi, ii, a, blocks_a) && !blocks_a[blk].test(v);
                // Clip to the enumerated range |A_i| <= s.
                if (lhs_live)
                    for (const auto& bl : blocks_ae) lhs_live = lhs_live && bl.count() <= ctx.s;
                if (rhs_live) {
                    blocks_a[blk].set(v);
                    for (const auto& bl : blocks_a) rhs_live = rhs_live && bl.count() <= ctx.s;
                }
                if (lhs_live != rhs_live) {
                    ok = false;
                    return;
                }
                if (lhs_live && !(blocks_ae == blocks_a)) ok = false;
            });
        }
    }
    return ok ? verify_result::pass : verify_result::fail;
}

// a * L as a full length-r vector, via the per-block column-cover lists.
template <semiring S>
std::vector<typename S::value_type> product_with_L(const factorization_context& ctx, const S& sr,
                                                   const dense_table<S>& a) {
    std::vector<typename S::value_type> out(ctx.r, sr.zero());
    std::vector<bitset128> blocks;
    for (const auto& [amask, val] : a) {
        if (val == sr.zero()) continue;
        std::vector<int> elems = elems_of(amask);
        if ((int)elems.size() > ctx.k_user) continue;  // L row is identically 0
        for (int i = 0; i < ctx.d; ++i) elems.push_back(ctx.n + i);
        for (std::size_t oi = 0; oi < ctx.outer.size(); ++oi) {
            for (std::size_t ii = 0; ii < ctx.inner.size(); ++ii) {
                if (!detail::hashed_blocks(ctx, oi, ii, elems, blocks)) continue;
                bool fits = true;
                for (const auto& bl : blocks) fits = fits && bl.count() <= ctx.s;
                if (!fits) continue;
                std::size_t base = (oi * ctx.inner.size() + ii) * ctx.pow_ell[ctx.s];
                // product walk over each block's covering columns
                std::vector<const std::vector<std::uint32_t>*> lists(ctx.s);
                for (int i = 0; i < ctx.s; ++i) lists[i] = &ctx.row_cols[ctx.row_ids.at(blocks[i])];
                std::vector<std::size_t> pos(ctx.s, 0);
                std::vector<std::size_t> offset(ctx.s + 1, base);
                int level = 0;
                while (level >= 0) {
                    if (level == ctx.s) {
                        out[offset[ctx.s]] = sr.add(out[offset[ctx.s]], val);
                        --level;
                        continue;
                    }
                    if (pos[level] < lists[level]->size()) {
                        offset[level + 1] = offset[level] + (*lists[level])[pos[level]] * ctx.stride(level);
                        ++pos[level];
                        ++level;
                    } else {
                        pos[level] = 0;
                        --level;
                    }
                }
            }
        }
    }
    return out;
}

// b * R for every |B| <= k_user.
template <semiring S>
dense_table<S> product_with_R(const factorization_context& ctx, const S& sr,
                              std::span<const typename S::value_type> values) {
    dense_table<S> out;
    for_each_subset_up_to(ctx.n, ctx.k_user, [&](const std::vector<int>& b) {
        out[mask_of(b)] = query_values(ctx, sr, values, b);
    });
    return out;
}

// Definition check: a*D <= b*R entrywise over all |B| <= k, and b <= a*L
// over all r columns.
template <semiring S>
bool represents(const factorization_context& ctx, const S& sr, const representation<S>& b,
                const dense_table<S>& a) {
    dense_table<S> ad = dense_mul_D(sr, a, ctx.n, ctx.k_user);
    dense_table<S> br = product_with_R(ctx, sr, std::span<const typename S::value_type>(b.values));
    for (const auto& [bmask, lhs] : ad)
        if (!sr.leq(lhs, table_at(sr, br, bmask))) return false;
    std::vector<typename S::value_type> al = product_with_L(ctx, sr, a);
    for (std::size_t i = 0; i < ctx.r; ++i)
        if (!sr.leq(b.values[i], al[i])) return false;
    return true;
}

}  // namespace dynrepset::oracle
