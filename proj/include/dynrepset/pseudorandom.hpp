#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "dynrepset/util.hpp"

namespace dynrepset {

// Family of total maps [0,n) -> [0,ell) such that every k-subset of the
// domain is split into near-equal blocks by some member.
struct splitter_family {
    int n = 0, k = 0, ell = 0;
    std::vector<std::vector<std::uint16_t>> functions;

    std::size_t size() const { return functions.size(); }
};

// Family of subsets of [0,u) whose traces on every set X of size <= s
// realize the full power set of X.
struct universal_family {
    int u = 0, s = 0;
    std::vector<bitset128> sets;

    std::size_t size() const { return sets.size(); }
};

struct family_build_options {
    std::uint64_t seed = 0x5EED;
    // Largest C(n,k) for which coverage is tracked set-by-set; beyond it the
    // splitter builder falls back to the multiplicative coverage estimator.
    std::uint64_t exact_budget = 10'000'000;
    std::uint64_t max_candidates = 4'000'000;
};

// Literal prefix-balance test: h splits S when, for some j, the first j
// blocks hold ceil(k/ell) elements of S and the rest hold floor(k/ell).
// The block ordering matters here; see balanced_split for the
// order-insensitive variant the family property uses.
inline bool splits(std::span<const std::uint16_t> h, int ell, std::span<const int> s_elems) {
    int k = (int)s_elems.size();
    std::vector<int> cnt(ell, 0);
    for (int e : s_elems) ++cnt[h[e]];
    int q = k / ell, r = k % ell;
    for (int i = 0; i < ell; ++i) {
        int want = q + (i < r ? 1 : 0);
        if (cnt[i] != want) return false;
    }
    return true;
}

// Order-insensitive balance: the multiset of block counts is
// {ceil(k/ell) x (k mod ell), floor(k/ell) x rest}. With ell >= k this is
// injectivity on S; with ell | k it is an exact equipartition.
inline bool balanced_split(std::span<const std::uint16_t> h, int ell, std::span<const int> s_elems) {
    int k = (int)s_elems.size();
    int q = k / ell, r = k % ell;
    std::vector<int> cnt(ell, 0);
    for (int e : s_elems) ++cnt[h[e]];
    int ceils = 0;
    for (int i = 0; i < ell; ++i) {
        if (cnt[i] == q + 1) ++ceils;
        else if (cnt[i] != q) return false;
    }
    return ceils == r;
}

namespace detail {

// Number of k-subsets of [0,n) that h balance-splits, from its block sizes:
// sum over choices of (k mod ell) ceil-blocks of the product of binomials.
inline long double count_balanced_sets(const std::vector<int>& block_sizes, int k) {
    int ell = (int)block_sizes.size();
    int q = k / ell, r = k % ell;
    std::vector<long double> f(r + 1, 0.0L);
    f[0] = 1.0L;
    for (int b = 0; b < ell; ++b) {
        long double low = binom_ld(block_sizes[b], q);
        long double high = binom_ld(block_sizes[b], q + 1);
        for (int j = r; j >= 0; --j) {
            long double v = f[j] * low;
            if (j > 0) v += f[j - 1] * high;
            f[j] = v;
        }
    }
    return f[r];
}

inline std::vector<int> block_sizes_of(const std::vector<std::uint16_t>& h, int ell) {
    std::vector<int> c(ell, 0);
    for (auto b : h) ++c[b];
    return c;
}

// Deterministic candidate stream: two structured maps first (x mod ell and
// the contiguous blocked map), then seeded pseudo-random maps.
struct candidate_stream {
    int n, ell;
    splitmix64 rng;
    std::uint64_t emitted = 0;
    candidate_stream(int n, int ell, std::uint64_t seed) : n(n), ell(ell), rng(seed) {}

    std::vector<std::uint16_t> next() {
        std::vector<std::uint16_t> h(n);
        if (emitted == 0) {
            for (int x = 0; x < n; ++x) h[x] = (std::uint16_t)(x % ell);
        } else if (emitted == 1) {
            for (int x = 0; x < n; ++x) h[x] = (std::uint16_t)(((std::uint64_t)x * ell) / n);
        } else {
            for (int x = 0; x < n; ++x) h[x] = (std::uint16_t)rng.below(ell);
        }
        ++emitted;
        return h;
    }
};

// Greedy cover: keep any candidate that balance-splits a still-uncovered
// k-set. When C(n,k) exceeds the budget, coverage is tracked by a
// multiplicative estimator fed with each kept candidate's exact split
// fraction; candidates below half the ideal fraction are skipped and the
// loop runs the bound well past < 1 for margin.
inline splitter_family build_splitter(int n, int k, int ell, const family_build_options& opt) {
    if (k < 1 || k > n || ell < 1) throw std::invalid_argument("build_splitter: need 1 <= k <= n, ell >= 1");
    splitter_family fam;
    fam.n = n;
    fam.k = k;
    fam.ell = ell;

    candidate_stream stream(n, ell, opt.seed);
    long double total = binom_ld(n, k);

    if (total <= (long double)opt.exact_budget) {
        // Exact mode: flat store of uncovered k-sets, swap-erased as covered.
        std::vector<std::uint16_t> uncovered;  // k entries per set
        uncovered.reserve((std::size_t)total * k);
        for_each_subset_of_size(n, k, [&](const std::vector<int>& s) {
            for (int e : s) uncovered.push_back((std::uint16_t)e);
        });
        std::vector<int> elems(k), cnt(ell);
        std::uint64_t tried = 0;
        while (!uncovered.empty()) {
            if (++tried > opt.max_candidates)
                throw std::runtime_error("build_splitter: candidate budget exhausted (internal error)");
            auto h = stream.next();
            std::size_t nsets = uncovered.size() / k;
            bool kept = false;
            for (std::size_t i = 0; i < nsets;) {
                for (int j = 0; j < k; ++j) elems[j] = uncovered[i * k + j];
                if (balanced_split(h, ell, elems)) {
                    kept = true;
                    --nsets;
                    for (int j = 0; j < k; ++j) uncovered[i * k + j] = uncovered[nsets * k + j];
                    uncovered.resize(nsets * k);
                } else {
                    ++i;
                }
            }
            if (kept) fam.functions.push_back(std::move(h));
        }
    } else {
        // Estimator mode.
        std::vector<int> ideal(ell, n / ell);
        for (int i = 0; i < n % ell; ++i) ++ideal[i];
        long double q_ref = count_balanced_sets(ideal, k) / total;
        if (q_ref <= 0.0L) throw std::runtime_error("build_splitter: degenerate split fraction");
        long double bound = total;
        std::uint64_t tried = 0;
        while (bound >= 0.125L) {
            if (++tried > opt.max_candidates)
                throw std::runtime_error("build_splitter: candidate budget exhausted (internal error)");
            auto h = stream.next();
            long double q = count_balanced_sets(block_sizes_of(h, ell), k) / total;
            if (q < q_ref / 2) continue;
            bound *= (1.0L - q);
            fam.functions.push_back(std::move(h));
        }
    }
    return fam;
}

}  // namespace detail

// (n,k,k^2)-splitter: with ell = k^2 >= k, splitting a k-set means mapping
// it injectively.
inline splitter_family build_outer_splitter(int n, int k, const family_build_options& opt = {}) {
    return detail::build_splitter(n, k, k * k, opt);
}

// (u,k,s)-splitter with k = s*s: every k-subset of [0,u) is split into s
// blocks of exactly s elements by some member.
inline splitter_family build_inner_splitter(int u, int k, int s, const family_build_options& opt = {}) {
    if (k != s * s) throw std::invalid_argument("build_inner_splitter: k must equal s*s");
    if (u < k) throw std::invalid_argument("build_inner_splitter: need u >= k");
    return detail::build_splitter(u, k, s, opt);
}

inline verify_result verify_splitter(const splitter_family& f, std::uint64_t budget = 10'000'000) {
    if (binom_ld(f.n, f.k) > (long double)budget) return verify_result::unverifiable;
    bool ok = true;
    for_each_subset_of_size(f.n, f.k, [&](const std::vector<int>& s) {
        if (!ok) return;
        for (const auto& h : f.functions)
            if (balanced_split(h, f.ell, s)) return;
        ok = false;
    });
    return ok ? verify_result::pass : verify_result::fail;
}

// Greedy set cover over demand pairs (X, Y subset of X), |X| <= s: a set F
// covers (X, Y) iff X & F == Y. Candidates come from a deterministic pool
// (structured sets first, then the seeded stream); each round keeps the
// candidate covering the most open demands.
inline universal_family build_universal_family(int u, int s, const family_build_options& opt = {}) {
    if (s < 1 || s > u) throw std::invalid_argument("build_universal_family: need 1 <= s <= u");
    if (u > bitset128::capacity) throw resource_error("build_universal_family: u exceeds 128");
    if (s > 6) throw resource_error("build_universal_family: s exceeds the trace-mask width");
    long double demand_count = 0;
    for (int j = 0; j <= s; ++j) demand_count += binom_ld(u, j) * (long double)(1ULL << j);
    if (demand_count > (long double)opt.exact_budget)
        throw resource_error("build_universal_family: demand enumeration exceeds budget");

    universal_family fam;
    fam.u = u;
    fam.s = s;

    // One open-trace mask per X, bit y set while the y-th subset of X is
    // still missing from the traces.
    std::vector<bitset128> xs;
    std::vector<std::uint64_t> open;
    for_each_subset_up_to(u, s, [&](const std::vector<int>& x) {
        bitset128 b;
        for (int e : x) b.set(e);
        xs.push_back(b);
        open.push_back(x.size() == 6 ? ~0ULL : ((1ULL << (1ULL << x.size())) - 1));
    });

    // Rank of (X & F) among subsets of X, by X's element order.
    auto trace_rank = [](bitset128 x, bitset128 f) {
        std::uint64_t r = 0, bit = 1;
        for (int e = 0; e < bitset128::capacity; ++e) {
            if (!x.test(e)) continue;
            if (f.test(e)) r |= bit;
            bit <<= 1;
        }
        return r;
    };

    std::vector<bitset128> pool;
    {
        bitset128 full;
        for (int e = 0; e < u; ++e) full.set(e);
        pool.push_back(bitset128{});
        pool.push_back(full);
        for (int b = 0; (1 << b) < u; ++b) {
            bitset128 slice;
            for (int e = 0; e < u; ++e)
                if ((e >> b) & 1) slice.set(e);
            pool.push_back(slice);
            pool.push_back(slice ^ full);
        }
        splitmix64 rng(opt.seed ^ 0x0451);
        std::size_t randoms = 64 + 8 * (std::size_t)u;
        for (std::size_t i = 0; i < randoms; ++i) {
            bitset128 r;
            for (int e = 0; e < u; ++e)
                if (rng.next() & 1) r.set(e);
            pool.push_back(r);
        }
    }

    std::size_t remaining = 0;
    for (auto m : open) remaining += (std::size_t)__builtin_popcountll(m);
    std::uint64_t rounds = 0;
    while (remaining > 0) {
        if (++rounds > opt.max_candidates)
            throw std::runtime_error("build_universal_family: cover did not close (internal error)");
        std::size_t best = 0, best_gain = 0;
        for (std::size_t c = 0; c < pool.size(); ++c) {
            std::size_t gain = 0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (open[i] >> trace_rank(xs[i], pool[c]) & 1) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        if (best_gain == 0) {
            // Pool exhausted; extend with more stream sets.
            splitmix64 rng(opt.seed ^ rounds);
            for (int i = 0; i < 64; ++i) {
                bitset128 r;
                for (int e = 0; e < u; ++e)
                    if (rng.next() & 1) r.set(e);
                pool.push_back(r);
            }
            continue;
        }
        bitset128 fset = pool[best];
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::uint64_t bit = 1ULL << trace_rank(xs[i], fset);
            if (open[i] & bit) {
                open[i] &= ~bit;
                --remaining;
            }
        }
        fam.sets.push_back(fset);
    }
    return fam;
}

inline verify_result verify_universal(const universal_family& f, std::uint64_t budget = 10'000'000) {
    if (f.s > 6) return verify_result::unverifiable;
    long double demand_count = 0;
    for (int j = 0; j <= f.s; ++j) demand_count += binom_ld(f.u, j) * (long double)(1ULL << j);
    if (demand_count > (long double)budget) return verify_result::unverifiable;
    bool ok = true;
    for_each_subset_up_to(f.u, f.s, [&](const std::vector<int>& x) {
        if (!ok) return;
        bitset128 xb;
        for (int e : x) xb.set(e);
        std::vector<bool> seen(1ULL << x.size(), false);
        for (bitset128 sset : f.sets) {
            bitset128 t = xb & sset;
            std::uint64_t r = 0, bit = 1;
            for (int e : x) {
                if (t.test(e)) r |= bit;
                bit <<= 1;
            }
            seen[r] = true;
        }
        for (bool b : seen)
            if (!b) {
                ok = false;
                return;
            }
    });
    return ok ? verify_result::pass : verify_result::fail;
}

// --- cache file format ------------------------------------------------
// splitter <n> <k> <ell> <count>   followed by one line per function with
//                                  n 0-based block indices
// universal <u> <s> <count>        followed by one 32-digit hex bitset per
//                                  line (bit e of the value = element e)

inline void write_family(std::ostream& os, const splitter_family& f) {
    os << "splitter " << f.n << ' ' << f.k << ' ' << f.ell << ' ' << f.functions.size() << '\n';
    for (const auto& h : f.functions) {
        for (int x = 0; x < f.n; ++x) {
            if (x) os << ' ';
            os << h[x];
        }
        os << '\n';
    }
}

inline void write_family(std::ostream& os, const universal_family& f) {
    os << "universal " << f.u << ' ' << f.s << ' ' << f.sets.size() << '\n';
    for (bitset128 s : f.sets) {
        std::ostringstream hex;
        hex << std::hex << std::setfill('0') << std::setw(16) << s.hi() << std::setw(16) << s.lo();
        os << hex.str() << '\n';
    }
}

inline splitter_family read_splitter(std::istream& is) {
    splitter_family f;
    std::string tag;
    std::size_t count = 0;
    if (!(is >> tag >> f.n >> f.k >> f.ell >> count) || tag != "splitter")
        throw parse_error("expected 'splitter <n> <k> <ell> <count>' header", 1);
    f.functions.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        f.functions[i].resize(f.n);
        for (int x = 0; x < f.n; ++x) {
            int v;
            if (!(is >> v) || v < 0 || v >= f.ell)
                throw parse_error("bad block index in splitter function", (int)i + 2);
            f.functions[i][x] = (std::uint16_t)v;
        }
    }
    return f;
}

inline universal_family read_universal(std::istream& is) {
    universal_family f;
    std::string tag;
    std::size_t count = 0;
    if (!(is >> tag >> f.u >> f.s >> count) || tag != "universal")
        throw parse_error("expected 'universal <u> <s> <count>' header", 1);
    f.sets.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string hex;
        if (!(is >> hex) || hex.size() != 32) throw parse_error("expected 32 hex digits", (int)i + 2);
        std::uint64_t hi = std::stoull(hex.substr(0, 16), nullptr, 16);
        std::uint64_t lo = std::stoull(hex.substr(16), nullptr, 16);
        f.sets[i] = bitset128(((unsigned __int128)hi << 64) | lo);
    }
    return f;
}

}  // namespace dynrepset
