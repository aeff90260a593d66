#pragma once

#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynrepset/oracle.hpp"
#include "dynrepset/repset.hpp"

namespace dynrepset {

// Directed graph with non-negative integer edge weights. Vertices are
// 0-based internally; parallel edges and self-loops are allowed (a simple
// path never reuses a vertex, and parallel edges merge to their minimum).
struct weighted_digraph {
    struct edge {
        int from, to;
        std::uint64_t w;
    };
    int n = 0;
    std::vector<edge> edges;
};

struct kpath_instance {
    weighted_digraph graph;
    int k = 0;
};

inline constexpr std::uint64_t kpath_infinity = std::numeric_limits<std::uint64_t>::max();

// Line-oriented text format: '#' comments, a header `p kpath <n> <m> <k>`,
// then m lines `e <i> <j> <w>` with 1-based endpoints.
inline kpath_instance parse_kpath(std::istream& is) {
    kpath_instance inst;
    std::string line;
    int line_no = 0, m = -1, seen = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "p") {
            std::string kind;
            if (have_header) throw parse_error("duplicate header", line_no);
            if (!(ls >> kind >> inst.graph.n >> m >> inst.k) || kind != "kpath")
                throw parse_error("expected 'p kpath <n> <m> <k>'", line_no);
            if (inst.graph.n < 0 || m < 0 || inst.k < 1) throw parse_error("bad header values", line_no);
            have_header = true;
        } else if (tag == "e") {
            if (!have_header) throw parse_error("edge before header", line_no);
            long long i, j;
            std::string wtok;
            if (!(ls >> i >> j >> wtok)) throw parse_error("expected 'e <i> <j> <w>'", line_no);
            if (i < 1 || i > inst.graph.n || j < 1 || j > inst.graph.n)
                throw parse_error("vertex out of range", line_no);
            if (wtok.empty() || wtok[0] == '-') throw parse_error("negative weight", line_no);
            std::uint64_t w = 0;
            try {
                std::size_t used = 0;
                w = std::stoull(wtok, &used);
                if (used != wtok.size()) throw std::invalid_argument("");
            } catch (...) {
                throw parse_error("bad weight '" + wtok + "'", line_no);
            }
            inst.graph.edges.push_back({(int)i - 1, (int)j - 1, w});
            ++seen;
        } else {
            throw parse_error("unknown record '" + tag + "'", line_no);
        }
    }
    if (!have_header) throw parse_error("missing 'p kpath' header", line_no ? line_no : 1);
    if (seen != m) throw parse_error("edge count does not match header", line_no ? line_no : 1);
    return inst;
}

struct solve_options {
    context_options context;
    int threads = 1;
    // Reuse a prebuilt context (its n and k must match the instance).
    std::shared_ptr<const factorization_context> reuse_context;
    // Override the automatic min-plus cap (k * max edge weight).
    std::uint64_t cap_override = 0;
};

namespace detail {

// Minimum-weight in-adjacency: parallel edges merged by semiring add.
template <semiring S, class EdgeValue>
std::vector<std::vector<std::pair<int, typename S::value_type>>> in_adjacency(const S& sr,
                                                                              const weighted_digraph& g,
                                                                              EdgeValue&& ev) {
    std::vector<std::vector<std::pair<int, typename S::value_type>>> in(g.n);
    for (const auto& e : g.edges) {
        auto& lst = in[e.to];
        bool merged = false;
        for (auto& [src, val] : lst)
            if (src == e.from) {
                val = sr.add(val, ev(e.w));
                merged = true;
                break;
            }
        if (!merged) lst.emplace_back(e.from, ev(e.w));
    }
    return in;
}

// Layered DP over representation vectors:
//   b_{t,1} = convolve(b_init, t)
//   b_{t,p} = sum over in-edges (u,t) of w_{u,t} * convolve(b_{u,p-1}, t)
// Only two layers are live at a time; the answer is the empty-set query of
// the summed top layer.
template <semiring S, class EdgeValue>
typename S::value_type solve_kpath_core(const weighted_digraph& g, int k, S sr, EdgeValue&& ev,
                                        const solve_options& opt) {
    auto ctx = opt.reuse_context;
    if (!ctx) ctx = build_shared_context(g.n, k, opt.context);
    if (ctx->n != g.n || ctx->k_user != k)
        throw std::invalid_argument("solve_kpath: reused context does not match (n, k)");
    auto in = in_adjacency(sr, g, ev);

    using rep = representation<S>;
    representation<S> binit = init(ctx, sr);
    std::vector<std::unique_ptr<rep>> layer(g.n);
    std::vector<char> layer_zero(g.n, 0);
    for (int t = 0; t < g.n; ++t) {
        layer[t] = std::make_unique<rep>(convolve(binit, t, opt.threads));
        layer_zero[t] = layer[t]->all_zero();
    }

    for (int p = 2; p <= k; ++p) {
        std::vector<std::unique_ptr<rep>> next(g.n);
        std::vector<char> next_zero(g.n, 1);
        for (int t = 0; t < g.n; ++t) {
            std::unique_ptr<rep> acc;
            for (const auto& [u, w] : in[t]) {
                if (!layer[u] || layer_zero[u] || w == sr.zero()) continue;
                rep term = scale_left(w, convolve(*layer[u], t, opt.threads));
                if (!acc)
                    acc = std::make_unique<rep>(std::move(term));
                else
                    *acc = add_reps(*acc, term);
            }
            if (acc) next_zero[t] = acc->all_zero();
            next[t] = std::move(acc);
        }
        layer = std::move(next);
        layer_zero = std::move(next_zero);
    }

    std::unique_ptr<rep> total;
    for (int t = 0; t < g.n; ++t) {
        if (!layer[t]) continue;
        if (!total)
            total = std::make_unique<rep>(*layer[t]);
        else
            *total = add_reps(*total, *layer[t]);
    }
    if (!total) return sr.zero();
    return query(*total, std::span<const int>{});
}

}  // namespace detail

// Minimum total edge weight of a simple path on k vertices, or
// kpath_infinity. Runs over the capped min-plus semiring with cap
// M = k * max edge weight, which no simple k-path can exceed.
inline std::uint64_t solve_kpath(const weighted_digraph& g, int k, const solve_options& opt = {}) {
    if (k < 1) throw std::invalid_argument("solve_kpath: k must be positive");
    if (k > g.n) return kpath_infinity;  // no k distinct vertices exist
    if (k == 1) return 0;                // single vertex, empty weight product
    std::uint64_t maxw = 0;
    for (const auto& e : g.edges) maxw = std::max(maxw, e.w);
    if (maxw != 0 && maxw > (std::numeric_limits<std::uint64_t>::max() / 2 - 1) / (std::uint64_t)k)
        throw resource_error("solve_kpath: k * max weight overflows the value type");
    std::uint64_t cap = opt.cap_override ? opt.cap_override : std::max<std::uint64_t>(1, (std::uint64_t)k * maxw);
    capped_minplus_semiring<std::uint64_t> sr(cap);
    auto ans = detail::solve_kpath_core(
        g, k, sr, [&](std::uint64_t w) { return sr.from_integer(w); }, opt);
    return ans == sr.zero() ? kpath_infinity : ans;
}

// Decision variant: the identical recurrence over the Boolean semiring.
inline bool solve_kpath_decision(const weighted_digraph& g, int k, const solve_options& opt = {}) {
    if (k < 1) throw std::invalid_argument("solve_kpath_decision: k must be positive");
    if (k > g.n) return false;
    if (k == 1) return g.n >= 1;
    boolean_semiring sr;
    auto ans = detail::solve_kpath_core(
        g, k, sr, [&](std::uint64_t) { return sr.one(); }, opt);
    return ans != sr.zero();
}

// DFS enumeration of every simple k-vertex path; the independent oracle
// for the solver. Work is counted against the budget and overruns refuse
// loudly rather than stall.
inline std::uint64_t brute_force_kpath(const weighted_digraph& g, int k, std::uint64_t budget = 200'000'000) {
    if (k < 1) throw std::invalid_argument("brute_force_kpath: k must be positive");
    if (k > g.n) return kpath_infinity;
    if (k == 1) return 0;
    if (g.n > 63) throw resource_error("brute_force_kpath: n too large");

    std::vector<std::vector<std::pair<int, std::uint64_t>>> out(g.n);
    for (const auto& e : g.edges) out[e.from].emplace_back(e.to, e.w);

    std::uint64_t best = kpath_infinity, steps = 0;
    struct frame {
        int v, depth;
        std::uint64_t mask, weight;
    };
    std::vector<frame> stack;
    for (int v = 0; v < g.n; ++v) stack.push_back({v, 1, 1ULL << v, 0});
    while (!stack.empty()) {
        if (++steps > budget) throw resource_error("brute_force_kpath: enumeration budget exceeded");
        frame f = stack.back();
        stack.pop_back();
        if (f.depth == k) {
            best = std::min(best, f.weight);
            continue;
        }
        for (const auto& [to, w] : out[f.v])
            if (!(f.mask >> to & 1)) stack.push_back({to, f.depth + 1, f.mask | (1ULL << to), f.weight + w});
    }
    return best;
}

}  // namespace dynrepset
