#pragma once

#include <string>
#include <vector>

#include "dynrepset/circuit.hpp"
#include "dynrepset/kpath.hpp"
#include "dynrepset/oracle.hpp"

// Deterministic instance generators and the mirrored-sequence runner used
// by the self-test command and the verification suites.

namespace dynrepset::testgen {

inline weighted_digraph random_digraph(splitmix64& rng, int max_n, std::uint64_t max_w, int min_n = 2) {
    weighted_digraph g;
    g.n = min_n + (int)rng.below(max_n - min_n + 1);
    std::uint64_t max_m = (std::uint64_t)g.n * (g.n - 1);
    std::uint64_t m = rng.below(max_m + 1);
    for (std::uint64_t i = 0; i < m; ++i) {
        int a = (int)rng.below(g.n), b = (int)rng.below(g.n);
        g.edges.push_back({a, b, rng.below(max_w + 1)});
    }
    return g;
}

// Random d-skewed circuit; rejection-samples until the skewness validation
// accepts (checked over the Boolean semiring, whose monomial supports are
// maximal, so acceptance is semiring-independent).
inline skewed_circuit random_skewed_circuit(splitmix64& rng, int max_gates, int max_vars, int max_d) {
    while (true) {
        skewed_circuit c;
        c.n_vars = 1 + (int)rng.below(max_vars);
        c.d = 1 + (int)rng.below(max_d);
        int body = 1 + (int)rng.below(max_gates - 1);
        for (int g = 0; g < body; ++g) {
            gate gt;
            int roll = g == 0 ? (int)rng.below(2) : (int)rng.below(4);
            switch (roll) {
                case 0:
                    gt.kind = gate_kind::variable;
                    gt.var = (int)rng.below(c.n_vars);
                    break;
                case 1:
                    gt.kind = gate_kind::constant;
                    if (rng.below(4) == 0) gt.const_inf = true;
                    else gt.const_value = rng.below(9);
                    break;
                case 2: {
                    gt.kind = gate_kind::add;
                    int fanin = 1 + (int)rng.below(3);
                    for (int i = 0; i < fanin; ++i) gt.args.push_back((int)rng.below(g));
                    break;
                }
                default:
                    gt.kind = gate_kind::mul;
                    gt.args = {(int)rng.below(g), (int)rng.below(g)};
                    break;
            }
            c.gates.push_back(std::move(gt));
        }
        // Funnel every sink into one output so the sink is unique.
        std::vector<char> used(c.gates.size(), 0);
        for (const gate& gt : c.gates)
            for (int a : gt.args) used[a] = 1;
        std::vector<int> sinks;
        for (int g = 0; g < (int)c.gates.size(); ++g)
            if (!used[g]) sinks.push_back(g);
        if (sinks.size() > 1) {
            gate top;
            top.kind = gate_kind::add;
            top.args = sinks;
            c.gates.push_back(std::move(top));
        }
        try {
            validate_circuit(c);
            compute_monomial_lists(c, boolean_semiring{});
            return c;
        } catch (const skewness_error&) {
            continue;  // resample
        }
    }
}

// One step of a mirrored random walk: the representation vector and the
// dense oracle table receive the same operation, then both Definition-3.3
// inequalities and query exactness are re-checked.
template <semiring S>
struct mirrored_state {
    representation<S> b;
    oracle::dense_table<S> a;
};

template <semiring S>
bool check_mirror(const factorization_context& ctx, const S& sr, const mirrored_state<S>& st) {
    if (!oracle::represents(ctx, sr, st.b, st.a)) return false;
    auto ad = oracle::dense_mul_D(sr, st.a, ctx.n, ctx.k_user);
    auto br = oracle::product_with_R(ctx, sr, std::span<const typename S::value_type>(st.b.values));
    for (const auto& [mask, val] : ad)
        if (oracle::table_at(sr, br, mask) != val) return false;
    return true;
}

// Runs one random sequence of convolve/add/scale operations of the given
// length, checking after every step; returns false on the first violation.
template <semiring S>
bool run_mirrored_sequence(std::shared_ptr<const factorization_context> ctx, S sr, splitmix64& rng, int length) {
    std::vector<mirrored_state<S>> pool;
    oracle::dense_table<S> a0;
    a0[0] = sr.one();
    pool.push_back({init(ctx, sr), std::move(a0)});
    if (!check_mirror(*ctx, sr, pool.back())) return false;

    auto random_scalar = [&]() -> typename S::value_type {
        if constexpr (std::is_same_v<S, boolean_semiring>) {
            return rng.below(4) == 0 ? sr.zero() : sr.one();
        } else {
            if (rng.below(8) == 0) return sr.zero();
            return sr.from_integer(rng.below(5));
        }
    };

    for (int step = 0; step < length; ++step) {
        int op = (int)rng.below(4);
        const auto& src = pool[rng.below(pool.size())];
        mirrored_state<S> next{src.b, src.a};
        switch (op) {
            case 0: {  // convolve
                int e = (int)rng.below(ctx->n);
                next.b = convolve(src.b, e);
                next.a = oracle::dense_mul_C(sr, src.a, e);
                break;
            }
            case 1: {  // add two pool entries
                const auto& other = pool[rng.below(pool.size())];
                next.b = add_reps(src.b, other.b);
                next.a = src.a;
                for (const auto& [mask, val] : other.a) {
                    auto it = next.a.find(mask);
                    next.a[mask] = it == next.a.end() ? val : sr.add(it->second, val);
                }
                break;
            }
            case 2: {  // scale left
                auto lam = random_scalar();
                next.b = scale_left(lam, src.b);
                next.a = src.a;
                for (auto& [mask, val] : next.a) val = sr.mul(lam, val);
                break;
            }
            default: {  // scale right
                auto lam = random_scalar();
                next.b = scale_right(src.b, lam);
                next.a = src.a;
                for (auto& [mask, val] : next.a) val = sr.mul(val, lam);
                break;
            }
        }
        if (!check_mirror(*ctx, sr, next)) return false;
        pool.push_back(std::move(next));
    }
    return true;
}

}  // namespace dynrepset::testgen
