#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynrepset/kpath.hpp"
#include "dynrepset/repset.hpp"

namespace dynrepset {

// A multiplication gate whose operands both exceed d monomials.
struct skewness_error : std::runtime_error {
    int gate_id;  // 1-based, as in the input file
    explicit skewness_error(int id)
        : std::runtime_error("gate " + std::to_string(id) + ": neither multiplication operand has at most d monomials"),
          gate_id(id) {}
};

enum class gate_kind { variable, constant, add, mul };

struct gate {
    gate_kind kind = gate_kind::constant;
    int var = -1;                   // variable gates: 0-based index
    bool const_inf = false;         // constant gates: the additive identity
    std::uint64_t const_value = 0;  // constant gates: non-negative integer
    std::vector<int> args;          // add: 1+ operands; mul: exactly 2
};

// DAG of gates computing a polynomial in commuting indeterminates; every
// multiplication has at least one operand with at most d monomials (in the
// multilinear quotient all evaluators here work in).
struct skewed_circuit {
    int n_vars = 0;
    int d = 0;
    std::vector<gate> gates;
    int output = -1;
    std::vector<int> topo;  // filled by validate()
};

struct circuit_instance {
    skewed_circuit circuit;
    int k = 0;
};

// Checks gate references, acyclicity and sink uniqueness; fills topo.
inline void validate_circuit(skewed_circuit& c) {
    int n = (int)c.gates.size();
    if (n == 0) throw parse_error("circuit has no gates", 1);
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    for (int g = 0; g < n; ++g) {
        const gate& gt = c.gates[g];
        if (gt.kind == gate_kind::mul && gt.args.size() != 2)
            throw parse_error("multiplication gate " + std::to_string(g + 1) + " must have exactly 2 operands", 1);
        if (gt.kind == gate_kind::add && gt.args.empty())
            throw parse_error("addition gate " + std::to_string(g + 1) + " has no operands", 1);
        if (gt.kind == gate_kind::variable && (gt.var < 0 || gt.var >= c.n_vars))
            throw parse_error("variable index out of range at gate " + std::to_string(g + 1), 1);
        for (int a : gt.args) {
            if (a < 0 || a >= n) throw parse_error("unknown gate reference in gate " + std::to_string(g + 1), 1);
            ++indeg[g];
            ++outdeg[a];
        }
    }
    // Kahn topological order over operand edges.
    std::vector<int> pending = indeg;
    std::queue<int> ready;
    for (int g = 0; g < n; ++g)
        if (pending[g] == 0) ready.push(g);
    std::vector<std::vector<int>> consumers(n);
    for (int g = 0; g < n; ++g)
        for (int a : c.gates[g].args) consumers[a].push_back(g);
    c.topo.clear();
    while (!ready.empty()) {
        int g = ready.front();
        ready.pop();
        c.topo.push_back(g);
        for (int s : consumers[g])
            if (--pending[s] == 0) ready.push(s);
    }
    if ((int)c.topo.size() != n) throw parse_error("circuit contains a cycle", 1);
    int sink = -1;
    for (int g = 0; g < n; ++g)
        if (outdeg[g] == 0) {
            if (sink >= 0) throw parse_error("multiple sinks (gates " + std::to_string(sink + 1) + " and " +
                                                 std::to_string(g + 1) + ")",
                                             1);
            sink = g;
        }
    if (c.output >= 0 && c.output != sink)
        throw parse_error("declared output is not the unique sink", 1);
    c.output = sink;
}

// Text format: '#' comments; header `p circuit <ngates> <nvars> <d> <k>`;
// one line per gate `g <id> var <i>` | `g <id> const <value|INF>` |
// `g <id> add <id...>` | `g <id> mul <l> <r>`; optional `output <id>`.
// Ids and variable indices are 1-based.
inline circuit_instance parse_circuit(std::istream& is) {
    circuit_instance inst;
    std::string line;
    int line_no = 0, ngates = -1;
    bool have_header = false;
    std::vector<bool> defined;
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
            if (!(ls >> kind >> ngates >> inst.circuit.n_vars >> inst.circuit.d >> inst.k) || kind != "circuit")
                throw parse_error("expected 'p circuit <ngates> <nvars> <d> <k>'", line_no);
            if (ngates < 1 || inst.circuit.n_vars < 0 || inst.circuit.d < 1 || inst.k < 0)
                throw parse_error("bad header values", line_no);
            if (inst.circuit.n_vars > 64) throw parse_error("at most 64 variables supported", line_no);
            inst.circuit.gates.resize(ngates);
            defined.assign(ngates, false);
            have_header = true;
        } else if (tag == "g") {
            if (!have_header) throw parse_error("gate before header", line_no);
            int id;
            std::string kind;
            if (!(ls >> id >> kind)) throw parse_error("expected 'g <id> <kind> ...'", line_no);
            if (id < 1 || id > ngates) throw parse_error("gate id out of range", line_no);
            if (defined[id - 1]) throw parse_error("gate " + std::to_string(id) + " defined twice", line_no);
            defined[id - 1] = true;
            gate& gt = inst.circuit.gates[id - 1];
            if (kind == "var") {
                int v;
                if (!(ls >> v)) throw parse_error("expected variable index", line_no);
                gt.kind = gate_kind::variable;
                gt.var = v - 1;
            } else if (kind == "const") {
                std::string tok;
                if (!(ls >> tok)) throw parse_error("expected constant value", line_no);
                gt.kind = gate_kind::constant;
                if (tok == "INF") {
                    gt.const_inf = true;
                } else {
                    try {
                        std::size_t used = 0;
                        gt.const_value = std::stoull(tok, &used);
                        if (used != tok.size()) throw std::invalid_argument("");
                    } catch (...) {
                        throw parse_error("bad constant '" + tok + "'", line_no);
                    }
                }
            } else if (kind == "add" || kind == "mul") {
                gt.kind = kind == "add" ? gate_kind::add : gate_kind::mul;
                int a;
                while (ls >> a) gt.args.push_back(a - 1);
                if (gt.kind == gate_kind::mul && gt.args.size() != 2)
                    throw parse_error("mul gate must list exactly 2 operands", line_no);
                if (gt.args.empty()) throw parse_error("gate lists no operands", line_no);
            } else {
                throw parse_error("unknown gate kind '" + kind + "'", line_no);
            }
        } else if (tag == "output") {
            int id;
            if (!have_header || !(ls >> id) || id < 1 || id > ngates)
                throw parse_error("bad output declaration", line_no);
            inst.circuit.output = id - 1;
        } else {
            throw parse_error("unknown record '" + tag + "'", line_no);
        }
    }
    if (!have_header) throw parse_error("missing 'p circuit' header", line_no ? line_no : 1);
    for (int g = 0; g < ngates; ++g)
        if (!defined[g]) throw parse_error("gate " + std::to_string(g + 1) + " never defined", line_no);
    validate_circuit(inst.circuit);
    return inst;
}

// Constants in files are semiring-agnostic: INF is the additive identity;
// a finite integer embeds as itself in min-plus and as .true. in Boolean.
inline boolean_semiring::value_type embed_constant(const boolean_semiring& sr, const gate& g) {
    return g.const_inf ? sr.zero() : sr.one();
}
template <class V>
V embed_constant(const capped_minplus_semiring<V>& sr, const gate& g) {
    return g.const_inf ? sr.zero() : sr.from_integer(g.const_value);
}

template <semiring S>
using monomial_list = std::vector<std::pair<std::uint64_t, typename S::value_type>>;

// Per-gate explicit monomial lists, bottom-up: a gate keeps its list while
// it has at most d monomials, and null afterwards. Everything lives in the
// multilinear quotient: a product that repeats a variable is dropped, the
// same convention the representation-vector evaluator realizes through
// element convolution. Throws skewness_error if a multiplication has two
// null operands.
template <semiring S>
std::vector<std::optional<monomial_list<S>>> compute_monomial_lists(const skewed_circuit& c, const S& sr) {
    std::vector<std::optional<monomial_list<S>>> q(c.gates.size());
    auto canonical = [&](monomial_list<S> list) -> std::optional<monomial_list<S>> {
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        monomial_list<S> merged;
        for (const auto& [mask, coeff] : list) {
            if (coeff == sr.zero()) continue;
            if (!merged.empty() && merged.back().first == mask)
                merged.back().second = sr.add(merged.back().second, coeff);
            else
                merged.emplace_back(mask, coeff);
        }
        if ((int)merged.size() > c.d) return std::nullopt;
        return merged;
    };
    for (int g : c.topo) {
        const gate& gt = c.gates[g];
        switch (gt.kind) {
            case gate_kind::variable:
                q[g] = monomial_list<S>{{1ULL << gt.var, sr.one()}};
                break;
            case gate_kind::constant: {
                auto v = embed_constant(sr, gt);
                q[g] = v == sr.zero() ? monomial_list<S>{} : monomial_list<S>{{0, v}};
                break;
            }
            case gate_kind::add: {
                monomial_list<S> acc;
                bool any_null = false;
                for (int a : gt.args) {
                    if (!q[a]) {
                        any_null = true;
                        break;
                    }
                    acc.insert(acc.end(), q[a]->begin(), q[a]->end());
                }
                q[g] = any_null ? std::nullopt : canonical(std::move(acc));
                break;
            }
            case gate_kind::mul: {
                const auto& left = q[gt.args[0]];
                const auto& right = q[gt.args[1]];
                if (!left && !right) throw skewness_error(g + 1);
                if ((left && left->empty()) || (right && right->empty())) {
                    q[g] = monomial_list<S>{};  // multiplying by the zero polynomial
                    break;
                }
                if (!left || !right) {
                    q[g] = std::nullopt;
                    break;
                }
                monomial_list<S> prod;
                for (const auto& [ml, cl] : *left)
                    for (const auto& [mr, cr] : *right) {
                        if (ml & mr) continue;  // repeated variable: not multilinear
                        prod.emplace_back(ml | mr, sr.mul(cl, cr));
                    }
                q[g] = canonical(std::move(prod));
                break;
            }
        }
    }
    return q;
}

namespace detail {

inline std::vector<int> mask_elems(std::uint64_t mask) {
    std::vector<int> out;
    for (int e = 0; e < 64; ++e)
        if (mask >> e & 1) out.push_back(e);
    return out;
}

}  // namespace detail

// Sum of the coefficients of the multilinear degree-k monomials of the
// sink polynomial, via representation vectors b_{g,p} for p = 0..k. Small
// gates are built directly from their monomial lists; large addition gates
// sum pointwise; large multiplications convolve the big side by each
// monomial of the small side, scaling on the side the operand order
// dictates.
template <semiring S>
typename S::value_type monomial_sum(const skewed_circuit& c, int k, S sr, const solve_options& opt = {}) {
    if (k < 0) throw std::invalid_argument("monomial_sum: k must be non-negative");
    if (k > c.n_vars) return sr.zero();  // no multilinear monomial has k distinct variables
    auto q = compute_monomial_lists(c, sr);

    if (k == 0) {
        // Constant coefficients compose gate by gate; no vectors needed.
        std::vector<typename S::value_type> cval(c.gates.size(), sr.zero());
        for (int g : c.topo) {
            const gate& gt = c.gates[g];
            if (gt.kind == gate_kind::variable) cval[g] = sr.zero();
            else if (gt.kind == gate_kind::constant) cval[g] = embed_constant(sr, gt);
            else if (gt.kind == gate_kind::add) {
                for (int a : gt.args) cval[g] = sr.add(cval[g], cval[a]);
            } else {
                cval[g] = sr.mul(cval[gt.args[0]], cval[gt.args[1]]);
            }
        }
        return cval[c.output];
    }

    auto ctx = opt.reuse_context;
    if (!ctx) ctx = build_shared_context(c.n_vars, k, opt.context);
    if (ctx->n != c.n_vars || ctx->k_user != k)
        throw std::invalid_argument("monomial_sum: reused context does not match (n_vars, k)");
    using rep = representation<S>;
    rep binit = init(ctx, sr);

    // Release a gate's vectors once every consumer has read them.
    std::vector<int> remaining(c.gates.size(), 0);
    for (const gate& gt : c.gates)
        for (int a : gt.args) ++remaining[a];
    ++remaining[c.output];

    std::vector<std::vector<std::unique_ptr<rep>>> slots(c.gates.size());
    auto slot_add = [&](std::vector<std::unique_ptr<rep>>& sl, int p, rep&& term) {
        if (!sl[p])
            sl[p] = std::make_unique<rep>(std::move(term));
        else
            *sl[p] = add_reps(*sl[p], term);
    };
    auto release = [&](int g) {
        if (--remaining[g] == 0) slots[g].clear();
    };

    for (int g : c.topo) {
        const gate& gt = c.gates[g];
        auto& sl = slots[g];
        sl.resize(k + 1);
        if (q[g]) {
            for (const auto& [mask, coeff] : *q[g]) {
                int z = __builtin_popcountll(mask);
                if (z > k) continue;
                auto elems = detail::mask_elems(mask);
                slot_add(sl, z, scale_left(coeff, convolve_set(binit, elems, opt.threads)));
            }
            for (int a : gt.args) release(a);
        } else if (gt.kind == gate_kind::add) {
            for (int a : gt.args)
                for (int p = 0; p <= k; ++p)
                    if (slots[a][p]) slot_add(sl, p, rep(*slots[a][p]));
            for (int a : gt.args) release(a);
        } else {  // large multiplication: exactly one operand has a list
            bool left_small = q[gt.args[0]].has_value();
            int small = left_small ? gt.args[0] : gt.args[1];
            int big = left_small ? gt.args[1] : gt.args[0];
            for (const auto& [mask, coeff] : *q[small]) {
                int z = __builtin_popcountll(mask);
                if (z > k) continue;
                auto elems = detail::mask_elems(mask);
                for (int p = 0; p + z <= k; ++p) {
                    if (!slots[big][p]) continue;
                    rep conv = convolve_set(*slots[big][p], elems, opt.threads);
                    slot_add(sl, p + z, left_small ? scale_left(coeff, conv) : scale_right(conv, coeff));
                }
            }
            release(small);
            release(big);
        }
    }
    auto& out = slots[c.output];
    if (out.empty() || !out[k]) return sr.zero();
    return query(*out[k], std::span<const int>{});
}

// Full multilinear coefficient table per gate (products that repeat a
// variable are dropped), summed over the degree-k monomials of the sink.
// The expansion oracle for monomial_sum.
template <semiring S>
typename S::value_type brute_force_expand(const skewed_circuit& c, int k, S sr) {
    if (c.n_vars > 16) throw resource_error("brute_force_expand: more than 16 variables");
    using table = std::unordered_map<std::uint64_t, typename S::value_type>;
    std::vector<table> tabs(c.gates.size());
    for (int g : c.topo) {
        const gate& gt = c.gates[g];
        table t;
        switch (gt.kind) {
            case gate_kind::variable:
                t[1ULL << gt.var] = sr.one();
                break;
            case gate_kind::constant: {
                auto v = embed_constant(sr, gt);
                if (v != sr.zero()) t[0] = v;
                break;
            }
            case gate_kind::add:
                for (int a : gt.args)
                    for (const auto& [mask, coeff] : tabs[a]) {
                        auto it = t.find(mask);
                        t[mask] = it == t.end() ? coeff : sr.add(it->second, coeff);
                    }
                break;
            case gate_kind::mul:
                for (const auto& [ml, cl] : tabs[gt.args[0]])
                    for (const auto& [mr, cr] : tabs[gt.args[1]]) {
                        if (ml & mr) continue;
                        auto v = sr.mul(cl, cr);
                        if (v == sr.zero()) continue;
                        std::uint64_t mask = ml | mr;
                        auto it = t.find(mask);
                        t[mask] = it == t.end() ? v : sr.add(it->second, v);
                    }
                break;
        }
        tabs[g] = std::move(t);
    }
    auto acc = sr.zero();
    for (const auto& [mask, coeff] : tabs[c.output])
        if (__builtin_popcountll(mask) == k) acc = sr.add(acc, coeff);
    return acc;
}

// Encodes a k-path instance as a d=1 skewed circuit: one monomial gate
// w_{u,t} * x_t per edge, one multiplication per (edge, layer), addition
// gates collecting each layer's paths, and a sink summing the k-th layer.
// Its degree-k multilinear summation equals the k-path answer.
inline circuit_instance kpath_to_circuit(const weighted_digraph& g, int k) {
    skewed_circuit c;
    c.n_vars = g.n;
    c.d = 1;
    std::vector<int> var_gate(g.n, -1);
    auto need_var = [&](int v) {
        if (var_gate[v] < 0) {
            var_gate[v] = (int)c.gates.size();
            gate gt;
            gt.kind = gate_kind::variable;
            gt.var = v;
            c.gates.push_back(gt);
        }
        return var_gate[v];
    };
    auto make_gate = [&](gate gt) {
        c.gates.push_back(std::move(gt));
        return (int)c.gates.size() - 1;
    };

    // edge monomial w * x_t, one per deduped edge
    std::map<std::pair<int, int>, std::uint64_t> minw;
    for (const auto& e : g.edges) {
        auto key = std::make_pair(e.from, e.to);
        auto it = minw.find(key);
        if (it == minw.end() || e.w < it->second) minw[key] = e.w;
    }
    std::map<std::pair<int, int>, int> edge_gate;
    for (const auto& [key, w] : minw) {
        gate cst;
        cst.kind = gate_kind::constant;
        cst.const_value = w;
        int cid = make_gate(cst);
        gate mul;
        mul.kind = gate_kind::mul;
        mul.args = {cid, need_var(key.second)};
        edge_gate[key] = make_gate(mul);
    }

    std::vector<int> layer(g.n, -1);
    for (int t = 0; t < g.n; ++t) layer[t] = need_var(t);  // p = 1: x_t
    for (int p = 2; p <= k; ++p) {
        std::vector<std::vector<int>> terms(g.n);
        for (const auto& [key, eg] : edge_gate) {
            auto [u, t] = key;
            if (layer[u] < 0) continue;
            gate mul;
            mul.kind = gate_kind::mul;
            mul.args = {layer[u], eg};
            terms[t].push_back(make_gate(mul));
        }
        std::vector<int> next(g.n, -1);
        for (int t = 0; t < g.n; ++t) {
            if (terms[t].empty()) continue;
            if (terms[t].size() == 1) {
                next[t] = terms[t][0];
            } else {
                gate add;
                add.kind = gate_kind::add;
                add.args = terms[t];
                next[t] = make_gate(add);
            }
        }
        layer = next;
    }

    gate sinkg;
    sinkg.kind = gate_kind::add;
    for (int t = 0; t < g.n; ++t)
        if (layer[t] >= 0) sinkg.args.push_back(layer[t]);
    int sink;
    if (sinkg.args.empty()) {
        // no k-layer path exists; the zero circuit answers 0
        c.gates.clear();
        gate z;
        z.kind = gate_kind::constant;
        z.const_inf = true;
        c.gates.push_back(z);
        sink = 0;
        c.n_vars = std::max(g.n, 1);
    } else {
        sink = make_gate(sinkg);
    }

    // prune to the sink's ancestors so the sink is unique
    std::vector<char> keep(c.gates.size(), 0);
    std::vector<int> stack{sink};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (keep[v]) continue;
        keep[v] = 1;
        for (int a : c.gates[v].args) stack.push_back(a);
    }
    std::vector<int> renum(c.gates.size(), -1);
    skewed_circuit pruned;
    pruned.n_vars = c.n_vars;
    pruned.d = c.d;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (!keep[i]) continue;
        renum[i] = (int)pruned.gates.size();
        gate gt = c.gates[i];
        for (int& a : gt.args) a = renum[a];
        pruned.gates.push_back(std::move(gt));
    }
    pruned.output = renum[sink];
    validate_circuit(pruned);
    return {std::move(pruned), k};
}

}  // namespace dynrepset
