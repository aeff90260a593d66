// Command-line front end: k-path and circuit solvers, family construction,
// the self-test harness, and a scaling benchmark.
//
// Exit codes: 0 success, 1 answer-level mismatch or failed self-test,
// 2 usage/parse errors, 3 resource errors.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dynrepset/dynrepset.hpp"
#include "dynrepset/testgen.hpp"

using namespace dynrepset;

namespace {

constexpr int exit_ok = 0, exit_mismatch = 1, exit_usage = 2, exit_resource = 3;

std::string fmt_answer(std::uint64_t v) {
    return v == kpath_infinity ? std::string("INF") : std::to_string(v);
}

struct common_flags {
    std::uint64_t seed = 0x5EED;
    std::string cache_dir = ".dynrepset-cache";
    bool no_cache = false;
    int threads = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t budget = 10'000'000;
    std::size_t max_rank = std::size_t(1) << 26;

    context_options context() const {
        context_options opt;
        opt.families.seed = seed;
        opt.families.exact_budget = budget ? budget : 1;
        opt.max_rank = max_rank;
        if (!no_cache) opt.cache_dir = cache_dir;
        return opt;
    }
    solve_options solve() const {
        solve_options opt;
        opt.context = context();
        opt.threads = threads;
        return opt;
    }
};

void add_common(CLI::App* cmd, common_flags& cf) {
    cmd->add_option("--seed", cf.seed, "family construction seed (fixed default keeps runs reproducible)");
    cmd->add_option("--cache-dir", cf.cache_dir, "directory for cached families");
    cmd->add_flag("--no-cache", cf.no_cache, "disable the family cache");
    cmd->add_option("--threads", cf.threads, "worker threads for convolution slices");
    cmd->add_option("--budget", cf.budget, "enumeration budget for construction/verification");
    cmd->add_option("--max-rank", cf.max_rank, "ceiling on the factorization rank r");
}

int run_kpath(const std::string& path, int k_override, bool decision, bool oracle_check,
              std::uint64_t cap, const common_flags& cf) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return exit_usage;
    }
    kpath_instance inst = parse_kpath(in);
    int k = k_override > 0 ? k_override : inst.k;
    if (k > 11) throw resource_error("k > 11 is not supported by this artifact");
    solve_options sopt = cf.solve();
    sopt.cap_override = cap;

    if (decision) {
        bool ans = solve_kpath_decision(inst.graph, k, sopt);
        std::cout << "answer " << (ans ? 1 : 0) << "\n";
        if (oracle_check) {
            bool oracle_ans = brute_force_kpath(inst.graph, k) != kpath_infinity;
            bool match = oracle_ans == ans;
            std::cout << "oracle " << (oracle_ans ? 1 : 0) << " " << (match ? "match" : "MISMATCH") << "\n";
            if (!match) return exit_mismatch;
        }
        return exit_ok;
    }
    std::uint64_t ans = solve_kpath(inst.graph, k, sopt);
    std::cout << "answer " << fmt_answer(ans) << "\n";
    if (oracle_check) {
        std::uint64_t oracle_ans = brute_force_kpath(inst.graph, k);
        bool match = oracle_ans == ans;
        std::cout << "oracle " << fmt_answer(oracle_ans) << " " << (match ? "match" : "MISMATCH") << "\n";
        if (!match) return exit_mismatch;
    }
    return exit_ok;
}

int run_circuit(const std::string& path, int k_override, const std::string& semiring_name,
                std::uint64_t cap, bool oracle_check, const common_flags& cf) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return exit_usage;
    }
    circuit_instance inst = parse_circuit(in);
    int k = k_override >= 0 ? k_override : inst.k;
    if (k > 11) throw resource_error("k > 11 is not supported by this artifact");

    auto kind = parse_semiring_kind(semiring_name);
    if (kind == semiring_choice::kind::boolean) {
        boolean_semiring sr;
        auto ans = monomial_sum(inst.circuit, k, sr, cf.solve());
        std::cout << "answer " << sr.format(ans) << "\n";
        if (oracle_check) {
            auto oracle_ans = brute_force_expand(inst.circuit, k, sr);
            bool match = oracle_ans == ans;
            std::cout << "oracle " << sr.format(oracle_ans) << " " << (match ? "match" : "MISMATCH") << "\n";
            if (!match) return exit_mismatch;
        }
    } else {
        // No instance-derived bound exists for circuit coefficients, so the
        // automatic cap is a wide fixed default; --cap overrides.
        capped_minplus_semiring<std::uint64_t> sr(cap ? cap : (std::uint64_t(1) << 40));
        auto ans = monomial_sum(inst.circuit, k, sr, cf.solve());
        std::cout << "answer " << sr.format(ans) << "\n";
        if (oracle_check) {
            auto oracle_ans = brute_force_expand(inst.circuit, k, sr);
            bool match = oracle_ans == ans;
            std::cout << "oracle " << sr.format(oracle_ans) << " " << (match ? "match" : "MISMATCH") << "\n";
            if (!match) return exit_mismatch;
        }
    }
    return exit_ok;
}

int run_families(int n, int k, bool verify, const common_flags& cf) {
    int s = 1;
    while (s * s < k) ++s;
    int ksq = s * s, d = ksq - k, n_pad = n + d, u = ksq * ksq;
    if (u > bitset128::capacity) throw resource_error("padded k^2 exceeds 128");
    context_options opt = cf.context();

    auto report = [&](const std::string& what, auto&& fam, verify_result vr, bool verified) {
        std::cout << what << " size=" << fam.size();
        if (verified) std::cout << " verify=" << to_string(vr);
        std::cout << "\n";
    };
    splitter_family outer = build_outer_splitter(n_pad, ksq, opt.families);
    splitter_family inner = build_inner_splitter(u, ksq, s, opt.families);
    universal_family fam = build_universal_family(u, s, opt.families);
    if (!opt.cache_dir.empty()) {
        std::filesystem::create_directories(opt.cache_dir);
        auto save = [&](const std::string& name, const auto& f) {
            std::ofstream out(opt.cache_dir / name);
            write_family(out, f);
        };
        std::ostringstream seedtag;
        seedtag << std::hex << cf.seed;
        save("splitter_" + std::to_string(n_pad) + "_" + std::to_string(ksq) + "_" + std::to_string(u) + "_" +
                 seedtag.str() + ".txt",
             outer);
        save("splitter_" + std::to_string(u) + "_" + std::to_string(ksq) + "_" + std::to_string(s) + "_" +
                 seedtag.str() + ".txt",
             inner);
        save("universal_" + std::to_string(u) + "_" + std::to_string(s) + "_" + seedtag.str() + ".txt", fam);
    }
    report("outer splitter n=" + std::to_string(n_pad) + " k=" + std::to_string(ksq) +
               " ell=" + std::to_string(u),
           outer, verify ? verify_splitter(outer, cf.budget) : verify_result::pass, verify);
    report("inner splitter u=" + std::to_string(u) + " k=" + std::to_string(ksq) + " ell=" + std::to_string(s),
           inner, verify ? verify_splitter(inner, cf.budget) : verify_result::pass, verify);
    report("universal family u=" + std::to_string(u) + " s=" + std::to_string(s), fam,
           verify ? verify_universal(fam, cf.budget) : verify_result::pass, verify);
    return exit_ok;
}

// --- selftest ---------------------------------------------------------

struct selftest_state {
    bool all_pass = true;
    void line(const std::string& name, const std::string& params, verify_result r) {
        std::cout << name << " " << params << " " << to_string(r) << "\n";
        if (r == verify_result::fail) all_pass = false;
    }
    void line(const std::string& name, const std::string& params, bool pass) {
        std::cout << name << " " << params << " " << (pass ? "PASS" : "FAIL") << "\n";
        if (!pass) all_pass = false;
    }
    void skip(const std::string& name, const std::string& params) {
        std::cout << name << " " << params << " SKIP\n";
    }
};

// Asymmetric defect: rows containing element 1 vanish, breaking commutation.
bool mutated_d_entry_guard(std::uint64_t a, std::uint64_t b, int k) {
    return (a & b) == 0 && __builtin_popcountll(a | b) <= k && !(a >> 1 & 1);
}

int run_selftest(int max_n, int max_k, int trials, int seq_trials, int invert_trials,
                 const std::string& mutate, const common_flags& cf) {
    selftest_state st;
    context_options ctx_opt = cf.context();
    ctx_opt.cache_dir.clear();  // self-test builds everything fresh

    if (cf.budget == 0) {
        for (const char* name : {"commutation", "factorization", "hat-commutation", "invert-minimality",
                                 "representation-sequences", "kpath-oracle", "circuit-oracle", "families"})
            st.skip(name, "budget=0");
        return exit_ok;
    }

    // commutation
    for (int n = 4; n <= std::min(max_n, 8); n += 2) {
        int k = std::min(max_k, std::min(n, 4));
        bool ok = true;
        for (int e = 0; e < n && ok; ++e)
            ok = oracle::check_commutation(n, k, e,
                                           mutate == "commutation-guard" ? mutated_d_entry_guard : oracle::d_entry);
        st.line("commutation", "n=" + std::to_string(n) + " k=" + std::to_string(k) + " all-e", ok);
    }

    // factorization identity (+ optional universal-family mutation)
    if (mutate == "factorization-universal") {
        // pinned hash: element 0 maps to 0, and no family set contains 0
        splitter_family outer;
        outer.n = 4;
        outer.k = 4;
        outer.ell = 16;
        outer.functions = {{0, 1, 2, 3}};
        auto inner = build_inner_splitter(16, 4, 2, ctx_opt.families);
        auto fam = build_universal_family(16, 2, ctx_opt.families);
        std::erase_if(fam.sets, [](bitset128 s) { return s.test(0); });
        auto ctx = make_context(4, 4, std::move(outer), std::move(inner), std::move(fam), ctx_opt.max_rank);
        st.line("factorization", "n=4 k=4 mutated-family", oracle::check_factorization(ctx, cf.budget));
    } else {
        for (auto [n, k] : std::vector<std::pair<int, int>>{{6, 3}, {6, 4}, {8, 4}}) {
            if (n > max_n || k > max_k) continue;
            try {
                auto ctx = build_context(n, k, ctx_opt);
                st.line("factorization", "n=" + std::to_string(n) + " k=" + std::to_string(k),
                        oracle::check_factorization(ctx, cf.budget));
            } catch (const resource_error&) {
                st.skip("factorization", "n=" + std::to_string(n) + " k=" + std::to_string(k));
            }
        }
    }

    // hat commutation
    if (max_n >= 6 && max_k >= 4) {
        auto ctx = build_context(6, 4, ctx_opt);
        bool ok = true;
        for (int e = 0; e < 6 && ok; ++e)
            ok = oracle::check_hat_commutation(ctx, e, mutate == "hat-block" ? 1 : 0) == verify_result::pass;
        st.line("hat-commutation", "n=6 k=4 all-e", ok);
    } else {
        st.skip("hat-commutation", "n=6 k=4");
    }

    // invert minimality over the 3-element capped semiring
    {
        capped_minplus_semiring<std::uint64_t> sr3(1);
        auto elems = sr3.elements();
        splitmix64 rng(cf.seed ^ 0x1717);
        bool ok = true;
        for (int t = 0; t < invert_trials && ok; ++t) {
            int m = 1 + (int)rng.below(6), cols = 1 + (int)rng.below(6);
            std::vector<std::vector<std::uint32_t>> cover(m);
            for (int j = 0; j < m; ++j)
                for (int i = 0; i < cols; ++i)
                    if (rng.below(2)) cover[j].push_back(i);
            std::vector<std::uint64_t> bstar(cols);
            for (auto& v : bstar) v = elems[rng.below(elems.size())];
            auto astar = invert_cover(sr3, cover, bstar);
            if (mutate == "invert-lcu" && !astar.empty()) astar[0] = sr3.bottom();
            // b* <= a* X
            for (int i = 0; i < cols && ok; ++i) {
                auto prod = sr3.zero();
                for (int j = 0; j < m; ++j)
                    for (auto cc : cover[j])
                        if ((int)cc == i) prod = sr3.add(prod, astar[j]);
                ok = sr3.leq(bstar[i], prod);
            }
            // minimality against every candidate vector
            std::vector<std::size_t> idx(m, 0);
            while (ok) {
                std::vector<std::uint64_t> cand(m);
                for (int j = 0; j < m; ++j) cand[j] = elems[idx[j]];
                bool feasible = true;
                for (int i = 0; i < cols && feasible; ++i) {
                    auto prod = sr3.zero();
                    for (int j = 0; j < m; ++j)
                        for (auto cc : cover[j])
                            if ((int)cc == i) prod = sr3.add(prod, cand[j]);
                    feasible = sr3.leq(bstar[i], prod);
                }
                if (feasible)
                    for (int j = 0; j < m && ok; ++j) ok = sr3.leq(astar[j], cand[j]);
                int pos = 0;
                while (pos < m && ++idx[pos] == elems.size()) idx[pos++] = 0;
                if (pos == m) break;
            }
        }
        st.line("invert-minimality", "trials=" + std::to_string(invert_trials), ok);
    }

    // representation preservation sequences
    {
        splitmix64 rng(cf.seed ^ 0x517);
        bool ok = true;
        int n = std::min(max_n, 8), k = std::min(max_k, 3);
        auto ctx = build_shared_context(n, k, ctx_opt);
        if (mutate == "represents-table") {
            oracle::dense_table<boolean_semiring> bad;
            bad[1] = boolean_semiring{}.one();
            // b_init does not represent the singleton table; the defect must be flagged
            ok = ok && oracle::represents(*ctx, boolean_semiring{}, init(ctx, boolean_semiring{}), bad);
        }
        for (int t = 0; t < seq_trials && ok; ++t) {
            int len = 1 + (int)rng.below(6);
            if (t % 2 == 0)
                ok = testgen::run_mirrored_sequence(ctx, boolean_semiring{}, rng, len);
            else
                ok = testgen::run_mirrored_sequence(ctx, capped_minplus_semiring<std::uint64_t>(40), rng, len);
        }
        st.line("representation-sequences", "trials=" + std::to_string(seq_trials), ok);
    }

    // solver sweeps
    {
        splitmix64 rng(cf.seed ^ 0x6b70);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            auto g = testgen::random_digraph(rng, std::min(max_n, 10), 9);
            int k = 2 + (int)rng.below(std::min(max_k, 4) - 1);
            auto fast = solve_kpath(g, k, {ctx_opt, cf.threads, nullptr});
            auto slow = brute_force_kpath(g, k);
            ok = fast == slow && solve_kpath_decision(g, k, {ctx_opt, cf.threads, nullptr}) == (slow != kpath_infinity);
        }
        st.line("kpath-oracle", "trials=" + std::to_string(trials), ok);
    }
    {
        splitmix64 rng(cf.seed ^ 0xc1);
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            auto c = testgen::random_skewed_circuit(rng, 10, 6, 3);
            int k = 1 + (int)rng.below(std::min(max_k, 3));
            if (k > c.n_vars) k = c.n_vars;
            boolean_semiring bs;
            capped_minplus_semiring<std::uint64_t> ms(1000);
            ok = monomial_sum(c, k, bs, {ctx_opt, cf.threads, nullptr}) == brute_force_expand(c, k, bs) &&
                 monomial_sum(c, k, ms, {ctx_opt, cf.threads, nullptr}) == brute_force_expand(c, k, ms);
        }
        st.line("circuit-oracle", "trials=" + std::to_string(trials), ok);
    }

    // family grid
    {
        bool ok = true;
        std::string params;
        for (int k = 2; k <= std::min(max_k, 4); ++k) {
            int n = std::min(max_n, 10);
            int s = 1;
            while (s * s < k) ++s;
            int ksq = s * s, u = ksq * ksq;
            auto outer = build_outer_splitter(n + ksq - k, ksq, ctx_opt.families);
            if (mutate == "splitter-constant")
                for (auto& fn : outer.functions)
                    for (auto& b : fn) b = 0;
            auto inner = build_inner_splitter(u, ksq, s, ctx_opt.families);
            auto fam = build_universal_family(u, s, ctx_opt.families);
            if (mutate == "universal-drop") fam.sets.pop_back();
            ok = ok && verify_splitter(outer, cf.budget) == verify_result::pass &&
                 verify_splitter(inner, cf.budget) == verify_result::pass &&
                 verify_universal(fam, cf.budget) == verify_result::pass;
        }
        st.line("families", "grid n<=" + std::to_string(std::min(max_n, 10)) + " k<=" +
                                std::to_string(std::min(max_k, 4)),
                ok);
    }

    return st.all_pass ? exit_ok : exit_mismatch;
}

int run_bench(const std::string& grid, int k, int edge_factor, std::uint64_t max_w, const common_flags& cf) {
    std::cout << "n,k,r,h,ell,build_ms,convolve_us,solve_ms\n";
    std::istringstream gs(grid);
    std::string tok;
    while (std::getline(gs, tok, ',')) {
        int n = std::stoi(tok);
        splitmix64 rng(cf.seed ^ (std::uint64_t)n);
        weighted_digraph g;
        g.n = n;
        std::uint64_t m = (std::uint64_t)edge_factor * n;
        for (std::uint64_t i = 0; i < m; ++i) {
            int a = (int)rng.below(n), b = (int)rng.below(n);
            g.edges.push_back({a, b, rng.below(max_w + 1)});
        }
        using clock = std::chrono::steady_clock;
        auto t0 = clock::now();
        auto ctx = build_shared_context(n, k, cf.context());
        auto t1 = clock::now();
        capped_minplus_semiring<std::uint64_t> sr(std::max<std::uint64_t>(1, (std::uint64_t)k * max_w));
        auto b0 = init(ctx, sr);
        auto t2 = clock::now();
        auto b1 = convolve(b0, 0, cf.threads);
        auto t3 = clock::now();
        solve_options opt;
        opt.threads = cf.threads;
        opt.reuse_context = ctx;
        auto t4 = clock::now();
        (void)solve_kpath(g, k, opt);
        auto t5 = clock::now();
        (void)b1;
        auto ms = [](auto a, auto b) {
            return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count() / 1000.0;
        };
        auto us = [](auto a, auto b) {
            return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
        };
        std::cout << n << "," << k << "," << ctx->r << "," << ctx->h << "," << ctx->ell << "," << ms(t0, t1)
                  << "," << us(t2, t3) << "," << ms(t4, t5) << "\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic representative sets over idempotent semirings"};
    app.require_subcommand(1);

    common_flags cf;

    // kpath
    auto* kp = app.add_subcommand("kpath", "solve weighted directed k-path");
    std::string kp_graph;
    int kp_k = -1;
    std::uint64_t kp_cap = 0;
    bool kp_decision = false, kp_oracle = false;
    kp->add_option("--graph", kp_graph, "graph file")->required();
    kp->add_option("--k", kp_k, "override the header k");
    kp->add_option("--cap", kp_cap, "override the automatic min-plus cap (expert use)");
    kp->add_flag("--decision", kp_decision, "Boolean decision variant");
    kp->add_flag("--oracle-check", kp_oracle, "cross-check against the DFS oracle");
    add_common(kp, cf);

    // circuit
    auto* ci = app.add_subcommand("circuit", "skewed multilinear monomial summation");
    std::string ci_file, ci_semiring = "minplus";
    std::uint64_t ci_cap = 0;
    int ci_k = -1;
    bool ci_oracle = false;
    ci->add_option("--file", ci_file, "circuit file")->required();
    ci->add_option("--k", ci_k, "override the header k");
    ci->add_option("--semiring", ci_semiring, "boolean|minplus");
    ci->add_option("--cap", ci_cap, "override the automatic min-plus cap");
    ci->add_flag("--oracle-check", ci_oracle, "cross-check against the expansion oracle");
    add_common(ci, cf);

    // families
    auto* fa = app.add_subcommand("families", "build (and optionally verify) the pseudo-random families");
    int fa_n = 0, fa_k = 0;
    bool fa_verify = false;
    fa->add_option("--n", fa_n, "universe size")->required();
    fa->add_option("--k", fa_k, "subset size")->required();
    fa->add_flag("--verify", fa_verify, "exhaustively verify the family properties");
    add_common(fa, cf);

    // selftest
    auto* se = app.add_subcommand("selftest", "run every oracle check and solver sweep");
    int se_max_n = 8, se_max_k = 4, se_trials = 25, se_seq = 20, se_invert = 200;
    std::string se_mutate;
    se->add_option("--max-n", se_max_n, "largest universe in the sweeps");
    se->add_option("--max-k", se_max_k, "largest k in the sweeps");
    se->add_option("--trials", se_trials, "solver sweep instances");
    se->add_option("--seq-trials", se_seq, "mirrored operation sequences");
    se->add_option("--invert-trials", se_invert, "invert minimality instances");
    se->add_option("--mutate", se_mutate, "inject a named defect (expect a FAIL line)");
    add_common(se, cf);

    // bench
    auto* be = app.add_subcommand("bench", "context/convolve/solve timings as CSV");
    std::string be_grid = "25,50,100,200";
    int be_k = 4, be_edges = 2;
    std::uint64_t be_maxw = 9;
    be->add_option("--grid", be_grid, "comma-separated n values");
    be->add_option("--k", be_k, "path length");
    be->add_option("--edge-factor", be_edges, "edges per vertex");
    be->add_option("--max-w", be_maxw, "maximum edge weight");
    add_common(be, cf);

    CLI11_PARSE(app, argc, argv);

    try {
        if (kp->parsed()) return run_kpath(kp_graph, kp_k, kp_decision, kp_oracle, kp_cap, cf);
        if (ci->parsed()) return run_circuit(ci_file, ci_k, ci_semiring, ci_cap, ci_oracle, cf);
        if (fa->parsed()) return run_families(fa_n, fa_k, fa_verify, cf);
        if (se->parsed()) return run_selftest(se_max_n, se_max_k, se_trials, se_seq, se_invert, se_mutate, cf);
        if (be->parsed()) return run_bench(be_grid, be_k, be_edges, be_maxw, cf);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return exit_resource;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
