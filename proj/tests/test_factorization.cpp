#include <catch2/catch_amalgamated.hpp>

#include "dynrepset/factorization.hpp"
#include "dynrepset/oracle.hpp"

using namespace dynrepset;

TEST_CASE("padding parameters", "[factorization]") {
    auto c4 = build_context(10, 4);
    REQUIRE(c4.s == 2);
    REQUIRE(c4.k == 4);
    REQUIRE(c4.d == 0);
    REQUIRE(c4.u == 16);
    REQUIRE(c4.n_pad == 10);

    auto c3 = build_context(10, 3);
    REQUIRE(c3.s == 2);
    REQUIRE(c3.k == 4);
    REQUIRE(c3.d == 1);
    REQUIRE(c3.n_pad == 11);

    auto c1 = build_context(5, 1);
    REQUIRE(c1.s == 1);
    REQUIRE(c1.u == 1);
    REQUIRE(c1.r == c1.h * c1.ell);
}

TEST_CASE("rank ceiling is a resource error reporting r", "[factorization]") {
    context_options opt;
    opt.max_rank = 10;
    try {
        build_context(8, 4, opt);
        FAIL("expected resource_error");
    } catch (const resource_error& e) {
        REQUIRE(std::string(e.what()).find("ceiling") != std::string::npos);
    }
}

TEST_CASE("column encode/decode is a bijection", "[factorization]") {
    auto ctx = build_context(6, 2);
    for (std::size_t flat = 0; flat < ctx.r; ++flat) {
        column_index ci = ctx.decode(flat);
        REQUIRE(ctx.encode(ci) == flat);
        REQUIRE(ci.outer_idx >= 0);
        REQUIRE(ci.outer_idx < (int)ctx.outer.size());
        for (auto [f, p] : ci.blocks) {
            REQUIRE(f >= 0);
            REQUIRE(f < (int)ctx.fam.size());
            REQUIRE(p >= 0);
            REQUIRE(p <= ctx.s);
        }
    }
}

TEST_CASE("x and y entry guards", "[factorization]") {
    auto ctx = build_context(8, 4);
    bitset128 empty;
    for (int f = 0; f < (int)ctx.fam.size(); ++f)
        for (int p = 0; p <= ctx.s; ++p) {
            REQUIRE(x_entry(ctx, empty, f, p));  // empty set fits every column
            REQUIRE(y_entry(ctx, f, p, empty));
        }
    // a set one larger than s fails every column
    bitset128 big;
    for (int e = 0; e <= ctx.s; ++e) big.set(e);
    for (int f = 0; f < (int)ctx.fam.size(); ++f)
        for (int p = 0; p <= ctx.s; ++p) REQUIRE_FALSE(x_entry(ctx, big, f, p));
    // membership guards: a singleton outside F fails X; any B meeting a
    // non-empty F fails Y
    for (int f = 0; f < (int)ctx.fam.size(); ++f) {
        for (int v = 0; v < ctx.u; ++v) {
            if (ctx.fam.sets[f].test(v)) continue;
            REQUIRE_FALSE(x_entry(ctx, bitset128::singleton(v), f, ctx.s));
            break;
        }
        if (ctx.fam.sets[f].empty()) continue;
        int member = ctx.fam.sets[f].elements()[0];
        REQUIRE_FALSE(y_entry(ctx, f, 0, bitset128::singleton(member)));
    }
}

TEST_CASE("l and r entries", "[factorization]") {
    auto ctx = build_context(6, 4);  // square k, no padding
    REQUIRE(ctx.d == 0);
    SECTION("empty row of L is all ones without padding") {
        for (std::size_t flat = 0; flat < ctx.r; flat += 7)
            REQUIRE(l_entry(ctx, std::vector<int>{}, ctx.decode(flat)));
    }
    SECTION("rows indexed by oversized sets vanish") {
        std::vector<int> big{0, 1, 2, 3, 4};  // k_user + 1 elements
        for (std::size_t flat = 0; flat < ctx.r; flat += 11) {
            REQUIRE_FALSE(l_entry(ctx, big, ctx.decode(flat)));
            REQUIRE_FALSE(r_entry(ctx, ctx.decode(flat), big));
        }
    }
    SECTION("empty column of R is all ones") {
        for (std::size_t flat = 0; flat < ctx.r; flat += 7)
            REQUIRE(r_entry(ctx, ctx.decode(flat), std::vector<int>{}));
    }
    SECTION("universe check") {
        std::vector<int> out{6};
        REQUIRE_THROWS_AS(l_entry(ctx, out, ctx.decode(0)), std::invalid_argument);
        REQUIRE_THROWS_AS(r_entry(ctx, ctx.decode(0), out), std::invalid_argument);
    }
}

TEST_CASE("hash collisions zero the entry", "[factorization]") {
    // Hand-built context whose only outer function collides on {0,1}.
    int n = 4, k_user = 4;  // s=2, k=4, u=16, d=0
    splitter_family outer;
    outer.n = 4;
    outer.k = 4;
    outer.ell = 16;
    outer.functions = {{0, 0, 1, 2}};
    auto inner = build_inner_splitter(16, 4, 2);
    auto fam = build_universal_family(16, 2);
    auto ctx = make_context(n, k_user, outer, inner, fam);

    std::vector<int> colliding{0, 1};
    std::vector<int> fine{0, 2};
    bool any_fine_l = false, any_fine_r = false;
    for (std::size_t flat = 0; flat < ctx.r; ++flat) {
        column_index col = ctx.decode(flat);
        REQUIRE_FALSE(l_entry(ctx, colliding, col));
        REQUIRE_FALSE(r_entry(ctx, col, colliding));
        any_fine_l = any_fine_l || l_entry(ctx, fine, col);
        any_fine_r = any_fine_r || r_entry(ctx, col, fine);
    }
    REQUIRE(any_fine_l);
    REQUIRE(any_fine_r);
}

TEST_CASE("factorization identity, exhaustive on small instances", "[factorization]") {
    for (auto [n, k] : std::vector<std::pair<int, int>>{{6, 2}, {6, 3}, {7, 4}}) {
        auto ctx = build_context(n, k);
        INFO("n=" << n << " k=" << k << " d=" << ctx.d);
        REQUIRE(oracle::check_factorization(ctx) == verify_result::pass);
    }
}

TEST_CASE("contracted product agrees with the literal column sum", "[factorization]") {
    auto ctx = build_context(5, 2);  // small enough to walk all r columns
    splitmix64 rng(3);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<int> a, b;
        for (int e = 0; e < 5; ++e) {
            if (rng.below(3) == 0 && (int)a.size() < ctx.k_user) a.push_back(e);
            if (rng.below(3) == 0 && (int)b.size() < ctx.k_user) b.push_back(e);
        }
        REQUIRE(oracle::lr_product(ctx, a, b) == oracle::lr_product_literal(ctx, a, b));
    }
}

TEST_CASE("mutated universal family breaks the identity", "[factorization]") {
    // One injective outer function pins element 0's hash to 0; dropping
    // every set containing 0 leaves the row L[{0}, .] identically zero
    // while D[{0}, {}] = 1.
    int n = 4, k = 4;
    splitter_family outer;
    outer.n = 4;
    outer.k = 4;
    outer.ell = 16;
    outer.functions = {{0, 1, 2, 3}};
    auto inner = build_inner_splitter(16, 4, 2);
    auto fam = build_universal_family(16, 2);
    auto sane = make_context(n, k, outer, inner, fam);
    REQUIRE(oracle::check_factorization(sane) == verify_result::pass);

    universal_family mutated = fam;
    std::erase_if(mutated.sets, [](bitset128 s) { return s.test(0); });
    auto ctx = make_context(n, k, outer, inner, mutated);
    REQUIRE(oracle::check_factorization(ctx) == verify_result::fail);
}
