#include <catch2/catch_amalgamated.hpp>

#include "dynrepset/oracle.hpp"
#include "dynrepset/repset.hpp"
#include "dynrepset/testgen.hpp"

using namespace dynrepset;

namespace {
using minplus = capped_minplus_semiring<std::uint64_t>;
}

TEST_CASE("init matches the L row of the empty set", "[repset]") {
    SECTION("square k: every entry is one") {
        auto ctx = build_shared_context(5, 4);
        REQUIRE(ctx->d == 0);
        boolean_semiring sr;
        auto b = init(ctx, sr);
        for (auto v : b.values) REQUIRE(v == sr.one());
    }
    SECTION("padded context: entries equal l_entry of the phantom lift") {
        auto ctx = build_shared_context(6, 3);
        REQUIRE(ctx->d == 1);
        minplus sr(30);
        auto b = init(ctx, sr);
        bool saw_zero = false, saw_one = false;
        for (std::size_t flat = 0; flat < ctx->r; ++flat) {
            bool live = l_entry(*ctx, std::vector<int>{}, ctx->decode(flat));
            REQUIRE(b.values[flat] == (live ? sr.one() : sr.zero()));
            saw_zero = saw_zero || !live;
            saw_one = saw_one || live;
        }
        REQUIRE(saw_one);
        REQUIRE(saw_zero);  // p=0 blocks reject the phantom singleton
    }
    SECTION("query of init is one on every admissible set") {
        auto ctx = build_shared_context(6, 3);
        boolean_semiring sr;
        auto b = init(ctx, sr);
        REQUIRE(query(b, {}) == sr.one());
        for_each_subset_up_to(6, 3, [&](const std::vector<int>& s) { REQUIRE(query(b, s) == sr.one()); });
    }
}

TEST_CASE("invert on the two-by-two example", "[repset]") {
    // X = [[1,1],[0,1]] as row cover lists; b* = (5,3)
    minplus sr(100);
    std::vector<std::vector<std::uint32_t>> cover{{0, 1}, {1}};
    std::vector<std::uint64_t> bstar{5, 3};
    auto astar = invert_cover(sr, cover, bstar);
    REQUIRE(astar[0] == 5);  // max(5, 3)
    REQUIRE(astar[1] == 3);
    // b* <= a* X at both columns
    REQUIRE(sr.leq(bstar[0], astar[0]));
    REQUIRE(sr.leq(bstar[1], sr.add(astar[0], astar[1])));
}

TEST_CASE("invert edge cases", "[repset]") {
    minplus sr(100);
    SECTION("all-zero b* maps to all-zero a*") {
        std::vector<std::vector<std::uint32_t>> cover{{0}, {0, 1}};
        std::vector<std::uint64_t> bstar{sr.zero(), sr.zero()};
        for (auto v : invert_cover(sr, cover, bstar)) REQUIRE(v == sr.zero());
    }
    SECTION("a row with no covered column gets the bottom element") {
        std::vector<std::vector<std::uint32_t>> cover{{}};
        std::vector<std::uint64_t> bstar{7};
        REQUIRE(invert_cover(sr, cover, bstar)[0] == sr.bottom());
    }
    SECTION("context invert materializes every row of size at most s") {
        auto ctx = build_shared_context(4, 4);
        std::vector<std::uint64_t> bstar(ctx->ell);
        splitmix64 rng(5);
        for (auto& v : bstar) v = rng.below(2) ? rng.below(50) : sr.zero();
        auto table = invert(*ctx, sr, bstar);
        REQUIRE(table.entries.size() == ctx->rows.size());
        for (std::size_t rid = 0; rid < ctx->rows.size(); ++rid) {
            auto expect = sr.bottom();
            for (auto cc : ctx->row_cols[rid]) expect = sr.lcu2(expect, bstar[cc]);
            REQUIRE(table.at(sr, ctx->rows[rid]) == expect);
        }
    }
}

TEST_CASE("invert minimality against exhaustive candidates", "[repset]") {
    // 3-element capped min-plus semiring {0, 1, inf}
    minplus sr(1);
    auto elems = sr.elements();
    splitmix64 rng(211);
    for (int trial = 0; trial < 200; ++trial) {
        int m = 1 + (int)rng.below(5), cols = 1 + (int)rng.below(5);
        std::vector<std::vector<std::uint32_t>> cover(m);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < cols; ++i)
                if (rng.below(2)) cover[j].push_back(i);
        std::vector<std::uint64_t> bstar(cols);
        for (auto& v : bstar) v = elems[rng.below(elems.size())];
        auto astar = invert_cover(sr, cover, bstar);

        auto product_at = [&](const std::vector<std::uint64_t>& vec, int i) {
            auto acc = sr.zero();
            for (int j = 0; j < m; ++j)
                for (auto cc : cover[j])
                    if ((int)cc == i) acc = sr.add(acc, vec[j]);
            return acc;
        };
        for (int i = 0; i < cols; ++i) REQUIRE(sr.leq(bstar[i], product_at(astar, i)));

        // every feasible candidate dominates a*
        std::vector<std::size_t> idx(m, 0);
        while (true) {
            std::vector<std::uint64_t> cand(m);
            for (int j = 0; j < m; ++j) cand[j] = elems[idx[j]];
            bool feasible = true;
            for (int i = 0; i < cols && feasible; ++i) feasible = sr.leq(bstar[i], product_at(cand, i));
            if (feasible)
                for (int j = 0; j < m; ++j) REQUIRE(sr.leq(astar[j], cand[j]));
            int pos = 0;
            while (pos < m && ++idx[pos] == elems.size()) idx[pos++] = 0;
            if (pos == m) break;
        }
    }
}

TEST_CASE("convolve basics", "[repset]") {
    auto ctx = build_shared_context(6, 3);
    boolean_semiring sr;
    auto b = init(ctx, sr);
    SECTION("inserting an element keeps the empty query alive") {
        auto b1 = convolve(b, 2);
        REQUIRE(query(b1, {}) == sr.one());  // the singleton {2} is disjoint from {}
        REQUIRE(query(b1, {2}) == sr.zero());
        REQUIRE(query(b1, {4}) == sr.one());
    }
    SECTION("repeating an element collapses to zero everywhere") {
        auto b2 = convolve(convolve(b, 1), 1);
        for_each_subset_up_to(6, 3, [&](const std::vector<int>& s) { REQUIRE(query(b2, s) == sr.zero()); });
    }
    SECTION("convolve_set: empty leaves b unchanged, singleton equals convolve") {
        auto same = convolve_set(b, std::vector<int>{});
        REQUIRE(same.values == b.values);
        auto one_a = convolve_set(b, std::vector<int>{3});
        auto one_b = convolve(b, 3);
        REQUIRE(one_a.values == one_b.values);
    }
    SECTION("universe guard") {
        REQUIRE_THROWS_AS(convolve(b, 6), std::invalid_argument);
        REQUIRE_THROWS_AS(convolve(b, -1), std::invalid_argument);
    }
}

TEST_CASE("linear operations", "[repset]") {
    auto ctx = build_shared_context(6, 3);
    minplus sr(30);
    auto b = convolve(init(ctx, sr), 0);
    SECTION("addition is idempotent and zero is neutral") {
        auto doubled = add_reps(b, b);
        REQUIRE(doubled.values == b.values);
        representation<minplus> zero(ctx, sr);
        REQUIRE(add_reps(b, zero).values == b.values);
    }
    SECTION("scaling by one and zero") {
        REQUIRE(scale_left(sr.one(), b).values == b.values);
        auto killed = scale_left(sr.zero(), b);
        for (auto v : killed.values) REQUIRE(v == sr.zero());
    }
    SECTION("min-plus scaling adds the scalar to finite entries") {
        auto shifted = scale_left(std::uint64_t(5), b);
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            if (b.values[i] == sr.zero())
                REQUIRE(shifted.values[i] == sr.zero());
            else
                REQUIRE(shifted.values[i] == b.values[i] + 5);
        }
    }
    SECTION("context mismatch is refused") {
        auto other = build_shared_context(6, 3);
        auto b2 = init(other, sr);
        REQUIRE_THROWS_AS(add_reps(b, b2), std::invalid_argument);
    }
}

TEST_CASE("query degrades to zero on oversized sets", "[repset]") {
    auto ctx = build_shared_context(6, 2);
    boolean_semiring sr;
    auto b = init(ctx, sr);
    std::vector<int> big{0, 1, 2};
    REQUIRE(query(b, big) == sr.zero());
}

TEST_CASE("insertion order does not change answers", "[repset]") {
    auto ctx = build_shared_context(7, 3);
    minplus sr(40);
    auto b = init(ctx, sr);
    std::vector<int> fwd{1, 4}, rev{4, 1};
    auto bf = convolve_set(b, fwd);
    auto br = convolve_set(b, rev);
    for_each_subset_up_to(7, 3, [&](const std::vector<int>& s) { REQUIRE(query(bf, s) == query(br, s)); });
}

TEST_CASE("threaded convolve writes the same vector", "[repset]") {
    auto ctx = build_shared_context(8, 3);
    minplus sr(40);
    auto b = scale_left(std::uint64_t(2), convolve(init(ctx, sr), 5));
    auto serial = convolve(b, 1, 1);
    auto threaded = convolve(b, 1, 4);
    REQUIRE(serial.values == threaded.values);
}

TEST_CASE("mirrored operation sequences preserve representation", "[repset]") {
    auto ctx = build_shared_context(7, 3);
    splitmix64 rng(1234);
    for (int t = 0; t < 8; ++t) {
        REQUIRE(testgen::run_mirrored_sequence(ctx, boolean_semiring{}, rng, 5));
        REQUIRE(testgen::run_mirrored_sequence(ctx, minplus(25), rng, 5));
    }
}
