#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dynrepset/pseudorandom.hpp"

using namespace dynrepset;

TEST_CASE("literal prefix splitting", "[pseudorandom]") {
    // identity on a 4-element universe with 4 blocks: {0,2} lands in blocks
    // 0 and 2, which is not a prefix pattern
    std::vector<std::uint16_t> ident{0, 1, 2, 3};
    std::vector<int> s02{0, 2};
    REQUIRE_FALSE(splits(ident, 4, s02));
    std::vector<int> s01{0, 1};
    REQUIRE(splits(ident, 4, s01));

    // halving map: counts (1,1), every block exactly k/ell
    std::vector<std::uint16_t> halves{0, 0, 1, 1};
    REQUIRE(splits(halves, 2, s02));

    // constant map: counts (2,0) but ceil = floor = 1
    std::vector<std::uint16_t> constant{0, 0, 0, 0};
    REQUIRE_FALSE(splits(constant, 2, s01));

    // balanced_split ignores block order
    REQUIRE(balanced_split(ident, 4, s02));
    REQUIRE_FALSE(balanced_split(constant, 2, s01));
}

TEST_CASE("outer splitter construction", "[pseudorandom]") {
    SECTION("n = k^2: one injective function suffices") {
        auto fam = build_outer_splitter(16, 4);
        REQUIRE(fam.size() == 1);
        REQUIRE(verify_splitter(fam) == verify_result::pass);
    }
    SECTION("n=5 k=2: every pair gets an injective function") {
        auto fam = build_outer_splitter(5, 2);
        REQUIRE(verify_splitter(fam) == verify_result::pass);
        for_each_subset_of_size(5, 2, [&](const std::vector<int>& s) {
            bool injective_somewhere = false;
            for (const auto& h : fam.functions) injective_somewhere = injective_somewhere || h[s[0]] != h[s[1]];
            REQUIRE(injective_somewhere);
        });
    }
    SECTION("n=1 k=1 degenerates to a single constant function") {
        auto fam = build_outer_splitter(1, 1);
        REQUIRE(fam.size() == 1);
        REQUIRE(verify_splitter(fam) == verify_result::pass);
    }
}

TEST_CASE("inner splitter construction", "[pseudorandom]") {
    SECTION("u = k: the unique k-set needs one balanced map") {
        auto fam = build_inner_splitter(4, 4, 2);
        REQUIRE(verify_splitter(fam) == verify_result::pass);
        REQUIRE(fam.size() == 1);
    }
    SECTION("u=16 k=4 s=2, exhaustive over all 1820 subsets") {
        auto fam = build_inner_splitter(16, 4, 2);
        REQUIRE(verify_splitter(fam) == verify_result::pass);
    }
    SECTION("a hand-checked balanced map splits the full set") {
        std::vector<std::uint16_t> h{0, 0, 1, 1};
        std::vector<int> all{0, 1, 2, 3};
        REQUIRE(balanced_split(h, 2, all));
    }
    REQUIRE_THROWS_AS(build_inner_splitter(16, 5, 2, {}), std::invalid_argument);
}

TEST_CASE("universal family construction", "[pseudorandom]") {
    SECTION("u=2 s=1") {
        auto fam = build_universal_family(2, 1);
        REQUIRE(verify_universal(fam) == verify_result::pass);
    }
    SECTION("u = s: traces must be the full power set") {
        auto fam = build_universal_family(3, 3);
        REQUIRE(verify_universal(fam) == verify_result::pass);
        REQUIRE(fam.size() == 8);
    }
    SECTION("u=16 s=2 exhaustive") {
        auto fam = build_universal_family(16, 2);
        REQUIRE(verify_universal(fam) == verify_result::pass);
    }
}

TEST_CASE("verifiers reject broken families", "[pseudorandom]") {
    splitter_family constant;
    constant.n = 4;
    constant.k = 2;
    constant.ell = 2;
    constant.functions = {{0, 0, 0, 0}};
    REQUIRE(verify_splitter(constant) == verify_result::fail);

    universal_family empty_only;
    empty_only.u = 1;
    empty_only.s = 1;
    empty_only.sets = {bitset128{}};
    REQUIRE(verify_universal(empty_only) == verify_result::fail);  // trace {0} never appears
}

TEST_CASE("verification budget produces a distinct outcome", "[pseudorandom]") {
    auto fam = build_outer_splitter(12, 3);
    REQUIRE(verify_splitter(fam, 1) == verify_result::unverifiable);
    REQUIRE(verify_splitter(fam) == verify_result::pass);
    auto uni = build_universal_family(16, 2);
    REQUIRE(verify_universal(uni, 1) == verify_result::unverifiable);
}

TEST_CASE("estimator mode still yields verifiable families in-range", "[pseudorandom]") {
    family_build_options opt;
    opt.exact_budget = 50;  // force the multiplicative estimator
    auto fam = build_outer_splitter(12, 3, opt);
    REQUIRE(verify_splitter(fam) == verify_result::pass);
}

TEST_CASE("families round-trip through the cache format byte-identically", "[pseudorandom]") {
    auto fam = build_outer_splitter(9, 3);
    std::ostringstream first;
    write_family(first, fam);
    std::istringstream back(first.str());
    auto reread = read_splitter(back);
    std::ostringstream second;
    write_family(second, reread);
    REQUIRE(first.str() == second.str());

    auto uni = build_universal_family(16, 2);
    std::ostringstream ufirst;
    write_family(ufirst, uni);
    std::istringstream uback(ufirst.str());
    auto ureread = read_universal(uback);
    std::ostringstream usecond;
    write_family(usecond, ureread);
    REQUIRE(ufirst.str() == usecond.str());
}

TEST_CASE("family files reject malformed input", "[pseudorandom]") {
    std::istringstream bad("splitter 4 2 2 1\n0 0 9 0\n");
    REQUIRE_THROWS_AS(read_splitter(bad), parse_error);
    std::istringstream badu("universal 4 2 1\nzz\n");
    REQUIRE_THROWS_AS(read_universal(badu), parse_error);
}
