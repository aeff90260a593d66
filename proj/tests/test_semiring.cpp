#include <catch2/catch_amalgamated.hpp>

#include "dynrepset/semiring.hpp"

using namespace dynrepset;

namespace {

template <semiring S>
void check_axioms(const S& sr, const std::vector<typename S::value_type>& elems) {
    for (auto a : elems) {
        REQUIRE(sr.add(a, a) == a);  // idempotency
        REQUIRE(sr.add(a, sr.zero()) == a);
        REQUIRE(sr.mul(a, sr.one()) == a);
        REQUIRE(sr.mul(sr.one(), a) == a);
        REQUIRE(sr.mul(a, sr.zero()) == sr.zero());
        REQUIRE(sr.mul(sr.zero(), a) == sr.zero());
        for (auto b : elems) {
            REQUIRE(sr.add(a, b) == sr.add(b, a));
            for (auto c : elems) {
                REQUIRE(sr.add(sr.add(a, b), c) == sr.add(a, sr.add(b, c)));
                REQUIRE(sr.mul(sr.mul(a, b), c) == sr.mul(a, sr.mul(b, c)));
                REQUIRE(sr.mul(a, sr.add(b, c)) == sr.add(sr.mul(a, b), sr.mul(a, c)));
                REQUIRE(sr.mul(sr.add(a, b), c) == sr.add(sr.mul(a, c), sr.mul(b, c)));
            }
        }
    }
}

template <semiring S>
void check_order(const S& sr, const std::vector<typename S::value_type>& elems) {
    for (auto a : elems) {
        REQUIRE(sr.leq(a, a));
        for (auto b : elems) {
            if (sr.leq(a, b) && sr.leq(b, a)) REQUIRE(a == b);
            for (auto c : elems)
                if (sr.leq(a, b) && sr.leq(b, c)) REQUIRE(sr.leq(a, c));
        }
    }
}

}  // namespace

TEST_CASE("boolean semiring operation tables", "[semiring]") {
    boolean_semiring sr;
    REQUIRE(sr.add(1, 0) == 1);  // or
    REQUIRE(sr.mul(1, 1) == 1);  // and
    REQUIRE(sr.mul(1, 0) == 0);
    REQUIRE(sr.leq(1, 0));  // 1 + 0 = 1, so 1 precedes 0
    REQUIRE_FALSE(sr.leq(0, 1));
    REQUIRE(lcu(sr, {sr.one(), sr.one()}) == sr.one());
    REQUIRE(sr.bottom() == sr.one());
}

TEST_CASE("capped min-plus operation tables", "[semiring]") {
    capped_minplus_semiring<std::uint64_t> sr(10);
    auto inf = sr.zero();
    REQUIRE(sr.add(3, 7) == 3);
    REQUIRE(sr.add(inf, inf) == inf);
    REQUIRE(sr.mul(4, 5) == 9);
    REQUIRE(sr.mul(6, 6) == inf);  // 12 > cap, mapped to infinity
    REQUIRE(sr.leq(3, 7));
    for (auto x : sr.elements()) REQUIRE(sr.leq(x, inf));  // zero is the top
    REQUIRE(lcu(sr, {std::uint64_t(2), std::uint64_t(9), std::uint64_t(4)}) == 9);
}

TEST_CASE("empty lcu is the order bottom, the sum of all elements", "[semiring]") {
    capped_minplus_semiring<std::uint64_t> sr(20);
    std::vector<std::uint64_t> none;
    REQUIRE(lcu(sr, none) == 0);
    auto folded = sr.zero();
    for (auto x : sr.elements()) folded = sr.add(folded, x);
    REQUIRE(folded == sr.bottom());
    REQUIRE(lcu(sr, none) == sr.bottom());

    boolean_semiring bs;
    std::vector<boolean_semiring::value_type> bnone;
    auto bfolded = bs.zero();
    for (auto x : bs.elements()) bfolded = bs.add(bfolded, x);
    REQUIRE(lcu(bs, bnone) == bfolded);
}

TEST_CASE("semiring axioms by enumeration", "[semiring]") {
    boolean_semiring bs;
    check_axioms(bs, bs.elements());
    check_order(bs, bs.elements());

    capped_minplus_semiring<std::uint64_t> ms(6);
    check_axioms(ms, ms.elements());

    capped_minplus_semiring<std::uint64_t> ms20(20);
    check_order(ms20, ms20.elements());
}

TEST_CASE("lcu is the least upper bound on enumerated elements", "[semiring]") {
    capped_minplus_semiring<std::uint64_t> sr(12);
    auto elems = sr.elements();
    splitmix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> xs;
        int m = 1 + (int)rng.below(5);
        for (int i = 0; i < m; ++i) xs.push_back(elems[rng.below(elems.size())]);
        auto up = lcu(sr, xs);
        for (auto x : xs) REQUIRE(sr.leq(x, up));
        for (auto y : elems) {
            bool bounds_all = true;
            for (auto x : xs) bounds_all = bounds_all && sr.leq(x, y);
            if (bounds_all) REQUIRE(sr.leq(up, y));
        }
    }
}

TEST_CASE("cap cannot overflow multiplication", "[semiring]") {
    REQUIRE_THROWS_AS(capped_minplus_semiring<std::uint64_t>(~std::uint64_t(0) - 1), std::invalid_argument);
}
