#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynrepset/util.hpp"

namespace dynrepset {

// Additively idempotent semirings. a + a = a induces the partial order
// a <= b  iff  a + b = a, under which zero() is the top element and
// bottom() (the sum of all elements) is the least. lcu2 is the join.
//
// |                 | add | mul      | zero | one | lcu | bottom |
// | boolean         | or  | and      |  0   |  1  | and |   1    |
// | capped min-plus | min | +, cap M | inf  |  0  | max |   0    |
template <class S>
concept semiring = requires(const S s, typename S::value_type a) {
    typename S::value_type;
    { s.zero() } -> std::same_as<typename S::value_type>;
    { s.one() } -> std::same_as<typename S::value_type>;
    { s.bottom() } -> std::same_as<typename S::value_type>;
    { s.add(a, a) } -> std::same_as<typename S::value_type>;
    { s.mul(a, a) } -> std::same_as<typename S::value_type>;
    { s.lcu2(a, a) } -> std::same_as<typename S::value_type>;
    { s.leq(a, a) } -> std::same_as<bool>;
};

struct boolean_semiring {
    using value_type = std::uint8_t;

    constexpr value_type zero() const { return 0; }
    constexpr value_type one() const { return 1; }
    constexpr value_type bottom() const { return 1; }
    constexpr value_type add(value_type a, value_type b) const { return a | b; }
    constexpr value_type mul(value_type a, value_type b) const { return a & b; }
    constexpr value_type lcu2(value_type a, value_type b) const { return a & b; }
    constexpr bool leq(value_type a, value_type b) const { return add(a, b) == a; }

    std::vector<value_type> elements() const { return {0, 1}; }
    std::string format(value_type v) const { return v ? "1" : "0"; }
};

// Min-plus with every value above the cap collapsed to infinity, which is
// the additive identity. The cap is fixed at construction; a cap above
// max/2 would let mul overflow before the saturation test, so it is refused.
template <class V = std::uint64_t>
class capped_minplus_semiring {
    V cap_;

  public:
    using value_type = V;

    static constexpr value_type infinity() { return std::numeric_limits<V>::max(); }

    explicit capped_minplus_semiring(V cap) : cap_(cap) {
        if (cap >= infinity() / 2)
            throw std::invalid_argument("capped min-plus: cap too large for the value type");
    }

    V cap() const { return cap_; }

    constexpr value_type zero() const { return infinity(); }
    constexpr value_type one() const { return 0; }
    constexpr value_type bottom() const { return 0; }
    value_type add(value_type a, value_type b) const { return std::min(a, b); }
    value_type mul(value_type a, value_type b) const {
        if (a == infinity() || b == infinity()) return infinity();
        V s = a + b;
        return s > cap_ ? infinity() : s;
    }
    value_type lcu2(value_type a, value_type b) const { return std::max(a, b); }
    bool leq(value_type a, value_type b) const { return add(a, b) == a; }

    // Canonical embedding of a non-negative integer.
    value_type from_integer(std::uint64_t x) const {
        return x > (std::uint64_t)cap_ ? infinity() : (value_type)x;
    }

    std::vector<value_type> elements() const {
        if (cap_ > 4096) throw resource_error("capped min-plus: element enumeration needs a small cap");
        std::vector<value_type> out;
        for (V v = 0; v <= cap_; ++v) out.push_back(v);
        out.push_back(infinity());
        return out;
    }
    std::string format(value_type v) const {
        return v == infinity() ? "INF" : std::to_string((std::uint64_t)v);
    }
};

// lcu of a sequence; the empty sequence yields the order's bottom element.
template <semiring S, class It>
typename S::value_type lcu(const S& sr, It first, It last) {
    typename S::value_type acc = sr.bottom();
    for (; first != last; ++first) acc = sr.lcu2(acc, *first);
    return acc;
}

template <semiring S>
typename S::value_type lcu(const S& sr, const std::vector<typename S::value_type>& xs) {
    return lcu(sr, xs.begin(), xs.end());
}

// Runtime selection for the CLI; library code is templated on the semiring.
struct semiring_choice {
    enum class kind { boolean, minplus };
    kind which = kind::minplus;
    std::uint64_t cap = 0;  // 0 = derive from the instance
};

inline semiring_choice::kind parse_semiring_kind(const std::string& name) {
    if (name == "boolean") return semiring_choice::kind::boolean;
    if (name == "minplus") return semiring_choice::kind::minplus;
    throw std::invalid_argument("unknown semiring '" + name + "' (expected boolean|minplus)");
}

}  // namespace dynrepset
