#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dynrepset {

// Thrown when a requested computation would exceed a configured budget
// (rank ceiling, enumeration budget, brute-force size limit).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on malformed input files; carries a 1-based line number.
struct parse_error : std::runtime_error {
    int line;
    parse_error(const std::string& msg, int line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

// Outcome of a verification that may be too large to run exhaustively.
enum class verify_result { pass, fail, unverifiable };

inline const char* to_string(verify_result r) {
    switch (r) {
        case verify_result::pass: return "PASS";
        case verify_result::fail: return "FAIL";
        default: return "UNVERIFIABLE";
    }
}

// splitmix64; the fixed default seed makes every construction reproducible.
struct splitmix64 {
    std::uint64_t state;
    explicit splitmix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Unbiased-enough for family construction; bound > 0.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

// Subset of a universe [0, u) with u <= 128.
struct bitset128 {
    unsigned __int128 bits = 0;

    static constexpr int capacity = 128;

    constexpr bitset128() = default;
    constexpr explicit bitset128(unsigned __int128 raw) : bits(raw) {}

    static bitset128 singleton(int e) { return bitset128((unsigned __int128)1 << e); }

    bool test(int e) const { return (bits >> e) & 1; }
    void set(int e) { bits |= (unsigned __int128)1 << e; }
    void reset(int e) { bits &= ~((unsigned __int128)1 << e); }

    bool empty() const { return bits == 0; }
    int count() const {
        return __builtin_popcountll((std::uint64_t)bits) +
               __builtin_popcountll((std::uint64_t)(bits >> 64));
    }
    bool subset_of(bitset128 o) const { return (bits & ~o.bits) == 0; }
    bool intersects(bitset128 o) const { return (bits & o.bits) != 0; }

    std::uint64_t lo() const { return (std::uint64_t)bits; }
    std::uint64_t hi() const { return (std::uint64_t)(bits >> 64); }

    std::vector<int> elements() const {
        std::vector<int> out;
        for (int e = 0; e < capacity; ++e)
            if (test(e)) out.push_back(e);
        return out;
    }

    friend bitset128 operator&(bitset128 a, bitset128 b) { return bitset128(a.bits & b.bits); }
    friend bitset128 operator|(bitset128 a, bitset128 b) { return bitset128(a.bits | b.bits); }
    friend bitset128 operator^(bitset128 a, bitset128 b) { return bitset128(a.bits ^ b.bits); }
    friend bool operator==(bitset128 a, bitset128 b) { return a.bits == b.bits; }
    friend bool operator!=(bitset128 a, bitset128 b) { return a.bits != b.bits; }
    friend bool operator<(bitset128 a, bitset128 b) { return a.bits < b.bits; }
};

struct bitset128_hash {
    std::size_t operator()(bitset128 s) const {
        std::uint64_t x = s.lo() ^ (s.hi() * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return (std::size_t)x;
    }
};

// C(n, k) saturating at uint64 max.
inline std::uint64_t binom_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    constexpr std::uint64_t sat = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        std::uint64_t num = (std::uint64_t)(n - k + i);
        if (r > sat / num) return sat;
        r = r * num / i;
    }
    return r;
}

inline long double binom_ld(int n, int k) {
    if (k < 0 || k > n) return 0.0L;
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (long double)(n - k + i) / (long double)i;
    return r;
}

// Calls fn(elems) for every k-subset of [0, n), elems sorted ascending.
template <class Fn>
void for_each_subset_of_size(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(const_cast<const std::vector<int>&>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// All subsets of size 0..s, in order of increasing size.
template <class Fn>
void for_each_subset_up_to(int n, int s, Fn&& fn) {
    for (int k = 0; k <= s; ++k) for_each_subset_of_size(n, k, fn);
}

// Runs fn(begin, end) over [0, total) split into near-equal chunks, one per
// thread. Callers guarantee chunks write to disjoint state.
inline void parallel_for(int threads, std::size_t total, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (threads <= 1 || total <= 1) {
        fn(0, total);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>((std::size_t)threads, total);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t chunk = (total + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace dynrepset
