#include <doctest.h>

#include <cmath>
#include <set>

#include "chshkyber/rng.hpp"

using namespace chshkyber;

TEST_CASE("same seed, same stream") {
    DetRng a(seed_from_u64(42));
    DetRng b(seed_from_u64(42));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forks are independent of parent consumption") {
    DetRng a(seed_from_u64(7));
    DetRng b(seed_from_u64(7));
    for (int i = 0; i < 50; ++i) (void)a.next_u64();  // consume only from a
    DetRng fa = a.fork("x");
    DetRng fb = b.fork("x");
    for (int i = 0; i < 100; ++i) CHECK(fa.next_u64() == fb.next_u64());
}

TEST_CASE("distinct tags give distinct streams") {
    DetRng root(seed_from_u64(1));
    DetRng a = root.fork("a");
    DetRng b = root.fork("b");
    std::set<uint64_t> seen;
    for (int i = 0; i < 16; ++i) {
        seen.insert(a.next_u64());
        seen.insert(b.next_u64());
    }
    CHECK(seen.size() == 32);
}

TEST_CASE("uniform_below stays in range and covers small supports") {
    DetRng rng(seed_from_u64(3));
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        uint64_t x = rng.uniform_below(5);
        CHECK(x < 5);
        seen.insert(x);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("fair bits") {
    DetRng rng(seed_from_u64(9));
    const int n = 100000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += rng.bit();
    const double mean = double(ones) / n;
    CHECK(std::abs(mean - 0.5) < 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("shake256 matches a known vector") {
    // SHAKE256(""), first 8 bytes: 46 b9 dd 2b 0b a8 8d 13
    auto out = shake256({}, 8);
    const uint8_t expected[8] = {0x46, 0xb9, 0xdd, 0x2b, 0x0b, 0xa8, 0x8d, 0x13};
    for (int i = 0; i < 8; ++i) CHECK(out[size_t(i)] == expected[i]);
}
