#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace chshkyber {

using Seed = std::array<uint8_t, 32>;

// SHAKE256 with explicit output length.
std::vector<uint8_t> shake256(std::span<const uint8_t> input, size_t outlen);

// Domain-separated hash helpers. The domain tag is absorbed before the data,
// length-prefixed, so distinct domains can never collide.
Seed hash32(std::string_view domain, std::span<const uint8_t> data);
Seed hash32(std::string_view domain, std::initializer_list<std::span<const uint8_t>> parts);

Seed seed_from_u64(uint64_t x);

// Deterministic, splittable RNG. The 32-byte seed is retained so that forks
// derive from the seed (via SHAKE256), not from consumed stream state.
// The output stream itself is xoshiro256++ keyed from the seed.
class DetRng {
public:
    explicit DetRng(const Seed& seed);
    DetRng(const Seed& seed, std::string_view domain);

    // Child stream keyed by (seed, tag); independent of draws made so far.
    DetRng fork(std::string_view tag) const;
    DetRng fork(std::string_view tag, uint64_t index) const;

    uint64_t next_u64();
    // One fair bit.
    int bit();
    // Uniform in [0, bound) by rejection.
    uint64_t uniform_below(uint64_t bound);
    // Uniform in [0, 1).
    double uniform_real();

    const Seed& seed() const { return seed_; }

private:
    Seed seed_;
    std::array<uint64_t, 4> state_;
    uint64_t bit_buf_ = 0;
    int bits_left_ = 0;
};

}  // namespace chshkyber
