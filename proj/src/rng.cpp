#include "chshkyber/rng.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace chshkyber {

std::vector<uint8_t> shake256(std::span<const uint8_t> input, size_t outlen) {
    std::vector<uint8_t> out(outlen);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx ||
        EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, input.data(), input.size()) != 1 ||
        EVP_DigestFinalXOF(ctx, out.data(), out.size()) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("shake256 failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

static void append_u64(std::vector<uint8_t>& buf, uint64_t x) {
    for (int i = 0; i < 8; ++i) buf.push_back(uint8_t(x >> (8 * i)));
}

Seed hash32(std::string_view domain, std::initializer_list<std::span<const uint8_t>> parts) {
    std::vector<uint8_t> buf;
    append_u64(buf, domain.size());
    buf.insert(buf.end(), domain.begin(), domain.end());
    for (auto p : parts) {
        append_u64(buf, p.size());
        buf.insert(buf.end(), p.begin(), p.end());
    }
    auto h = shake256(buf, 32);
    Seed s;
    std::memcpy(s.data(), h.data(), 32);
    return s;
}

Seed hash32(std::string_view domain, std::span<const uint8_t> data) {
    return hash32(domain, {data});
}

Seed seed_from_u64(uint64_t x) {
    std::array<uint8_t, 8> b{};
    for (int i = 0; i < 8; ++i) b[size_t(i)] = uint8_t(x >> (8 * i));
    return hash32("seed-u64", std::span<const uint8_t>(b));
}

static inline uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

DetRng::DetRng(const Seed& seed) : seed_(seed) {
    auto expanded = shake256(seed, 32);
    std::memcpy(state_.data(), expanded.data(), 32);
    // xoshiro must not start from the all-zero state
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

DetRng::DetRng(const Seed& seed, std::string_view domain)
    : DetRng(hash32(domain, std::span<const uint8_t>(seed))) {}

DetRng DetRng::fork(std::string_view tag) const {
    return DetRng(seed_, tag);
}

DetRng DetRng::fork(std::string_view tag, uint64_t index) const {
    std::array<uint8_t, 8> b{};
    for (int i = 0; i < 8; ++i) b[size_t(i)] = uint8_t(index >> (8 * i));
    std::vector<uint8_t> tagged(tag.begin(), tag.end());
    return DetRng(hash32("fork-indexed",
                         {std::span<const uint8_t>(seed_), std::span<const uint8_t>(tagged),
                          std::span<const uint8_t>(b)}));
}

uint64_t DetRng::next_u64() {
    // xoshiro256++
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

int DetRng::bit() {
    if (bits_left_ == 0) {
        bit_buf_ = next_u64();
        bits_left_ = 64;
    }
    int b = int(bit_buf_ & 1);
    bit_buf_ >>= 1;
    --bits_left_;
    return b;
}

uint64_t DetRng::uniform_below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

double DetRng::uniform_real() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace chshkyber
