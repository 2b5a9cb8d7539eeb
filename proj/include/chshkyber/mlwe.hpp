#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chshkyber/rng.hpp"
#include "chshkyber/zq.hpp"

namespace chshkyber {

// Number of message bits carried by one encapsulation.
inline constexpr size_t kMessageBits = 256;

struct Params {
    size_t n = 0;   // row dimension
    size_t k = 0;   // column dimension
    uint32_t q = 0; // prime modulus
    uint32_t eta = 0; // CBD parameter; 0 is the zero-noise testing hook
    size_t m = 0;   // EPR pair count per session
    Seed seed{};

    void validate() const;
};

Params toy_params();    // n=k=4,  q=97,   eta=2
Params small_params();  // n=k=16, q=3329, eta=2

struct PublicKey {
    ZqMat A;  // n x k
    ZqVec t;  // length n
};

struct KeyPair {
    PublicKey pk;
    ZqVec s;  // length k
    ZqVec e;  // retained transiently so the generation invariant is checkable
};

struct Ciphertext {
    ZqVec u;                  // length k
    std::vector<uint32_t> v;  // one scalar per message bit
    uint32_t q = 0;

    bool operator==(const Ciphertext&) const = default;
};

using BitString = std::vector<uint8_t>;  // entries 0/1

// Centered binomial draw: (sum of 2*eta fair bits) - eta.
int32_t cbd_sample(uint32_t eta, DetRng& rng);
ZqVec cbd_vec(size_t n, uint32_t q, uint32_t eta, DetRng& rng);

KeyPair keygen(const Params& params, DetRng& rng);

struct EncapsResult {
    Ciphertext ct;
    BitString bits;
    // Noise audit values |e.r - s.e1 + e2| are recoverable from these.
    ZqVec r;
    ZqVec e1;
    std::vector<int32_t> e2;
};

// Encapsulates the given bits (random bits when empty).
EncapsResult encaps(const PublicKey& pk, const Params& params, DetRng& rng,
                    BitString bits = {});

BitString decaps(const ZqVec& s, const Ciphertext& ct, const Params& params);

std::vector<uint8_t> serialize(const Ciphertext& ct);
std::vector<uint8_t> serialize(const PublicKey& pk);

}  // namespace chshkyber
