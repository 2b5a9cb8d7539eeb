#pragma once

#include <cstdint>
#include <vector>

#include "chshkyber/rng.hpp"

namespace chshkyber {

// Vector over Z_q, entries kept in canonical range [0, q).
struct ZqVec {
    std::vector<uint32_t> v;
    uint32_t q = 0;

    size_t size() const { return v.size(); }
    uint32_t operator[](size_t i) const { return v[i]; }
    uint32_t& operator[](size_t i) { return v[i]; }

    bool operator==(const ZqVec&) const = default;
};

// Row-major matrix over Z_q.
struct ZqMat {
    size_t rows = 0, cols = 0;
    std::vector<uint32_t> data;
    uint32_t q = 0;

    uint32_t at(size_t r, size_t c) const { return data[r * cols + c]; }
    uint32_t& at(size_t r, size_t c) { return data[r * cols + c]; }

    bool operator==(const ZqMat&) const = default;
};

inline uint32_t mod_reduce(int64_t x, uint32_t q) {
    int64_t r = x % int64_t(q);
    if (r < 0) r += q;
    return uint32_t(r);
}

// Centered lift to (-q/2, q/2].
inline int64_t centered(uint32_t x, uint32_t q) {
    int64_t c = int64_t(x);
    if (c > int64_t(q) / 2) c -= int64_t(q);
    return c;
}

ZqVec zeros_vec(size_t n, uint32_t q);
ZqMat zeros_mat(size_t rows, size_t cols, uint32_t q);

ZqVec uniform_vec(size_t n, uint32_t q, DetRng& rng);
ZqMat uniform_mat(size_t rows, size_t cols, uint32_t q, DetRng& rng);

// y = M x mod q
ZqVec mat_vec(const ZqMat& M, const ZqVec& x);
// y = M^T x mod q
ZqVec mat_tvec(const ZqMat& M, const ZqVec& x);
ZqMat mat_mul(const ZqMat& A, const ZqMat& B);
ZqVec vec_add(const ZqVec& a, const ZqVec& b);
uint32_t dot(const ZqVec& a, const ZqVec& b);

// Determinant modulo prime q via Gaussian elimination over the field Z_q.
uint32_t det_mod_q(const ZqMat& M);

uint32_t pow_mod(uint64_t base, uint64_t exp, uint32_t q);
bool is_prime(uint32_t q);

// Canonical little-endian serialization, 16 bits per coefficient (q < 2^16).
std::vector<uint8_t> serialize(const ZqVec& x);
std::vector<uint8_t> serialize(const ZqMat& m);

}  // namespace chshkyber
