#include "chshkyber/mlwe.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace chshkyber {

void Params::validate() const {
    if (n < 1 || k < 1 || m < 1) throw std::invalid_argument("Params: n, k, m must be >= 1");
    if (!is_prime(q)) throw std::invalid_argument("Params: q must be prime");
    if (q <= 8 * eta) throw std::invalid_argument("Params: need q > 8*eta");
}

Params toy_params() {
    Params p;
    p.n = 4;
    p.k = 4;
    p.q = 97;
    p.eta = 2;
    p.m = 4096;
    p.seed = seed_from_u64(0);
    return p;
}

Params small_params() {
    Params p;
    p.n = 16;
    p.k = 16;
    p.q = 3329;
    p.eta = 2;
    p.m = 4096;
    p.seed = seed_from_u64(0);
    return p;
}

int32_t cbd_sample(uint32_t eta, DetRng& rng) {
    int32_t acc = 0;
    for (uint32_t i = 0; i < 2 * eta; ++i) acc += rng.bit();
    return acc - int32_t(eta);
}

ZqVec cbd_vec(size_t n, uint32_t q, uint32_t eta, DetRng& rng) {
    ZqVec out = zeros_vec(n, q);
    for (auto& e : out.v) e = mod_reduce(cbd_sample(eta, rng), q);
    return out;
}

KeyPair keygen(const Params& params, DetRng& rng) {
    params.validate();
    DetRng rng_A = rng.fork("keygen/A");
    DetRng rng_s = rng.fork("keygen/s");
    DetRng rng_e = rng.fork("keygen/e");
    KeyPair kp;
    kp.pk.A = uniform_mat(params.n, params.k, params.q, rng_A);
    kp.s = cbd_vec(params.k, params.q, params.eta, rng_s);
    kp.e = cbd_vec(params.n, params.q, params.eta, rng_e);
    kp.pk.t = vec_add(mat_vec(kp.pk.A, kp.s), kp.e);
    return kp;
}

EncapsResult encaps(const PublicKey& pk, const Params& params, DetRng& rng, BitString bits) {
    const uint32_t q = params.q;
    if (bits.empty()) {
        DetRng rng_msg = rng.fork("encaps/msg");
        bits.resize(kMessageBits);
        for (auto& b : bits) b = uint8_t(rng_msg.bit());
    }
    DetRng rng_r = rng.fork("encaps/r");
    DetRng rng_e1 = rng.fork("encaps/e1");
    DetRng rng_e2 = rng.fork("encaps/e2");

    EncapsResult res;
    res.bits = bits;
    res.r = cbd_vec(params.n, q, params.eta, rng_r);
    res.e1 = cbd_vec(params.k, q, params.eta, rng_e1);

    res.ct.q = q;
    res.ct.u = vec_add(mat_tvec(pk.A, res.r), res.e1);
    const uint32_t tr = dot(pk.t, res.r);
    const uint32_t half = q / 2;
    res.ct.v.reserve(bits.size());
    res.e2.reserve(bits.size());
    for (uint8_t b : bits) {
        const int32_t e2 = cbd_sample(params.eta, rng_e2);
        res.e2.push_back(e2);
        res.ct.v.push_back(mod_reduce(int64_t(tr) + e2 + int64_t(b) * half, q));
    }
    return res;
}

BitString decaps(const ZqVec& s, const Ciphertext& ct, const Params& params) {
    const uint32_t q = params.q;
    for (auto e : ct.u.v)
        if (e >= q) throw std::invalid_argument("decaps: ciphertext entry out of range");
    for (auto e : ct.v)
        if (e >= q) throw std::invalid_argument("decaps: ciphertext entry out of range");
    const uint32_t su = dot(s, ct.u);
    const int64_t half = q / 2;
    BitString bits;
    bits.reserve(ct.v.size());
    for (uint32_t v : ct.v) {
        // d centered to (-q/2, q/2]; decode by nearest of {0, floor(q/2)}
        const int64_t d = centered(mod_reduce(int64_t(v) - int64_t(su), q), q);
        const int64_t dist_half = std::min(std::abs(d - half), std::abs(d + half));
        bits.push_back(uint8_t(double(dist_half) < q / 4.0 ? 1 : 0));
    }
    return bits;
}

std::vector<uint8_t> serialize(const Ciphertext& ct) {
    std::vector<uint8_t> buf = serialize(ct.u);
    for (auto e : ct.v) {
        buf.push_back(uint8_t(e & 0xff));
        buf.push_back(uint8_t((e >> 8) & 0xff));
    }
    return buf;
}

std::vector<uint8_t> serialize(const PublicKey& pk) {
    std::vector<uint8_t> buf = serialize(pk.A);
    auto t = serialize(pk.t);
    buf.insert(buf.end(), t.begin(), t.end());
    return buf;
}

}  // namespace chshkyber
