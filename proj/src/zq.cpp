#include "chshkyber/zq.hpp"

#include <stdexcept>

namespace chshkyber {

ZqVec zeros_vec(size_t n, uint32_t q) {
    return ZqVec{std::vector<uint32_t>(n, 0), q};
}

ZqMat zeros_mat(size_t rows, size_t cols, uint32_t q) {
    return ZqMat{rows, cols, std::vector<uint32_t>(rows * cols, 0), q};
}

ZqVec uniform_vec(size_t n, uint32_t q, DetRng& rng) {
    ZqVec out = zeros_vec(n, q);
    for (auto& e : out.v) e = uint32_t(rng.uniform_below(q));
    return out;
}

ZqMat uniform_mat(size_t rows, size_t cols, uint32_t q, DetRng& rng) {
    ZqMat out = zeros_mat(rows, cols, q);
    for (auto& e : out.data) e = uint32_t(rng.uniform_below(q));
    return out;
}

ZqVec mat_vec(const ZqMat& M, const ZqVec& x) {
    if (M.cols != x.size() || M.q != x.q) throw std::invalid_argument("mat_vec: shape/modulus mismatch");
    ZqVec y = zeros_vec(M.rows, M.q);
    for (size_t r = 0; r < M.rows; ++r) {
        uint64_t acc = 0;
        for (size_t c = 0; c < M.cols; ++c) {
            acc += uint64_t(M.at(r, c)) * x[c] % M.q;
        }
        y[r] = uint32_t(acc % M.q);
    }
    return y;
}

ZqVec mat_tvec(const ZqMat& M, const ZqVec& x) {
    if (M.rows != x.size() || M.q != x.q) throw std::invalid_argument("mat_tvec: shape/modulus mismatch");
    ZqVec y = zeros_vec(M.cols, M.q);
    for (size_t c = 0; c < M.cols; ++c) {
        uint64_t acc = 0;
        for (size_t r = 0; r < M.rows; ++r) {
            acc += uint64_t(M.at(r, c)) * x[r] % M.q;
        }
        y[c] = uint32_t(acc % M.q);
    }
    return y;
}

ZqMat mat_mul(const ZqMat& A, const ZqMat& B) {
    if (A.cols != B.rows || A.q != B.q) throw std::invalid_argument("mat_mul: shape/modulus mismatch");
    ZqMat C = zeros_mat(A.rows, B.cols, A.q);
    for (size_t r = 0; r < A.rows; ++r) {
        for (size_t k = 0; k < A.cols; ++k) {
            const uint64_t a = A.at(r, k);
            if (a == 0) continue;
            for (size_t c = 0; c < B.cols; ++c) {
                C.at(r, c) = uint32_t((C.at(r, c) + a * B.at(k, c)) % A.q);
            }
        }
    }
    return C;
}

ZqVec vec_add(const ZqVec& a, const ZqVec& b) {
    if (a.size() != b.size() || a.q != b.q) throw std::invalid_argument("vec_add: shape/modulus mismatch");
    ZqVec y = zeros_vec(a.size(), a.q);
    for (size_t i = 0; i < a.size(); ++i) y[i] = uint32_t((uint64_t(a[i]) + b[i]) % a.q);
    return y;
}

uint32_t dot(const ZqVec& a, const ZqVec& b) {
    if (a.size() != b.size() || a.q != b.q) throw std::invalid_argument("dot: shape/modulus mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc += uint64_t(a[i]) * b[i] % a.q;
    return uint32_t(acc % a.q);
}

uint32_t pow_mod(uint64_t base, uint64_t exp, uint32_t q) {
    uint64_t result = 1 % q;
    base %= q;
    while (exp > 0) {
        if (exp & 1) result = result * base % q;
        base = base * base % q;
        exp >>= 1;
    }
    return uint32_t(result);
}

bool is_prime(uint32_t q) {
    if (q < 2) return false;
    for (uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

uint32_t det_mod_q(const ZqMat& M) {
    if (M.rows != M.cols) throw std::invalid_argument("det_mod_q: matrix not square");
    const uint32_t q = M.q;
    const size_t n = M.rows;
    std::vector<uint64_t> a(M.data.begin(), M.data.end());
    uint64_t det = 1 % q;
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        while (pivot < n && a[pivot * n + col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            for (size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            det = q - det;
            det %= q;
        }
        const uint64_t p = a[col * n + col];
        det = det * p % q;
        const uint64_t pinv = pow_mod(p, q - 2, q);  // q prime
        for (size_t r = col + 1; r < n; ++r) {
            const uint64_t factor = a[r * n + col] * pinv % q;
            if (factor == 0) continue;
            for (size_t c = col; c < n; ++c) {
                a[r * n + c] = (a[r * n + c] + (q - factor) * a[col * n + c]) % q;
            }
        }
    }
    return uint32_t(det);
}

static void push_u16(std::vector<uint8_t>& buf, uint32_t x) {
    buf.push_back(uint8_t(x & 0xff));
    buf.push_back(uint8_t((x >> 8) & 0xff));
}

std::vector<uint8_t> serialize(const ZqVec& x) {
    std::vector<uint8_t> buf;
    buf.reserve(2 * x.size());
    for (auto e : x.v) push_u16(buf, e);
    return buf;
}

std::vector<uint8_t> serialize(const ZqMat& m) {
    std::vector<uint8_t> buf;
    buf.reserve(2 * m.data.size());
    for (auto e : m.data) push_u16(buf, e);
    return buf;
}

}  // namespace chshkyber
