#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chshkyber/mlwe.hpp"
#include "chshkyber/rng.hpp"
#include "chshkyber/zq.hpp"

namespace chshkyber {

struct StateSpaceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotStochastic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotInvertible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// PRF-driven evolution: s' = H(s), A' = psi(A), t' = A's' + e'.

struct PrfState {
    Seed key_H{};
    Seed key_psi{};
    uint64_t counter = 0;
};

struct LweState {
    ZqVec s;
    ZqMat A;
    ZqVec t;
};

// Keyed-hash expansion of a byte string to Z_q values by rejection sampling.
ZqVec expand_to_vec(const Seed& key, std::string_view domain, uint64_t counter,
                    std::span<const uint8_t> input, size_t n, uint32_t q);

LweState prf_evolve(const LweState& x, PrfState& prf, const Params& params, DetRng& rng);

// ---------------------------------------------------------------------------
// Markov evolution: s' = M s + e mod q.

struct NoiseSpec {
    enum class Kind { Cbd, Uniform, Table };
    Kind kind = Kind::Cbd;
    uint32_t eta = 2;                  // Cbd
    std::map<int64_t, double> table;   // Table: signed offset -> probability

    static NoiseSpec cbd(uint32_t eta) { return NoiseSpec{Kind::Cbd, eta, {}}; }
    static NoiseSpec uniform() { return NoiseSpec{Kind::Uniform, 0, {}}; }
    static NoiseSpec from_table(std::map<int64_t, double> t);

    // Per-coordinate law folded onto residues [0, q).
    std::vector<double> residue_probs(uint32_t q) const;
    int64_t sample(uint32_t q, DetRng& rng) const;
    bool full_support(uint32_t q) const;
    std::string describe() const;
};

struct ChainSpec {
    ZqMat M;  // n x n
    uint32_t q = 0;
    size_t n = 0;
    NoiseSpec noise;
};

inline constexpr size_t kKernelStateCap = 4096;

struct KernelMatrix {
    size_t size = 0;  // q^n states
    size_t n = 0;
    uint32_t q = 0;
    std::vector<double> p;  // row-major, row-stochastic

    double at(size_t i, size_t j) const { return p[i * size + j]; }
};

ZqVec markov_step(const ZqVec& s, const ChainSpec& spec, DetRng& rng);

struct PrimitivityResult {
    bool primitive = false;
    size_t primitive_at = 0;  // smallest k with all entries of M^k nonzero mod q
};

// Smallest k <= k_max with every entry of M^k mod q nonzero; inconclusive otherwise.
PrimitivityResult check_primitive(const ZqMat& M, uint32_t q, size_t k_max);

KernelMatrix build_kernel(const ChainSpec& spec, size_t cap = kKernelStateCap);

struct SpectralReport {
    std::vector<double> eigenvalue_magnitudes;  // sorted descending
    double gap = 0.0;  // 1 - max{|lambda_2|, |lambda_n|}
    double epsilon = 0.0;
    long tau_mix_bound = 0;       // ceil(log(1/eps)/gap), nominal
    long tau_mix_empirical = -1;  // smallest t with max-row TV distance <= eps; -1 if not reached
    bool irreducible = false;
    bool aperiodic = false;
    std::vector<double> stationary;
};

SpectralReport spectral_report(const KernelMatrix& kernel, double epsilon);

struct ErgodicityReport {
    PrimitivityResult primitivity;  // Theorem premise (a)
    bool noise_full_support = false;  // (b)
    double gap = 0.0;
    double poly_threshold = 0.0;
    bool gap_ok = false;  // (c)
    bool certified = false;
};

ErgodicityReport verify_ergodicity(const ChainSpec& spec, double poly_threshold,
                                   size_t primitivity_k_max = 0);

struct NoiseAccumReport {
    size_t horizon = 0;
    double threshold = 0.0;  // q/4
    // Per t in [1, T]: ||centered(M^t mod q)||_inf-induced * eta
    std::vector<double> worst_case_bound;
    double worst_case_max = 0.0;
    bool worst_case_pass = false;
    double monte_carlo_max = 0.0;  // max_t ||centered(M^t) e||_inf over sampled e
    bool monte_carlo_pass = false;
    size_t first_fail_t = 0;  // 0 when worst case never fails
};

NoiseAccumReport noise_accumulation_check(const ZqMat& M, const Params& params, size_t T,
                                          size_t mc_trials = 1000);

}  // namespace chshkyber
