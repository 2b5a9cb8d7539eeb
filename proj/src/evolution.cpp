#include "chshkyber/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numeric>

namespace chshkyber {

// ---------------------------------------------------------------------------
// PRF evolution

namespace {

// Counter-block XOF stream over SHAKE256.
class XofStream {
public:
    explicit XofStream(std::vector<uint8_t> msg) : msg_(std::move(msg)) {}

    uint16_t next_u16() {
        if (pos_ + 2 > buf_.size()) refill();
        uint16_t x = uint16_t(buf_[pos_]) | uint16_t(buf_[pos_ + 1]) << 8;
        pos_ += 2;
        return x;
    }

private:
    void refill() {
        std::vector<uint8_t> m = msg_;
        for (int i = 0; i < 8; ++i) m.push_back(uint8_t(block_ >> (8 * i)));
        ++block_;
        buf_ = shake256(m, 136);
        pos_ = 0;
    }

    std::vector<uint8_t> msg_;
    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
    uint64_t block_ = 0;
};

std::vector<uint8_t> prf_message(const Seed& key, std::string_view domain, uint64_t counter,
                                 std::span<const uint8_t> input) {
    std::vector<uint8_t> msg;
    auto append_u64 = [&msg](uint64_t x) {
        for (int i = 0; i < 8; ++i) msg.push_back(uint8_t(x >> (8 * i)));
    };
    append_u64(key.size());
    msg.insert(msg.end(), key.begin(), key.end());
    append_u64(domain.size());
    msg.insert(msg.end(), domain.begin(), domain.end());
    append_u64(counter);
    append_u64(input.size());
    msg.insert(msg.end(), input.begin(), input.end());
    return msg;
}

}  // namespace

ZqVec expand_to_vec(const Seed& key, std::string_view domain, uint64_t counter,
                    std::span<const uint8_t> input, size_t n, uint32_t q) {
    XofStream xof(prf_message(key, domain, counter, input));
    const uint32_t limit = q * (65536u / q);  // rejection bound for unbiased mod q
    ZqVec out = zeros_vec(n, q);
    for (auto& e : out.v) {
        uint32_t x;
        do {
            x = xof.next_u16();
        } while (x >= limit);
        e = x % q;
    }
    return out;
}

LweState prf_evolve(const LweState& x, PrfState& prf, const Params& params, DetRng& rng) {
    const uint32_t q = params.q;
    LweState next;
    next.s = expand_to_vec(prf.key_H, "evolve/H", prf.counter, serialize(x.s), x.s.size(), q);
    ZqVec flat = expand_to_vec(prf.key_psi, "evolve/psi", prf.counter, serialize(x.A),
                               x.A.rows * x.A.cols, q);
    next.A = ZqMat{x.A.rows, x.A.cols, std::move(flat.v), q};
    DetRng rng_e = rng.fork("evolve/e", prf.counter);
    ZqVec e = cbd_vec(x.A.rows, q, params.eta, rng_e);
    next.t = vec_add(mat_vec(next.A, next.s), e);
    ++prf.counter;
    return next;
}

// ---------------------------------------------------------------------------
// Noise laws

NoiseSpec NoiseSpec::from_table(std::map<int64_t, double> t) {
    double sum = 0.0;
    for (auto& [_, p] : t) {
        if (p < 0) throw std::invalid_argument("NoiseSpec: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("NoiseSpec: probabilities must sum to 1");
    NoiseSpec s;
    s.kind = Kind::Table;
    s.table = std::move(t);
    return s;
}

std::vector<double> NoiseSpec::residue_probs(uint32_t q) const {
    std::vector<double> p(q, 0.0);
    switch (kind) {
        case Kind::Cbd: {
            // C(2*eta, x+eta) / 4^eta; dyadic, so the fold sums to exactly 1
            const uint32_t bits = 2 * eta;
            double coeff = std::ldexp(1.0, -int(bits));  // C(2eta, 0)/4^eta
            for (uint32_t j = 0; j <= bits; ++j) {
                const int64_t x = int64_t(j) - eta;
                p[mod_reduce(x, q)] += coeff;
                coeff = coeff * double(bits - j) / double(j + 1);
            }
            break;
        }
        case Kind::Uniform:
            std::fill(p.begin(), p.end(), 1.0 / q);
            break;
        case Kind::Table:
            for (auto& [x, prob] : table) p[mod_reduce(x, q)] += prob;
            break;
    }
    return p;
}

int64_t NoiseSpec::sample(uint32_t q, DetRng& rng) const {
    switch (kind) {
        case Kind::Cbd:
            return cbd_sample(eta, rng);
        case Kind::Uniform:
            return int64_t(rng.uniform_below(q));
        case Kind::Table: {
            double u = rng.uniform_real();
            for (auto& [x, prob] : table) {
                if (u < prob) return x;
                u -= prob;
            }
            return table.rbegin()->first;
        }
    }
    return 0;
}

bool NoiseSpec::full_support(uint32_t q) const {
    auto p = residue_probs(q);
    return std::all_of(p.begin(), p.end(), [](double x) { return x > 0.0; });
}

std::string NoiseSpec::describe() const {
    switch (kind) {
        case Kind::Cbd:
            return "cbd:" + std::to_string(eta);
        case Kind::Uniform:
            return "uniform";
        case Kind::Table:
            return "table[" + std::to_string(table.size()) + "]";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Markov kernel

ZqVec markov_step(const ZqVec& s, const ChainSpec& spec, DetRng& rng) {
    ZqVec next = mat_vec(spec.M, s);
    for (auto& e : next.v) e = mod_reduce(int64_t(e) + spec.noise.sample(spec.q, rng), spec.q);
    return next;
}

PrimitivityResult check_primitive(const ZqMat& M, uint32_t q, size_t k_max) {
    if (M.rows != M.cols) throw std::invalid_argument("check_primitive: matrix not square");
    ZqMat P = M;
    for (size_t k = 1; k <= k_max; ++k) {
        const bool all_nonzero =
            std::all_of(P.data.begin(), P.data.end(), [](uint32_t e) { return e != 0; });
        if (all_nonzero) return PrimitivityResult{true, k};
        P = mat_mul(P, M);
    }
    return PrimitivityResult{false, 0};
}

static size_t state_count_checked(const ChainSpec& spec, size_t cap) {
    size_t count = 1;
    for (size_t i = 0; i < spec.n; ++i) {
        if (count > cap / spec.q) throw StateSpaceTooLarge("q^n exceeds kernel cap");
        count *= spec.q;
    }
    if (count > cap) throw StateSpaceTooLarge("q^n exceeds kernel cap");
    return count;
}

KernelMatrix build_kernel(const ChainSpec& spec, size_t cap) {
    const size_t size = state_count_checked(spec, cap);
    const uint32_t q = spec.q;
    const size_t n = spec.n;
    const auto rp = spec.noise.residue_probs(q);

    KernelMatrix K;
    K.size = size;
    K.n = n;
    K.q = q;
    K.p.assign(size * size, 0.0);

    ZqVec s = zeros_vec(n, q);
    for (size_t i = 0; i < size; ++i) {
        // decode state i in base q, least-significant coordinate first
        size_t rem = i;
        for (size_t c = 0; c < n; ++c) {
            s[c] = uint32_t(rem % q);
            rem /= q;
        }
        const ZqVec ms = mat_vec(spec.M, s);
        for (size_t j = 0; j < size; ++j) {
            double prob = 1.0;
            size_t rj = j;
            for (size_t c = 0; c < n && prob > 0.0; ++c) {
                const uint32_t sc = uint32_t(rj % q);
                rj /= q;
                prob *= rp[mod_reduce(int64_t(sc) - int64_t(ms[c]), q)];
            }
            K.p[i * size + j] = prob;
        }
    }
    return K;
}

// ---------------------------------------------------------------------------
// Spectral analysis

namespace {

// Reachability over the positive-entry digraph.
std::vector<char> reachable(const KernelMatrix& K, size_t start, bool transpose) {
    std::vector<char> seen(K.size, 0);
    std::deque<size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
        const size_t u = queue.front();
        queue.pop_front();
        for (size_t v = 0; v < K.size; ++v) {
            const double w = transpose ? K.at(v, u) : K.at(u, v);
            if (w > 0.0 && !seen[v]) {
                seen[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

// Period of the component containing state 0: gcd of d[u]+1-d[v] over edges
// inside the component, with d the BFS distance from 0.
long chain_period(const KernelMatrix& K) {
    auto fwd = reachable(K, 0, false);
    auto bwd = reachable(K, 0, true);
    std::vector<char> comp(K.size, 0);
    for (size_t i = 0; i < K.size; ++i) comp[i] = fwd[i] && bwd[i];

    std::vector<long> dist(K.size, -1);
    std::deque<size_t> queue{0};
    dist[0] = 0;
    while (!queue.empty()) {
        const size_t u = queue.front();
        queue.pop_front();
        for (size_t v = 0; v < K.size; ++v) {
            if (K.at(u, v) > 0.0 && comp[v] && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    long g = 0;
    for (size_t u = 0; u < K.size; ++u) {
        if (!comp[u] || dist[u] < 0) continue;
        for (size_t v = 0; v < K.size; ++v) {
            if (K.at(u, v) > 0.0 && comp[v] && dist[v] >= 0) {
                g = std::gcd(g, std::abs(dist[u] + 1 - dist[v]));
            }
        }
    }
    return g == 0 ? 1 : g;
}

}  // namespace

SpectralReport spectral_report(const KernelMatrix& kernel, double epsilon) {
    const size_t size = kernel.size;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> P(
        kernel.p.data(), long(size), long(size));

    for (size_t i = 0; i < size; ++i) {
        if (std::abs(P.row(long(i)).sum() - 1.0) > 1e-8)
            throw NotStochastic("kernel row does not sum to 1");
    }

    SpectralReport rep;
    rep.epsilon = epsilon;

    Eigen::MatrixXd Pd = P;
    Eigen::EigenSolver<Eigen::MatrixXd> es(Pd, /*computeEigenvectors=*/false);
    rep.eigenvalue_magnitudes.resize(size);
    for (size_t i = 0; i < size; ++i) rep.eigenvalue_magnitudes[i] = std::abs(es.eigenvalues()(long(i)));
    std::sort(rep.eigenvalue_magnitudes.rbegin(), rep.eigenvalue_magnitudes.rend());

    const double second = size > 1 ? rep.eigenvalue_magnitudes[1] : 0.0;
    rep.gap = std::clamp(1.0 - second, 0.0, 1.0);

    // Stationary distribution: dominant left eigenvector, normalized to sum 1.
    Eigen::EigenSolver<Eigen::MatrixXd> est(Pd.transpose(), /*computeEigenvectors=*/true);
    long best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (long i = 0; i < long(size); ++i) {
        const double d = std::abs(est.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    Eigen::VectorXd pi = est.eigenvectors().col(best).real();
    if (pi.sum() < 0) pi = -pi;
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    rep.stationary.assign(pi.data(), pi.data() + size);

    rep.irreducible = [&] {
        auto fwd = reachable(kernel, 0, false);
        auto bwd = reachable(kernel, 0, true);
        for (size_t i = 0; i < size; ++i)
            if (!fwd[i] || !bwd[i]) return false;
        return true;
    }();
    rep.aperiodic = chain_period(kernel) == 1;

    rep.tau_mix_bound = rep.gap > 0.0 ? long(std::ceil(std::log(1.0 / epsilon) / rep.gap)) : -1;

    // Empirical TV mixing time, for state spaces small enough to iterate densely.
    rep.tau_mix_empirical = -1;
    if (size <= 256) {
        const long max_steps =
            rep.tau_mix_bound > 0 ? std::min<long>(10 * rep.tau_mix_bound + 10, 5000) : 200;
        Eigen::MatrixXd Pt = Pd;
        for (long t = 1; t <= max_steps; ++t) {
            double worst = 0.0;
            for (long i = 0; i < long(size); ++i) {
                double tv = 0.0;
                for (long j = 0; j < long(size); ++j) tv += std::abs(Pt(i, j) - pi(j));
                worst = std::max(worst, 0.5 * tv);
            }
            if (worst <= epsilon) {
                rep.tau_mix_empirical = t;
                break;
            }
            Pt = Pt * Pd;
        }
    }
    return rep;
}

ErgodicityReport verify_ergodicity(const ChainSpec& spec, double poly_threshold,
                                   size_t primitivity_k_max) {
    if (primitivity_k_max == 0) primitivity_k_max = spec.n * spec.q;
    ErgodicityReport rep;
    rep.poly_threshold = poly_threshold;
    rep.primitivity = check_primitive(spec.M, spec.q, primitivity_k_max);
    rep.noise_full_support = spec.noise.full_support(spec.q);
    auto kernel = build_kernel(spec);
    rep.gap = spectral_report(kernel, 0.01).gap;
    rep.gap_ok = rep.gap >= poly_threshold;
    rep.certified = rep.primitivity.primitive && rep.noise_full_support && rep.gap_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Theorem-4 noise accumulation

NoiseAccumReport noise_accumulation_check(const ZqMat& M, const Params& params, size_t T,
                                          size_t mc_trials) {
    const uint32_t q = params.q;
    if (det_mod_q(M) == 0) throw NotInvertible("M is singular modulo q");

    NoiseAccumReport rep;
    rep.horizon = T;
    rep.threshold = q / 4.0;

    const size_t n = M.rows;
    std::vector<std::vector<int64_t>> lifted_powers;  // centered lift of M^t, t = 1..T
    ZqMat P = M;
    for (size_t t = 1; t <= T; ++t) {
        std::vector<int64_t> lift(n * n);
        double norm = 0.0;
        for (size_t r = 0; r < n; ++r) {
            double row_sum = 0.0;
            for (size_t c = 0; c < n; ++c) {
                lift[r * n + c] = centered(P.at(r, c), q);
                row_sum += double(std::abs(lift[r * n + c]));
            }
            norm = std::max(norm, row_sum);
        }
        lifted_powers.push_back(std::move(lift));
        rep.worst_case_bound.push_back(norm * params.eta);
        if (rep.worst_case_bound.back() >= rep.threshold && rep.first_fail_t == 0) rep.first_fail_t = t;
        P = mat_mul(P, M);
    }
    rep.worst_case_max =
        rep.worst_case_bound.empty()
            ? 0.0
            : *std::max_element(rep.worst_case_bound.begin(), rep.worst_case_bound.end());
    rep.worst_case_pass = rep.worst_case_max < rep.threshold;

    DetRng rng(params.seed, "noise-accum/mc");
    int64_t mc_max = 0;
    std::vector<int64_t> e(n);
    for (size_t trial = 0; trial < mc_trials; ++trial) {
        for (auto& x : e) x = cbd_sample(params.eta, rng);
        for (const auto& lift : lifted_powers) {
            for (size_t r = 0; r < n; ++r) {
                int64_t acc = 0;
                for (size_t c = 0; c < n; ++c) acc += lift[r * n + c] * e[c];
                mc_max = std::max(mc_max, std::abs(acc));
            }
        }
    }
    rep.monte_carlo_max = double(mc_max);
    rep.monte_carlo_pass = rep.monte_carlo_max < rep.threshold;
    return rep;
}

}  // namespace chshkyber
