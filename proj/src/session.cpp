#include "chshkyber/session.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace chshkyber {

namespace {

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * bytes.size());
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

Seed seed_from_hex(const std::string& hex) {
    if (hex.size() != 64) throw std::invalid_argument("seed hex must be 64 chars");
    Seed s{};
    for (size_t i = 0; i < 32; ++i) s[i] = uint8_t(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
    return s;
}

std::array<uint8_t, 32> pack_bits(const BitString& bits) {
    std::array<uint8_t, 32> bytes{};
    for (size_t i = 0; i < bits.size() && i < 256; ++i)
        if (bits[i]) bytes[i / 8] |= uint8_t(1u << (i % 8));
    return bytes;
}

BitString unpack_bits(const std::array<uint8_t, 32>& bytes) {
    BitString bits(256);
    for (size_t i = 0; i < 256; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1;
    return bits;
}

std::vector<uint8_t> transcript_bytes(const ChshTranscript& t) {
    std::vector<uint8_t> buf;
    buf.reserve(4 * t.rounds.size());
    for (const auto& r : t.rounds) {
        buf.push_back(uint8_t(r.a));
        buf.push_back(uint8_t(r.b));
        buf.push_back(uint8_t(r.x > 0 ? 1 : 0));
        buf.push_back(uint8_t(r.y > 0 ? 1 : 0));
    }
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// FO transform

FoKeyPair fo_keygen(const Params& params, DetRng& rng) {
    FoKeyPair out;
    DetRng krng = rng.fork("fo/keygen");
    out.kp = keygen(params, krng);
    out.reject_secret = rng.fork("fo/reject-secret").seed();
    out.pk_hash = hash32("pk", serialize(out.kp.pk));
    return out;
}

FoEncapsResult fo_encaps_message(const PublicKey& pk, const Params& params,
                                 const std::array<uint8_t, 32>& mu) {
    const Seed pk_hash = hash32("pk", serialize(pk));
    const Seed coins = hash32("coins", {std::span<const uint8_t>(mu), std::span<const uint8_t>(pk_hash)});
    DetRng enc_rng(coins);
    FoEncapsResult out;
    out.ct = encaps(pk, params, enc_rng, unpack_bits(mu)).ct;
    const Seed ct_hash = hash32("ct", serialize(out.ct));
    out.ss = hash32("kdf", {std::span<const uint8_t>(mu), std::span<const uint8_t>(ct_hash)});
    return out;
}

FoEncapsResult fo_encaps(const PublicKey& pk, const Params& params, DetRng& rng) {
    std::array<uint8_t, 32> mu{};
    DetRng mrng = rng.fork("fo/mu");
    for (auto& b : mu) b = uint8_t(mrng.uniform_below(256));
    return fo_encaps_message(pk, params, mu);
}

SharedSecret fo_decaps(const FoKeyPair& sk, const Ciphertext& ct, const Params& params) {
    const BitString bits = decaps(sk.kp.s, ct, params);
    const std::array<uint8_t, 32> mu = pack_bits(bits);
    const FoEncapsResult reenc = fo_encaps_message(sk.kp.pk, params, mu);
    if (reenc.ct == ct) return reenc.ss;
    // implicit rejection
    const Seed ct_hash = hash32("ct", serialize(ct));
    return hash32("reject", {std::span<const uint8_t>(sk.reject_secret),
                             std::span<const uint8_t>(ct_hash)});
}

// ---------------------------------------------------------------------------
// Session configuration

Strategy SessionConfig::channel_strategy() const {
    switch (channel) {
        case ChannelKind::Ideal:
            return Strategy::quantum_ideal();
        case ChannelKind::NoisyVisibility:
            return Strategy::quantum_noisy(visibility);
        case ChannelKind::AdversarialLhv:
            return lhv_strategy;
    }
    return Strategy::quantum_ideal();
}

ChainSpec SessionConfig::effective_chain() const {
    if (chain) return *chain;
    // default: identity transition with the KEM's own CBD noise
    ChainSpec spec;
    spec.q = params.q;
    spec.n = params.k;
    spec.M = zeros_mat(params.k, params.k, params.q);
    for (size_t i = 0; i < params.k; ++i) spec.M.at(i, i) = 1;
    spec.noise = NoiseSpec::cbd(params.eta);
    return spec;
}

// ---------------------------------------------------------------------------
// Theorem-5 premise checks

static Theorem5Premises check_theorem5(const SessionConfig& config) {
    const Params& p = config.params;
    Theorem5Premises t;

    const size_t m_floor = config.m_floor ? config.m_floor : 2 * p.n;
    t.quantum_verification = p.m >= m_floor;

    const ChainSpec chain = config.effective_chain();
    const bool det_ok = det_mod_q(chain.M) != 0;
    const size_t k_max = std::min<size_t>(chain.n * chain.q, 512);
    const bool primitive = check_primitive(chain.M, chain.q, k_max).primitive;
    bool gap_ok = true;
    try {
        auto kernel = build_kernel(chain);
        gap_ok = spectral_report(kernel, 0.01).gap >= config.gap_threshold;
        t.gap_checked = true;
    } catch (const StateSpaceTooLarge&) {
        t.gap_checked = false;  // state space exceeds the exact-kernel cap
    }
    t.markov_conditions = det_ok && primitive && gap_ok;

    const double nlogq = double(p.n) * std::log2(double(p.q));
    const double lambda = config.lambda_floor > 0 ? config.lambda_floor : std::sqrt(nlogq);
    t.mlwe_parameters = nlogq >= lambda * lambda - 1e-9 && double(p.q) >= double(p.n) * p.n &&
                        p.eta <= 4;
    return t;
}

// ---------------------------------------------------------------------------
// Session execution

namespace {

ZqVec initial_secret(const SessionConfig& config) {
    DetRng rng(config.seed, "campaign/s0");
    return cbd_vec(config.params.k, config.params.q, config.params.eta, rng);
}

KeyPair keygen_with_secret(const Params& params, const ZqVec& s, DetRng& rng) {
    DetRng rng_A = rng.fork("keygen/A");
    DetRng rng_e = rng.fork("keygen/e");
    KeyPair kp;
    kp.pk.A = uniform_mat(params.n, params.k, params.q, rng_A);
    kp.s = s;
    kp.e = cbd_vec(params.n, params.q, params.eta, rng_e);
    kp.pk.t = vec_add(mat_vec(kp.pk.A, kp.s), kp.e);
    return kp;
}

SessionResult run_one(const SessionConfig& config, size_t session_id, const ZqVec& secret,
                      const Theorem5Premises& premises, bool keep_rounds = true) {
    SessionResult res;
    res.session_id = session_id;
    res.theorem5 = premises;
    res.secret_used = secret;

    DetRng srng = DetRng(config.seed).fork("session", session_id);

    // CHSH gate strictly precedes any KEM traffic.
    DetRng crng = srng.fork("chsh");
    GameResult game = run_game(config.channel_strategy(), config.params.m, crng, config.epsilon);
    res.chsh_transcript = std::move(game.transcript);
    res.chsh_estimate = game.estimate;

    const VerifyReport verdict = verify_session(res.chsh_transcript, config.epsilon);
    if (!verdict.accept) {
        res.accepted = false;
        res.abort_reason = "chsh-verification-reject";
        if (!keep_rounds) res.chsh_transcript.rounds.clear();
        return res;
    }
    res.accepted = true;

    DetRng keyrng = srng.fork("kem");
    FoKeyPair fo;
    fo.kp = keygen_with_secret(config.params, secret, keyrng);
    fo.reject_secret = keyrng.fork("fo/reject-secret").seed();
    fo.pk_hash = hash32("pk", serialize(fo.kp.pk));
    res.pk_hash = fo.pk_hash;

    DetRng erng = srng.fork("encaps");
    const FoEncapsResult enc = fo_encaps(fo.kp.pk, config.params, erng);
    res.ct_bytes = serialize(enc.ct);
    const SharedSecret dec = fo_decaps(fo, enc.ct, config.params);
    res.shared_secret_match = dec == enc.ss;

    if (res.shared_secret_match) {
        const Seed thash = hash32("transcript", transcript_bytes(res.chsh_transcript));
        res.final_key = hash32("final-key", {std::span<const uint8_t>(enc.ss),
                                             std::span<const uint8_t>(thash)});
    } else {
        res.abort_reason = "shared-secret-mismatch";
    }
    if (!keep_rounds) res.chsh_transcript.rounds.clear();
    return res;
}

ZqVec evolve_secret(const SessionConfig& config, const ZqVec& s, size_t session_id) {
    if (config.evolution == EvolutionKind::Markov) {
        DetRng rng = DetRng(config.seed).fork("evolve/markov", session_id);
        return markov_step(s, config.effective_chain(), rng);
    }
    const Seed key_h = hash32("prf-key/H", config.seed);
    return expand_to_vec(key_h, "evolve/H", session_id, serialize(s), s.size(), s.q);
}

}  // namespace

SessionResult run_session(const SessionConfig& config) {
    config.params.validate();
    return run_one(config, 0, initial_secret(config), check_theorem5(config));
}

CampaignResult run_campaign(const SessionConfig& config) {
    config.params.validate();
    if (config.sessions < 1) throw std::invalid_argument("campaign needs sessions >= 1");

    const Theorem5Premises premises = check_theorem5(config);
    CampaignResult out;
    out.summary.sessions = config.sessions;

    ZqVec s = initial_secret(config);
    std::set<std::string> keys;
    size_t duplicate_keys = 0;
    bool all_secrets_equal = true;

    for (size_t i = 0; i < config.sessions; ++i) {
        // round-level data is dropped in campaign mode to bound memory
        SessionResult res = run_one(config, i, s, premises, /*keep_rounds=*/false);
        if (res.accepted) ++out.summary.accepted;
        if (res.shared_secret_match) ++out.summary.matched;
        if (res.final_key) {
            const std::string hex = to_hex(*res.final_key);
            if (!keys.insert(hex).second) ++duplicate_keys;
        }
        if (i > 0 && !(res.secret_used == out.results.front().secret_used))
            all_secrets_equal = false;
        out.results.push_back(std::move(res));
        s = evolve_secret(config, s, i);
    }
    out.summary.key_collisions = duplicate_keys;
    out.summary.frozen_secrets = all_secrets_equal && config.sessions >= 2;

    // Empirical secret distribution vs. the chain's stationary law, when the
    // exact kernel is available.
    if (config.evolution == EvolutionKind::Markov) {
        try {
            const ChainSpec chain = config.effective_chain();
            const KernelMatrix kernel = build_kernel(chain);
            const SpectralReport spec = spectral_report(kernel, 0.01);
            const long warmup = spec.tau_mix_bound > 0 ? spec.tau_mix_bound : 0;
            if (long(config.sessions) > warmup + 1) {
                std::vector<double> counts(kernel.size, 0.0);
                size_t used = 0;
                for (size_t i = size_t(warmup); i < out.results.size(); ++i) {
                    size_t idx = 0, mult = 1;
                    for (size_t c = 0; c < chain.n; ++c) {
                        idx += out.results[i].secret_used[c] * mult;
                        mult *= chain.q;
                    }
                    counts[idx] += 1.0;
                    ++used;
                }
                double tv = 0.0;
                for (size_t j = 0; j < kernel.size; ++j)
                    tv += std::abs(counts[j] / double(used) - spec.stationary[j]);
                out.summary.secret_tv_to_stationary = 0.5 * tv;
            }
        } catch (const StateSpaceTooLarge&) {
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json config_json(const SessionConfig& config) {
    nlohmann::json j;
    j["params"] = {{"n", config.params.n}, {"k", config.params.k}, {"q", config.params.q},
                   {"eta", config.params.eta}, {"m", config.params.m}};
    switch (config.channel) {
        case ChannelKind::Ideal: j["channel"] = "ideal"; break;
        case ChannelKind::NoisyVisibility:
            j["channel"] = "noisy";
            j["visibility"] = config.visibility;
            break;
        case ChannelKind::AdversarialLhv: j["channel"] = "lhv"; break;
    }
    j["evolution"] = config.evolution == EvolutionKind::Markov ? "markov" : "prf";
    if (config.chain) {
        nlohmann::json cj;
        cj["n"] = config.chain->n;
        cj["q"] = config.chain->q;
        cj["M"] = config.chain->M.data;
        cj["noise"] = config.chain->noise.describe();
        j["chain"] = cj;
    }
    j["epsilon"] = config.epsilon;
    j["sessions"] = config.sessions;
    j["seed"] = to_hex(config.seed);
    return j;
}

SessionConfig config_from_json(const nlohmann::json& j) {
    SessionConfig c;
    const auto& p = j.at("params");
    c.params.n = p.at("n").get<size_t>();
    c.params.k = p.at("k").get<size_t>();
    c.params.q = p.at("q").get<uint32_t>();
    c.params.eta = p.at("eta").get<uint32_t>();
    c.params.m = p.at("m").get<size_t>();
    const std::string channel = j.value("channel", "ideal");
    if (channel == "ideal") {
        c.channel = ChannelKind::Ideal;
    } else if (channel == "noisy") {
        c.channel = ChannelKind::NoisyVisibility;
        c.visibility = j.at("visibility").get<double>();
    } else if (channel == "lhv") {
        c.channel = ChannelKind::AdversarialLhv;
    } else {
        throw std::invalid_argument("unknown channel: " + channel);
    }
    c.evolution = j.value("evolution", "markov") == "prf" ? EvolutionKind::Prf
                                                          : EvolutionKind::Markov;
    c.epsilon = j.value("epsilon", kDefaultEpsilon);
    c.sessions = j.value("sessions", size_t(1));
    if (j.contains("seed")) c.seed = seed_from_hex(j.at("seed").get<std::string>());
    else c.seed = seed_from_u64(0);
    c.params.seed = c.seed;
    return c;
}

nlohmann::json transcript_json(const SessionConfig& config, const SessionResult& result) {
    nlohmann::json j;
    j["session_id"] = result.session_id;
    j["config"] = config_json(config);
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : result.chsh_transcript.rounds)
        rounds.push_back({{"a", r.a}, {"b", r.b}, {"x", r.x}, {"y", r.y}, {"c", r.c}});
    j["chsh"] = std::move(rounds);
    j["estimate"] = {{"e_hat", result.chsh_estimate.e_hat},
                     {"s_hat", result.chsh_estimate.s_hat},
                     {"ci", result.chsh_estimate.ci_half_width},
                     {"violated", result.chsh_estimate.violated}};
    if (result.accepted) {
        j["kem"] = {{"pk_hash_hex", to_hex(result.pk_hash)},
                    {"ct_hex", to_hex(result.ct_bytes)},
                    {"fo_ok", result.shared_secret_match}};
    }
    nlohmann::json res;
    res["accepted"] = result.accepted;
    res["match"] = result.shared_secret_match;
    if (result.final_key) res["key_hex"] = to_hex(*result.final_key);
    if (!result.abort_reason.empty()) res["abort_reason"] = result.abort_reason;
    j["result"] = std::move(res);
    j["seeds"] = {{"root", to_hex(config.seed)}};
    j["theorem5"] = {{"quantum_verification", result.theorem5.quantum_verification},
                     {"markov_conditions", result.theorem5.markov_conditions},
                     {"mlwe_parameters", result.theorem5.mlwe_parameters},
                     {"gap_checked", result.theorem5.gap_checked}};
    return j;
}

}  // namespace chshkyber
