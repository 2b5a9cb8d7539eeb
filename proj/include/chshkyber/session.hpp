#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chshkyber/chsh.hpp"
#include "chshkyber/evolution.hpp"
#include "chshkyber/mlwe.hpp"

namespace chshkyber {

using SharedSecret = std::array<uint8_t, 32>;

// ---------------------------------------------------------------------------
// FO transform: derandomized encapsulation with re-encryption check and
// implicit rejection.

struct FoKeyPair {
    KeyPair kp;
    Seed reject_secret{};  // implicit-rejection key
    Seed pk_hash{};
};

FoKeyPair fo_keygen(const Params& params, DetRng& rng);

struct FoEncapsResult {
    Ciphertext ct;
    SharedSecret ss{};
};

FoEncapsResult fo_encaps(const PublicKey& pk, const Params& params, DetRng& rng);
// Deterministic inner: coins = hash(mu || pk_hash).
FoEncapsResult fo_encaps_message(const PublicKey& pk, const Params& params,
                                 const std::array<uint8_t, 32>& mu);

SharedSecret fo_decaps(const FoKeyPair& sk, const Ciphertext& ct, const Params& params);

// ---------------------------------------------------------------------------
// Session orchestration

enum class ChannelKind { Ideal, NoisyVisibility, AdversarialLhv };
enum class EvolutionKind { Prf, Markov };

struct SessionConfig {
    Params params;
    ChannelKind channel = ChannelKind::Ideal;
    double visibility = 1.0;       // NoisyVisibility
    Strategy lhv_strategy = Strategy::classical(DetTable{});  // AdversarialLhv
    EvolutionKind evolution = EvolutionKind::Markov;
    std::optional<ChainSpec> chain;  // Markov mode; defaults to identity M with CBD noise
    double epsilon = kDefaultEpsilon;
    size_t sessions = 1;
    Seed seed{};
    // Theorem-5 premise knobs (nominal; the asymptotic statements carry no constants)
    size_t m_floor = 0;              // 0 -> 2n
    double gap_threshold = 0.1;
    double lambda_floor = 0.0;       // 0 -> sqrt(n log2 q), i.e. desk-scale pass

    Strategy channel_strategy() const;
    ChainSpec effective_chain() const;
};

struct Theorem5Premises {
    bool quantum_verification = false;  // (i) m >= poly floor
    bool markov_conditions = false;     // (ii) primitive, det != 0, gap >= threshold
    bool mlwe_parameters = false;       // (iii) n log2 q >= lambda^2, q >= n^2, eta <= 4
    bool gap_checked = false;           // false when the kernel exceeds the state cap
};

struct SessionResult {
    size_t session_id = 0;
    bool accepted = false;
    ChshEstimate chsh_estimate;
    bool shared_secret_match = false;
    std::optional<SharedSecret> final_key;
    Theorem5Premises theorem5;
    std::string abort_reason;

    ChshTranscript chsh_transcript;
    Seed pk_hash{};
    std::vector<uint8_t> ct_bytes;
    ZqVec secret_used;  // secret that keyed this session (for campaign statistics)
};

nlohmann::json transcript_json(const SessionConfig& config, const SessionResult& result);
nlohmann::json config_json(const SessionConfig& config);
SessionConfig config_from_json(const nlohmann::json& j);

SessionResult run_session(const SessionConfig& config);

struct CampaignSummary {
    size_t sessions = 0;
    size_t accepted = 0;
    size_t matched = 0;
    size_t key_collisions = 0;
    bool frozen_secrets = false;  // all session secrets identical
    // TV distance of the empirical secret distribution to the chain's
    // stationary law; only for Markov mode with a buildable kernel.
    std::optional<double> secret_tv_to_stationary;
};

struct CampaignResult {
    std::vector<SessionResult> results;
    CampaignSummary summary;
};

CampaignResult run_campaign(const SessionConfig& config);

}  // namespace chshkyber
