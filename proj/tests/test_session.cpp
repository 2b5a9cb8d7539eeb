#include <doctest.h>

#include <cmath>

#include "chshkyber/session.hpp"

using namespace chshkyber;

namespace {

SessionConfig base_config(Params p, uint64_t seed) {
    SessionConfig c;
    c.params = p;
    c.seed = seed_from_u64(seed);
    c.params.seed = c.seed;
    return c;
}

}  // namespace

TEST_CASE("fo round trip and derandomized determinism") {
    const Params p = toy_params();
    DetRng rng(seed_from_u64(300));
    const FoKeyPair sk = fo_keygen(p, rng);
    DetRng erng = rng.fork("enc");
    const FoEncapsResult enc = fo_encaps(sk.kp.pk, p, erng);
    CHECK(fo_decaps(sk, enc.ct, p) == enc.ss);

    // same message always yields the identical ciphertext and secret
    std::array<uint8_t, 32> mu{};
    mu[0] = 0xab;
    const auto e1 = fo_encaps_message(sk.kp.pk, p, mu);
    const auto e2 = fo_encaps_message(sk.kp.pk, p, mu);
    CHECK(e1.ct == e2.ct);
    CHECK(e1.ss == e2.ss);
    mu[0] = 0xac;
    CHECK(fo_encaps_message(sk.kp.pk, p, mu).ct != e1.ct);
}

TEST_CASE("fo implicit rejection on tampered ciphertexts") {
    const Params p = toy_params();
    DetRng rng(seed_from_u64(301));
    const FoKeyPair sk = fo_keygen(p, rng);
    const FoEncapsResult enc = fo_encaps(sk.kp.pk, p, rng);

    for (size_t i = 0; i < p.k; ++i) {
        Ciphertext bad = enc.ct;
        bad.u[i] = (bad.u[i] + 1) % p.q;
        const SharedSecret r1 = fo_decaps(sk, bad, p);
        CHECK(r1 != enc.ss);
        // rejection is deterministic
        CHECK(fo_decaps(sk, bad, p) == r1);
    }
    Ciphertext badv = enc.ct;
    badv.v[17] = (badv.v[17] + 1) % p.q;
    CHECK(fo_decaps(sk, badv, p) != enc.ss);
}

TEST_CASE("ideal session accepts, matches, and derives a final key") {
    SessionConfig c = base_config(toy_params(), 42);
    c.params.m = 1024;  // enough for the Hoeffding gate at epsilon = 2^-32
    const SessionResult res = run_session(c);
    CHECK(res.accepted);
    CHECK(res.shared_secret_match);
    CHECK(res.final_key.has_value());
    CHECK(res.abort_reason.empty());
    CHECK(res.chsh_transcript.m() == 1024);
    CHECK(res.chsh_estimate.violated);

    // byte-level determinism of the whole transcript
    const SessionResult res2 = run_session(c);
    CHECK(transcript_json(c, res) == transcript_json(c, res2));
    CHECK(res.final_key == res2.final_key);
}

TEST_CASE("lhv and low-visibility channels are rejected before any KEM traffic") {
    SessionConfig c = base_config(toy_params(), 43);
    c.params.m = 1024;
    c.channel = ChannelKind::AdversarialLhv;
    c.lhv_strategy = Strategy::classical(DetTable{{1, 1}, {1, 1}});
    const SessionResult lhv = run_session(c);
    CHECK(!lhv.accepted);
    CHECK(lhv.abort_reason == "chsh-verification-reject");
    CHECK(!lhv.final_key.has_value());
    CHECK(lhv.ct_bytes.empty());

    c.channel = ChannelKind::NoisyVisibility;
    c.visibility = 0.5;  // mean correlation 0.35 < 1/2
    const SessionResult noisy = run_session(c);
    CHECK(!noisy.accepted);
    CHECK(!noisy.final_key.has_value());
}

TEST_CASE("transcript json carries the full schema") {
    SessionConfig c = base_config(toy_params(), 44);
    c.params.m = 1024;
    const SessionResult res = run_session(c);
    const auto j = transcript_json(c, res);
    CHECK(j.contains("session_id"));
    CHECK(j.at("config").at("params").at("q") == 97);
    REQUIRE(j.at("chsh").is_array());
    CHECK(j.at("chsh").size() == 1024);
    for (const char* k : {"a", "b", "x", "y", "c"}) CHECK(j.at("chsh")[0].contains(k));
    for (const char* k : {"e_hat", "s_hat", "ci", "violated"}) CHECK(j.at("estimate").contains(k));
    for (const char* k : {"pk_hash_hex", "ct_hex", "fo_ok"}) CHECK(j.at("kem").contains(k));
    CHECK(j.at("result").at("accepted") == true);
    CHECK(j.at("result").at("match") == true);
    CHECK(j.at("result").contains("key_hex"));
    CHECK(j.at("seeds").contains("root"));

    // rejected sessions carry no kem section and no key
    c.channel = ChannelKind::AdversarialLhv;
    const auto jr = transcript_json(c, run_session(c));
    CHECK(!jr.contains("kem"));
    CHECK(!jr.at("result").contains("key_hex"));
    CHECK(jr.at("result").at("abort_reason") == "chsh-verification-reject");
}

TEST_CASE("config json round trip") {
    SessionConfig c = base_config(small_params(), 45);
    c.channel = ChannelKind::NoisyVisibility;
    c.visibility = 0.8;
    c.evolution = EvolutionKind::Prf;
    c.sessions = 7;
    const SessionConfig back = config_from_json(config_json(c));
    CHECK(back.params.n == c.params.n);
    CHECK(back.params.q == c.params.q);
    CHECK(back.channel == ChannelKind::NoisyVisibility);
    CHECK(back.visibility == 0.8);
    CHECK(back.evolution == EvolutionKind::Prf);
    CHECK(back.sessions == 7);
    CHECK(back.seed == c.seed);

    CHECK_THROWS(config_from_json(nlohmann::json{{"params", {{"n", 4}}}}));
}

TEST_CASE("theorem-5 premises at desk scale") {
    SessionConfig c = base_config(toy_params(), 46);
    c.params.m = 1024;
    const SessionResult res = run_session(c);
    CHECK(res.theorem5.quantum_verification);  // m >= 2n
    CHECK(res.theorem5.mlwe_parameters);       // n log q >= lambda^2, q >= n^2, eta <= 4
    // default identity chain over Z_97^4 exceeds the exact-kernel cap
    CHECK(!res.theorem5.gap_checked);

    // with a 1-dimensional secret and uniform chain noise the gap is exact
    Params p1 = toy_params();
    p1.k = 1;
    p1.m = 1024;
    SessionConfig c1 = base_config(p1, 47);
    ChainSpec chain;
    chain.n = 1;
    chain.q = p1.q;
    chain.M = ZqMat{1, 1, {1}, p1.q};
    chain.noise = NoiseSpec::uniform();
    c1.chain = chain;
    const SessionResult r1 = run_session(c1);
    CHECK(r1.theorem5.gap_checked);
    CHECK(r1.theorem5.markov_conditions);  // gap = 1 for a uniform kernel
}

TEST_CASE("markov campaign evolves secrets and yields unique keys") {
    SessionConfig c = base_config(toy_params(), 48);
    c.params.m = 1024;
    c.sessions = 20;
    const CampaignResult camp = run_campaign(c);
    CHECK(camp.summary.sessions == 20);
    CHECK(camp.summary.accepted == 20);
    CHECK(camp.summary.matched == 20);
    CHECK(camp.summary.key_collisions == 0);
    CHECK(!camp.summary.frozen_secrets);
    CHECK(camp.results.size() == 20);
    // round-level data dropped in campaign mode
    CHECK(camp.results[0].chsh_transcript.rounds.empty());
    // CBD steps actually move the secret
    CHECK(camp.results[0].secret_used != camp.results[10].secret_used);
}

TEST_CASE("frozen chain is reported") {
    SessionConfig c = base_config(toy_params(), 49);
    c.params.m = 1024;
    c.sessions = 5;
    ChainSpec chain = c.effective_chain();
    chain.noise = NoiseSpec::from_table({{0, 1.0}});  // identity M, zero noise
    c.chain = chain;
    const CampaignResult camp = run_campaign(c);
    CHECK(camp.summary.frozen_secrets);
    CHECK(camp.summary.key_collisions == 0);  // session-indexed forks still differ
}

TEST_CASE("campaign tracks the stationary law for small chains") {
    Params p = toy_params();
    p.k = 1;
    p.m = 512;
    SessionConfig c = base_config(p, 50);
    ChainSpec chain;
    chain.n = 1;
    chain.q = p.q;
    chain.M = ZqMat{1, 1, {1}, p.q};
    chain.noise = NoiseSpec::uniform();
    c.chain = chain;
    c.sessions = 300;
    const CampaignResult camp = run_campaign(c);
    REQUIRE(camp.summary.secret_tv_to_stationary.has_value());
    CHECK(*camp.summary.secret_tv_to_stationary >= 0.0);
    CHECK(*camp.summary.secret_tv_to_stationary < 0.5);  // 97 states, ~300 samples
}

TEST_CASE("prf evolution also decorrelates secrets deterministically") {
    SessionConfig c = base_config(toy_params(), 51);
    c.params.m = 1024;
    c.evolution = EvolutionKind::Prf;
    c.sessions = 10;
    const CampaignResult a = run_campaign(c);
    const CampaignResult b = run_campaign(c);
    CHECK(a.summary.accepted == 10);
    CHECK(a.results[3].secret_used != a.results[7].secret_used);
    for (size_t i = 0; i < 10; ++i) {
        CHECK(a.results[i].secret_used == b.results[i].secret_used);
        CHECK(a.results[i].final_key == b.results[i].final_key);
    }
}
