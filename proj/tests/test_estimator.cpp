#include <doctest.h>

#include <cmath>

#include "chshkyber/estimator.hpp"
#include "chshkyber/mlwe.hpp"

using namespace chshkyber;

TEST_CASE("effective variance") {
    CHECK(effective_variance(1.0, 0.30) == 1.30);
    CHECK(effective_variance(2.0, 0.0) == 2.0);
    CHECK_THROWS(effective_variance(-1.0, 0.3));
    CHECK_THROWS(effective_variance(1.0, -0.3));
    CHECK_THROWS(effective_variance(1.0, std::nan("")));
}

TEST_CASE("modulate_noise: zero beta is the identity") {
    DetRng rng(seed_from_u64(200));
    DetRng nrng = rng.fork("noise");
    const ZqVec e = cbd_vec(64, 3329, 2, nrng);
    auto game = run_game(Strategy::quantum_ideal(), 64, rng);
    DetRng mrng = rng.fork("mod");
    const auto out = modulate_noise(e, game.transcript, 0.0, 1.0, mrng);
    CHECK(out.e == e);
    CHECK(out.stats.target_added_variance == 0.0);
    REQUIRE(out.stats.xi.size() == 64);
    for (size_t j = 0; j < 64; ++j) CHECK(out.stats.xi[j] == game.transcript.rounds[j].c);
}

TEST_CASE("modulate_noise: realized variance hits sigma^2 (1 + beta)") {
    const size_t n = 100000;
    DetRng rng(seed_from_u64(201));
    DetRng nrng = rng.fork("noise");
    const ZqVec e = cbd_vec(n, 3329, 2, nrng);  // Var = eta/2 = 1
    auto game = run_game(Strategy::quantum_ideal(), n, rng);
    DetRng mrng = rng.fork("mod");
    const auto out = modulate_noise(e, game.transcript, 0.30, 1.0, mrng);
    CHECK(out.stats.target_added_variance == doctest::Approx(0.30));
    CHECK(std::abs(out.stats.realized_variance - 1.30) < 0.03);
    CHECK(std::abs(out.stats.realized_mean) < 0.03);
    // xi is the c stream of a quantum transcript: mean near 1/sqrt(2)
    CHECK(std::abs(out.stats.xi_mean - 0.7071) < 0.02);
    // each perturbation is bounded by eta' = ceil(2 * 0.3) = 1
    for (size_t j = 0; j < n; ++j) {
        const int64_t diff = centered(out.e[j], 3329) - centered(e[j], 3329);
        CHECK(std::abs(diff) <= 1);
    }
}

TEST_CASE("modulate_noise: transcript shorter than the noise vector throws") {
    DetRng rng(seed_from_u64(202));
    DetRng nrng = rng.fork("noise");
    const ZqVec e = cbd_vec(32, 97, 2, nrng);
    auto game = run_game(Strategy::quantum_ideal(), 16, rng);
    DetRng mrng = rng.fork("mod");
    CHECK_THROWS_AS(modulate_noise(e, game.transcript, 0.3, 1.0, mrng), TranscriptTooShort);
}

TEST_CASE("scaling models") {
    CHECK(enhanced_bits(100.0, 0.30, ScalingModel::Multiplicative) == doctest::Approx(130.0));
    CHECK(enhanced_bits(100.0, 0.30, ScalingModel::Multiplicative, 0.5) == doctest::Approx(115.0));
    CHECK(enhanced_bits(100.0, 0.30, ScalingModel::LogAdditive) ==
          doctest::Approx(100.0 + std::log2(1.3)));
    CHECK_THROWS(enhanced_bits(0.0, 0.30, ScalingModel::Multiplicative));

    CHECK(delta_blocksize(0.30) == doctest::Approx(100.0 * std::log2(1.3)));
    CHECK(delta_blocksize(0.20, 50.0) == doctest::Approx(50.0 * std::log2(1.2)));
    CHECK_THROWS(delta_blocksize(-0.1));
}

TEST_CASE("cca bound clamps to [0, 1]") {
    CHECK(cca_bound(100, 1e-6, 1e-6, 1e-9) ==
          doctest::Approx(100.0 * 2e-6 + 1e-9).epsilon(1e-12));
    CHECK(cca_bound(1u << 30, 0.5, 0.5, 0.0) == 1.0);
    CHECK(cca_bound(0, 0.0, 0.0, 0.0) == 0.0);
    CHECK_THROWS(cca_bound(1, 1.5, 0.0, 0.0));
    CHECK_THROWS(cca_bound(1, 0.0, -0.1, 0.0));
}

TEST_CASE("published security table is reproduced within 0.1") {
    const auto table = table_report();
    REQUIRE(table.size() == 3);
    struct Row {
        const char* name;
        double std_b, qcs_b, chsh_b, qcs_p, chsh_p, diff_p;
    };
    const Row want[3] = {
        {"kyber512", 124.7, 150.6, 162.7, 20.8, 30.4, 8.0},
        {"kyber768", 185.2, 221.6, 241.1, 19.7, 30.2, 8.8},
        {"kyber1024", 250.0, 300.8, 325.3, 20.3, 30.1, 8.2},
    };
    for (size_t i = 0; i < 3; ++i) {
        CHECK(table[i].paramset == want[i].name);
        CHECK(std::abs(table[i].standard_bits - want[i].std_b) < 0.1);
        CHECK(std::abs(table[i].qcs_bits - want[i].qcs_b) < 0.1);
        CHECK(std::abs(table[i].chsh_bits - want[i].chsh_b) < 0.1);
        CHECK(std::abs(table[i].qcs_pct - want[i].qcs_p) < 0.1);
        CHECK(std::abs(table[i].chsh_pct - want[i].chsh_p) < 0.1);
        CHECK(std::abs(table[i].differential_pct - want[i].diff_p) < 0.1);
        // internal consistency oracles
        CHECK(table[i].qcs_bits ==
              doctest::Approx(table[i].standard_bits * (1.0 + table[i].qcs_pct / 100.0)));
        CHECK(table[i].differential_pct ==
              doctest::Approx(100.0 * (table[i].chsh_bits - table[i].qcs_bits) / table[i].qcs_bits));
    }
}

TEST_CASE("family bits and unknown paramsets") {
    CHECK(family_bits("kyber768", AttackTag::Bkz, Variant::chsh(0.302)) ==
          doctest::Approx(185.2 * 1.302));
    CHECK(family_bits("kyber512", AttackTag::Enumeration, Variant::standard()) ==
          doctest::Approx(124.7));
    CHECK_THROWS(family_bits("kyber2048", AttackTag::Bkz, Variant::qcs()));
}

TEST_CASE("resource report scales linearly in m") {
    const auto rep = resource_report(4096);
    CHECK(rep.epr_pairs == 4096);
    CHECK(rep.qubits == 8192);
    CHECK(rep.classical_bits == 16384);
    CHECK(rep.entangling_gates == 4096);
    CHECK(rep.single_qubit_gates == 8192);
    CHECK(rep.measurements == 8192);
    CHECK(rep.circuit_depth == 12);
    CHECK(!rep.latency_note.empty());
    CHECK(!rep.hardware_note.empty());
}
