#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "chshkyber/hamiltonian.hpp"

using namespace chshkyber;

namespace {

Eigen::MatrixXcd to_eigen(const HermitianOp& h) {
    Eigen::MatrixXcd m(long(h.dim), long(h.dim));
    for (size_t r = 0; r < h.dim; ++r)
        for (size_t c = 0; c < h.dim; ++c) m(long(r), long(c)) = h.at(r, c);
    return m;
}

// Independent spectrum oracle.
Eigen::VectorXd eigen_spectrum(const HermitianOp& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(h));
    return es.eigenvalues();
}

HermitianOp random_hermitian(size_t dim, DetRng& rng) {
    HermitianOp h = HermitianOp::zero(dim);
    for (size_t r = 0; r < dim; ++r) {
        h.at(r, r) = 2.0 * rng.uniform_real() - 1.0;
        for (size_t c = r + 1; c < dim; ++c) {
            const Cx z(2.0 * rng.uniform_real() - 1.0, 2.0 * rng.uniform_real() - 1.0);
            h.at(r, c) = z;
            h.at(c, r) = std::conj(z);
        }
    }
    return h;
}

}  // namespace

TEST_CASE("kron matches the Eigen kroneckerProduct layout") {
    DetRng rng(seed_from_u64(60));
    const HermitianOp a = random_hermitian(2, rng);
    const HermitianOp b = random_hermitian(2, rng);
    const HermitianOp k = kron(a, b);
    REQUIRE(k.dim == 4);
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j)
            CHECK(std::abs(k.at(i, j) - a.at(i / 2, j / 2) * b.at(i % 2, j % 2)) < 1e-15);
}

TEST_CASE("jacobi eigensolver agrees with Eigen on random Hermitian matrices") {
    DetRng rng(seed_from_u64(61));
    for (size_t dim : {2u, 4u, 6u, 8u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const HermitianOp h = random_hermitian(dim, rng);
            const EigenResult got = jacobi_eigen(h);
            const Eigen::VectorXd want = eigen_spectrum(h);
            REQUIRE(got.values.size() == dim);
            for (size_t i = 0; i < dim; ++i)
                CHECK(std::abs(got.values[i] - want(long(i))) < 1e-10);
            // residual check H v = lambda v, and unit norm
            for (size_t i = 0; i < dim; ++i) {
                double norm = 0.0, resid = 0.0;
                for (size_t r = 0; r < dim; ++r) {
                    Cx acc = 0.0;
                    for (size_t c = 0; c < dim; ++c) acc += h.at(r, c) * got.vectors[i][c];
                    resid += std::norm(acc - got.values[i] * got.vectors[i][r]);
                    norm += std::norm(got.vectors[i][r]);
                }
                CHECK(std::sqrt(resid) < 1e-9);
                CHECK(std::abs(norm - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("each settings term has spectrum {0,0,1,1}") {
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const HermitianOp4 h = term_from_settings(a, b);
            const auto eig = jacobi_eigen(h);
            CHECK(std::abs(eig.values[0]) < 1e-12);
            CHECK(std::abs(eig.values[1]) < 1e-12);
            CHECK(std::abs(eig.values[2] - 1.0) < 1e-12);
            CHECK(std::abs(eig.values[3] - 1.0) < 1e-12);
            // Hermiticity
            for (size_t r = 0; r < 4; ++r)
                for (size_t c = 0; c < 4; ++c)
                    CHECK(std::abs(h.at(r, c) - std::conj(h.at(c, r))) < 1e-15);
        }
    }
}

TEST_CASE("four-setting block ground energy is 2 - sqrt(2)") {
    HermitianOp4 block = HermitianOp::zero(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const HermitianOp4 t = term_from_settings(a, b);
            for (size_t i = 0; i < 16; ++i) block.m[i] += t.m[i];
        }
    const double expected = 2.0 - std::sqrt(2.0);
    CHECK(std::abs(jacobi_eigen(block).values[0] - expected) < 1e-9);
    CHECK(std::abs(eigen_spectrum(block)(0) - expected) < 1e-12);
}

TEST_CASE("EPR expectation of each term is (1 - 1/sqrt(2))/2") {
    const TwoQubitState psi = epr_state();
    const double expected = 0.5 * (1.0 - 1.0 / std::sqrt(2.0));
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const HermitianOp4 h = term_from_settings(a, b);
            Cx acc = 0.0;
            for (size_t r = 0; r < 4; ++r)
                for (size_t c = 0; c < 4; ++c)
                    acc += std::conj(psi.amp[r]) * h.at(r, c) * psi.amp[c];
            CHECK(std::abs(acc.imag()) < 1e-14);
            CHECK(std::abs(acc.real() - expected) < 1e-12);
        }
    }
}

TEST_CASE("instance from transcript: one term per round, norm 1, additive energy") {
    DetRng rng(seed_from_u64(62));
    const auto game = run_game(Strategy::quantum_ideal(), 50, rng);
    const HamiltonianInstance inst = instance_from_transcript(game.transcript);
    CHECK(inst.terms.size() == 50);
    CHECK(inst.pair_count == 50);
    CHECK(std::abs(inst.norm_check - 1.0) < 1e-9);
    for (size_t i = 0; i < inst.terms.size(); ++i) {
        CHECK(inst.terms[i].pair_index == i);
        const auto& r = game.transcript.rounds[i];
        const HermitianOp4 want = term_from_settings(r.a, r.b);
        for (size_t j = 0; j < 16; ++j) CHECK(std::abs(inst.terms[i].op.m[j] - want.m[j]) < 1e-15);
    }
    // disjoint pairs: each block has ground energy 0, so the sum is 0
    const auto energies = per_pair_energies(inst);
    CHECK(energies.size() == 50);
    for (double e : energies) CHECK(std::abs(e) < 1e-12);
    CHECK(std::abs(ground_energy(inst)) < 1e-12);

    CHECK_THROWS(instance_from_transcript(ChshTranscript{}));
}

TEST_CASE("promise decisions") {
    DetRng rng(seed_from_u64(63));
    const auto game = run_game(Strategy::quantum_ideal(), 8, rng);
    HamiltonianInstance yes = instance_from_transcript(game.transcript);
    CHECK(decide_promise({yes, 0.1, 0.5}) == PromiseDecision::Yes);

    // all four settings on the same pair: ground energy 2 - sqrt(2) ~ 0.586
    HamiltonianInstance no;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) no.terms.push_back({0, term_from_settings(a, b)});
    no.pair_count = 1;
    CHECK(decide_promise({no, 0.1, 0.5}) == PromiseDecision::No);
    CHECK(decide_promise({no, 0.1, 0.6}) == PromiseDecision::OutsidePromise);
    CHECK_THROWS_AS(decide_promise({no, 0.5, 0.5}), InvalidPromise);
}

TEST_CASE("correlation-energy link on an ideal quantum transcript") {
    DetRng rng(seed_from_u64(64));
    const auto game = run_game(Strategy::quantum_ideal(), 200000, rng);
    const EnergyLinkReport rep = correlation_energy_link(game.transcript);
    CHECK(std::abs(rep.ideal_per_term - 0.5 * (1.0 - 1.0 / std::sqrt(2.0))) < 1e-15);
    // mean of (1 - c)/2 concentrates at (1 - 1/sqrt(2))/2
    CHECK(std::abs(rep.deviation) < 0.005);
    CHECK(std::abs(rep.measured_mean - 0.5 * (1.0 - game.estimate.e_hat)) < 1e-12);
}
