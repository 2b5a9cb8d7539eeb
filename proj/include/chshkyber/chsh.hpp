#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chshkyber/rng.hpp"

namespace chshkyber {

struct DegenerateObservable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InconsistentTranscript : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cx = std::complex<double>;
using Mat2 = std::array<Cx, 4>;  // row-major 2x2

// Pure two-qubit state, basis order |00>, |01>, |10>, |11>.
struct TwoQubitState {
    std::array<Cx, 4> amp;
};

// +-1-valued single-qubit observable in the x-z plane.
struct Observable {
    Mat2 m;
    std::string label;
};

Observable obs_sigma_z();                    // A0
Observable obs_sigma_x();                    // A1
Observable obs_bob_plus();                   // B0 = (sigma_z + sigma_x)/sqrt(2)
Observable obs_bob_minus();                  // B1 = (sigma_z - sigma_x)/sqrt(2)
Observable obs_from_angle(double theta);     // cos(theta) sigma_z + sin(theta) sigma_x

TwoQubitState epr_state();

// Born-rule outcome probabilities, order (+,+), (+,-), (-,+), (-,-).
std::array<double, 4> joint_outcome_probs(const TwoQubitState& state, const Observable& alice,
                                          const Observable& bob);

// E[x*y] under the given pair of observables.
double correlator(const TwoQubitState& state, const Observable& alice, const Observable& bob);

// Deterministic LHV strategy: x = fx[a], y = gy[b], entries +-1.
struct DetTable {
    std::array<int, 2> fx{1, 1};
    std::array<int, 2> gy{1, 1};
};

struct Strategy {
    enum class Kind { QuantumIdeal, QuantumNoisy, ClassicalDeterministic, ClassicalRandomLHV };
    Kind kind = Kind::QuantumIdeal;
    double visibility = 1.0;                          // QuantumNoisy
    DetTable table;                                   // ClassicalDeterministic
    std::vector<std::pair<DetTable, double>> mixture; // ClassicalRandomLHV

    static Strategy quantum_ideal() { return {}; }
    static Strategy quantum_noisy(double v);
    static Strategy classical(DetTable t);
    static Strategy classical_random(std::vector<std::pair<DetTable, double>> mix);

    std::string tag() const;
};

struct ChshRound {
    int a = 0, b = 0;  // settings, bits
    int x = 0, y = 0;  // outcomes, +-1
    int c = 0;         // x*y*(-1)^(a*b)
};

struct ChshTranscript {
    std::vector<ChshRound> rounds;
    std::string strategy_tag;

    size_t m() const { return rounds.size(); }
};

struct ChshEstimate {
    double e_hat = 0.0;
    double s_hat = 0.0;
    std::array<double, 4> correlators{};  // E[A_a B_b] indexed by 2a+b
    double ci_half_width = 0.0;
    double epsilon = 0.0;
    bool violated = false;
};

inline constexpr double kDefaultEpsilon = 0x1.0p-32;

double hoeffding_half_width(size_t m, double epsilon);

ChshRound play_round(const Strategy& strategy, DetRng& rng);

struct GameResult {
    ChshTranscript transcript;
    ChshEstimate estimate;
};

GameResult run_game(const Strategy& strategy, size_t m, DetRng& rng,
                    double epsilon = kDefaultEpsilon);

ChshEstimate estimate_from_transcript(const ChshTranscript& transcript, double epsilon,
                                      bool check_consistency = false);

// Exact maximum of E[C] over all 16 deterministic LHV strategies (= 1/2).
double lhv_max();
std::vector<DetTable> all_det_tables();
double exact_lhv_expectation(const DetTable& table);

// Maximum |S| over x-z-plane measurement angle grids; uses the decomposition of
// S over independent Bob angles, so the scan is cubic in the grid size.
double tsirelson_scan(const std::vector<double>& alice_grid, const std::vector<double>& bob_grid);
double tsirelson_scan_degrees(double step_deg);

double quantum_advantage_gap(size_t m, double epsilon = kDefaultEpsilon);

struct VerifyReport {
    double e_hat = 0.0;
    double threshold = 0.0;
    size_t m = 0;
    bool accept = false;
};

// Recomputes c from (a,b,x,y); throws InconsistentTranscript on any mismatch.
VerifyReport verify_session(const ChshTranscript& transcript, double epsilon);

}  // namespace chshkyber
