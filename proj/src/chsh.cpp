#include "chshkyber/chsh.hpp"

#include <algorithm>
#include <cmath>

namespace chshkyber {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat2 mat2(Cx a, Cx b, Cx c, Cx d) { return Mat2{a, b, c, d}; }

Mat2 add(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r[size_t(i)] = a[size_t(i)] + b[size_t(i)];
    return r;
}

Mat2 scale(const Mat2& a, double s) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r[size_t(i)] = a[size_t(i)] * s;
    return r;
}

Mat2 mul(const Mat2& a, const Mat2& b) {
    return mat2(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]);
}

const Mat2 kId = mat2(1, 0, 0, 1);

// +-1 eigenprojectors (I +- O)/2, with validity checks on O.
std::array<Mat2, 2> eigenprojectors(const Observable& obs) {
    const Mat2& o = obs.m;
    if (std::abs(o[1] - std::conj(o[2])) > 1e-12 || std::abs(o[0].imag()) > 1e-12 ||
        std::abs(o[3].imag()) > 1e-12)
        throw DegenerateObservable("observable is not Hermitian: " + obs.label);
    const Mat2 sq = mul(o, o);
    for (int i = 0; i < 4; ++i)
        if (std::abs(sq[size_t(i)] - kId[size_t(i)]) > 1e-12)
            throw DegenerateObservable("observable does not square to identity: " + obs.label);
    return {scale(add(kId, o), 0.5), scale(add(kId, scale(o, -1.0)), 0.5)};
}

}  // namespace

Observable obs_sigma_z() { return {mat2(1, 0, 0, -1), "A0=sigma_z"}; }
Observable obs_sigma_x() { return {mat2(0, 1, 1, 0), "A1=sigma_x"}; }
Observable obs_bob_plus() {
    return {mat2(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2), "B0=(z+x)/sqrt2"};
}
Observable obs_bob_minus() {
    return {mat2(kInvSqrt2, -kInvSqrt2, -kInvSqrt2, -kInvSqrt2), "B1=(z-x)/sqrt2"};
}
Observable obs_from_angle(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {mat2(c, s, s, -c), "angle:" + std::to_string(theta)};
}

TwoQubitState epr_state() {
    return TwoQubitState{{kInvSqrt2, 0.0, 0.0, kInvSqrt2}};
}

std::array<double, 4> joint_outcome_probs(const TwoQubitState& state, const Observable& alice,
                                          const Observable& bob) {
    const auto pa = eigenprojectors(alice);
    const auto pb = eigenprojectors(bob);
    std::array<double, 4> probs{};
    for (int ia = 0; ia < 2; ++ia) {
        for (int ib = 0; ib < 2; ++ib) {
            // <psi| Pa (x) Pb |psi> without materializing the 4x4 product
            Cx acc = 0.0;
            for (int r1 = 0; r1 < 2; ++r1)
                for (int r2 = 0; r2 < 2; ++r2)
                    for (int c1 = 0; c1 < 2; ++c1)
                        for (int c2 = 0; c2 < 2; ++c2)
                            acc += std::conj(state.amp[size_t(2 * r1 + r2)]) *
                                   pa[size_t(ia)][size_t(2 * r1 + c1)] *
                                   pb[size_t(ib)][size_t(2 * r2 + c2)] *
                                   state.amp[size_t(2 * c1 + c2)];
            probs[size_t(2 * ia + ib)] = std::max(0.0, acc.real());
        }
    }
    return probs;
}

double correlator(const TwoQubitState& state, const Observable& alice, const Observable& bob) {
    const auto p = joint_outcome_probs(state, alice, bob);
    return p[0] - p[1] - p[2] + p[3];
}

Strategy Strategy::quantum_noisy(double v) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("visibility must be in [0,1]");
    Strategy s;
    s.kind = Kind::QuantumNoisy;
    s.visibility = v;
    return s;
}

Strategy Strategy::classical(DetTable t) {
    Strategy s;
    s.kind = Kind::ClassicalDeterministic;
    s.table = t;
    return s;
}

Strategy Strategy::classical_random(std::vector<std::pair<DetTable, double>> mix) {
    Strategy s;
    s.kind = Kind::ClassicalRandomLHV;
    s.mixture = std::move(mix);
    return s;
}

std::string Strategy::tag() const {
    switch (kind) {
        case Kind::QuantumIdeal:
            return "quantum";
        case Kind::QuantumNoisy:
            return "noisy:" + std::to_string(visibility);
        case Kind::ClassicalDeterministic:
            return "lhv:det";
        case Kind::ClassicalRandomLHV:
            return "lhv:random";
    }
    return "?";
}

double hoeffding_half_width(size_t m, double epsilon) {
    return std::sqrt(std::log(2.0 / epsilon) / (2.0 * double(m)));
}

namespace {

const Observable& alice_obs(int a) {
    static const Observable a0 = obs_sigma_z();
    static const Observable a1 = obs_sigma_x();
    return a == 0 ? a0 : a1;
}

const Observable& bob_obs(int b) {
    static const Observable b0 = obs_bob_plus();
    static const Observable b1 = obs_bob_minus();
    return b == 0 ? b0 : b1;
}

// Outcome tables for the four settings, Werner mixture at visibility v.
std::array<std::array<double, 4>, 4> setting_probs(double v) {
    const TwoQubitState epr = epr_state();
    std::array<std::array<double, 4>, 4> tables;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            auto p = joint_outcome_probs(epr, alice_obs(a), bob_obs(b));
            for (auto& x : p) x = v * x + (1.0 - v) * 0.25;
            tables[size_t(2 * a + b)] = p;
        }
    }
    return tables;
}

int sample_outcome(const std::array<double, 4>& probs, DetRng& rng) {
    double u = rng.uniform_real();
    for (int i = 0; i < 3; ++i) {
        if (u < probs[size_t(i)]) return i;
        u -= probs[size_t(i)];
    }
    return 3;
}

DetTable draw_table(const Strategy& strategy, DetRng& rng) {
    if (strategy.kind == Strategy::Kind::ClassicalDeterministic) return strategy.table;
    double u = rng.uniform_real();
    for (const auto& [t, p] : strategy.mixture) {
        if (u < p) return t;
        u -= p;
    }
    return strategy.mixture.back().first;
}

ChshRound make_round(int a, int b, int x, int y) {
    ChshRound r;
    r.a = a;
    r.b = b;
    r.x = x;
    r.y = y;
    r.c = x * y * ((a & b) ? -1 : 1);
    return r;
}

ChshRound play_round_with_tables(const Strategy& strategy,
                                 const std::array<std::array<double, 4>, 4>& tables, DetRng& rng) {
    const int a = rng.bit();
    const int b = rng.bit();
    int x, y;
    if (strategy.kind == Strategy::Kind::QuantumIdeal ||
        strategy.kind == Strategy::Kind::QuantumNoisy) {
        const int outcome = sample_outcome(tables[size_t(2 * a + b)], rng);
        x = (outcome & 2) ? -1 : 1;
        y = (outcome & 1) ? -1 : 1;
    } else {
        const DetTable t = draw_table(strategy, rng);
        x = t.fx[size_t(a)];
        y = t.gy[size_t(b)];
    }
    return make_round(a, b, x, y);
}

}  // namespace

ChshRound play_round(const Strategy& strategy, DetRng& rng) {
    const bool quantum = strategy.kind == Strategy::Kind::QuantumIdeal ||
                         strategy.kind == Strategy::Kind::QuantumNoisy;
    static const auto ideal = setting_probs(1.0);
    if (quantum && strategy.kind == Strategy::Kind::QuantumNoisy)
        return play_round_with_tables(strategy, setting_probs(strategy.visibility), rng);
    return play_round_with_tables(strategy, ideal, rng);
}

ChshEstimate estimate_from_transcript(const ChshTranscript& transcript, double epsilon,
                                      bool check_consistency) {
    if (transcript.rounds.empty()) throw std::invalid_argument("empty transcript");
    ChshEstimate est;
    est.epsilon = epsilon;
    double c_sum = 0.0;
    std::array<double, 4> xy_sum{};
    std::array<size_t, 4> counts{};
    for (const auto& r : transcript.rounds) {
        if (check_consistency && r.c != r.x * r.y * ((r.a & r.b) ? -1 : 1))
            throw InconsistentTranscript("stored c disagrees with (a,b,x,y)");
        c_sum += r.c;
        const size_t s = size_t(2 * r.a + r.b);
        xy_sum[s] += r.x * r.y;
        counts[s] += 1;
    }
    const size_t m = transcript.rounds.size();
    est.e_hat = c_sum / double(m);
    for (size_t s = 0; s < 4; ++s)
        est.correlators[s] = counts[s] ? xy_sum[s] / double(counts[s]) : 0.0;
    est.s_hat = est.correlators[0] + est.correlators[1] + est.correlators[2] - est.correlators[3];
    est.ci_half_width = hoeffding_half_width(m, epsilon);
    est.violated = est.e_hat - est.ci_half_width > 0.5;
    return est;
}

GameResult run_game(const Strategy& strategy, size_t m, DetRng& rng, double epsilon) {
    if (m < 1) throw std::invalid_argument("run_game: m must be >= 1");
    const bool quantum = strategy.kind == Strategy::Kind::QuantumIdeal ||
                         strategy.kind == Strategy::Kind::QuantumNoisy;
    const auto tables =
        setting_probs(quantum && strategy.kind == Strategy::Kind::QuantumNoisy
                          ? strategy.visibility
                          : 1.0);
    GameResult result;
    result.transcript.strategy_tag = strategy.tag();
    result.transcript.rounds.reserve(m);
    for (size_t i = 0; i < m; ++i)
        result.transcript.rounds.push_back(play_round_with_tables(strategy, tables, rng));
    result.estimate = estimate_from_transcript(result.transcript, epsilon);
    return result;
}

std::vector<DetTable> all_det_tables() {
    std::vector<DetTable> tables;
    for (int i = 0; i < 16; ++i) {
        DetTable t;
        t.fx = {(i & 1) ? -1 : 1, (i & 2) ? -1 : 1};
        t.gy = {(i & 4) ? -1 : 1, (i & 8) ? -1 : 1};
        tables.push_back(t);
    }
    return tables;
}

double exact_lhv_expectation(const DetTable& t) {
    double sum = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            sum += t.fx[size_t(a)] * t.gy[size_t(b)] * ((a & b) ? -1 : 1);
    return sum / 4.0;
}

double lhv_max() {
    double best = -1.0;
    for (const auto& t : all_det_tables()) best = std::max(best, exact_lhv_expectation(t));
    return best;
}

double tsirelson_scan(const std::vector<double>& alice_grid, const std::vector<double>& bob_grid) {
    const TwoQubitState epr = epr_state();
    const size_t na = alice_grid.size(), nb = bob_grid.size();
    // E[theta, phi] over the full grid
    std::vector<double> E(na * nb);
    for (size_t i = 0; i < na; ++i)
        for (size_t j = 0; j < nb; ++j)
            E[i * nb + j] = correlator(epr, obs_from_angle(alice_grid[i]), obs_from_angle(bob_grid[j]));

    // S = [E(t0,p0) + E(t1,p0)] + [E(t0,p1) - E(t1,p1)]; the two bracketed terms
    // range over independent Bob angles, so each is extremized separately.
    double best = 0.0;
    for (size_t i0 = 0; i0 < na; ++i0) {
        for (size_t i1 = 0; i1 < na; ++i1) {
            double max_sum = -4.0, min_sum = 4.0, max_diff = -4.0, min_diff = 4.0;
            for (size_t j = 0; j < nb; ++j) {
                const double s = E[i0 * nb + j] + E[i1 * nb + j];
                const double d = E[i0 * nb + j] - E[i1 * nb + j];
                max_sum = std::max(max_sum, s);
                min_sum = std::min(min_sum, s);
                max_diff = std::max(max_diff, d);
                min_diff = std::min(min_diff, d);
            }
            best = std::max({best, max_sum + max_diff, -(min_sum + min_diff)});
        }
    }
    return best;
}

double tsirelson_scan_degrees(double step_deg) {
    std::vector<double> grid;
    for (double deg = 0.0; deg <= 180.0 + 1e-9; deg += step_deg)
        grid.push_back(deg * M_PI / 180.0);
    return tsirelson_scan(grid, grid);
}

double quantum_advantage_gap(size_t m, double epsilon) {
    const double gap = (2.0 * std::sqrt(2.0) - 2.0) / 4.0 - hoeffding_half_width(m, epsilon);
    return std::max(0.0, gap);
}

VerifyReport verify_session(const ChshTranscript& transcript, double epsilon) {
    const auto est = estimate_from_transcript(transcript, epsilon, /*check_consistency=*/true);
    VerifyReport rep;
    rep.m = transcript.rounds.size();
    rep.e_hat = est.e_hat;
    rep.threshold = 0.5 + est.ci_half_width;
    rep.accept = est.e_hat > rep.threshold;
    return rep;
}

}  // namespace chshkyber
