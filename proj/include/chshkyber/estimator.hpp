#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "chshkyber/chsh.hpp"
#include "chshkyber/zq.hpp"

namespace chshkyber {

struct TranscriptTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class VariantTag { Standard, Qcs, Chsh };

struct Variant {
    VariantTag tag = VariantTag::Standard;
    double beta_tilde = 0.0;

    static Variant standard() { return {VariantTag::Standard, 0.0}; }
    static Variant qcs(double beta = 0.20) { return {VariantTag::Qcs, beta}; }
    static Variant chsh(double beta = 0.30) { return {VariantTag::Chsh, beta}; }
};

enum class AttackTag { CentralReduction, Bkz, Enumeration };

enum class ScalingModel { Multiplicative, LogAdditive };

// sigma^2 * (1 + beta_tilde)
double effective_variance(double sigma_sq, double beta_tilde);

struct NoiseModulation {
    std::vector<int> xi;        // +-1 stream taken from transcript c values
    double xi_mean = 0.0;
    double target_added_variance = 0.0;
    double realized_variance = 0.0;  // Var(e') over the output coordinates
    double realized_mean = 0.0;
};

struct ModulatedNoise {
    ZqVec e;
    NoiseModulation stats;
};

// e'_j = e_j + xi_j * z_j mod q, with Var(xi*z) = beta_tilde * sigma_sq.
// z is CBD(eta') thinned down to the target variance.
ModulatedNoise modulate_noise(const ZqVec& e, const ChshTranscript& transcript,
                              double beta_tilde, double sigma_sq, DetRng& rng);

// Multiplicative (default): base*(1 + beta*gamma); log-additive: base + log2(1+beta).
double enhanced_bits(double base_bits, double beta_tilde, ScalingModel model,
                     double gamma = 1.0);

// Delta b = c * log2(1 + beta_tilde)
double delta_blocksize(double beta_tilde, double c = 100.0);

// q_H * (adv_mlwe + adv_chsh) + negl, clamped to [0, 1]
double cca_bound(uint64_t q_h, double adv_mlwe, double adv_chsh, double negl);

struct TableRow {
    std::string paramset;
    double standard_bits = 0.0;
    double qcs_bits = 0.0;
    double chsh_bits = 0.0;
    double qcs_pct = 0.0;
    double chsh_pct = 0.0;
    double differential_pct = 0.0;  // (CHSH - QCS)/QCS
};

// Published per-row inflation factors; rows: Kyber-512/768/1024.
struct ParamsetBaseline {
    std::string name;
    double base_bits;
    double qcs_beta;
    double chsh_beta;
};
const std::vector<ParamsetBaseline>& default_baselines();

std::vector<TableRow> table_report(ScalingModel model = ScalingModel::Multiplicative);

// Per-attack-family curve from the same scaling model applied to a baseline.
double family_bits(const std::string& paramset, AttackTag family, const Variant& variant,
                   ScalingModel model = ScalingModel::Multiplicative);

struct ResourceReport {
    size_t epr_pairs = 0;
    size_t qubits = 0;          // 2m
    size_t classical_bits = 0;  // 4m
    size_t entangling_gates = 0;
    size_t single_qubit_gates = 0;
    size_t measurements = 0;
    size_t circuit_depth = 0;  // ceil(log2 m), nominal
    // Static figures reported as annotations, not measured here.
    std::string latency_note;
    std::string hardware_note;
};

ResourceReport resource_report(size_t m);

}  // namespace chshkyber
