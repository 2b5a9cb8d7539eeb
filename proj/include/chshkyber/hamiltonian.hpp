#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "chshkyber/chsh.hpp"

namespace chshkyber {

struct InvalidPromise : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense complex Hermitian matrix, row-major.
struct HermitianOp {
    size_t dim = 0;
    std::vector<Cx> m;

    Cx at(size_t r, size_t c) const { return m[r * dim + c]; }
    Cx& at(size_t r, size_t c) { return m[r * dim + c]; }

    static HermitianOp zero(size_t dim) { return {dim, std::vector<Cx>(dim * dim, 0.0)}; }
};

using HermitianOp4 = HermitianOp;  // dim == 4 throughout the reduction

HermitianOp kron(const HermitianOp& a, const HermitianOp& b);
HermitianOp from_mat2(const Mat2& m);

// Eigenvalues (ascending) of a Hermitian matrix via cyclic Jacobi rotations.
struct EigenResult {
    std::vector<double> values;           // ascending
    std::vector<std::vector<Cx>> vectors; // vectors[i] pairs with values[i]
};
EigenResult jacobi_eigen(const HermitianOp& h, double tol = 1e-12);

// H = (1/2)(I - (-1)^{ab} A_a (x) B_b); spectrum {0,0,1,1}.
HermitianOp4 term_from_settings(int a, int b);

struct HamiltonianInstance {
    struct Term {
        size_t pair_index = 0;
        HermitianOp4 op;
    };
    std::vector<Term> terms;
    size_t pair_count = 0;
    double norm_check = 0.0;  // max operator norm among terms
};

HamiltonianInstance instance_from_transcript(const ChshTranscript& transcript);

// Sum of per-pair block minimum eigenvalues (blocks act on disjoint factors).
double ground_energy(const HamiltonianInstance& instance);
std::vector<double> per_pair_energies(const HamiltonianInstance& instance);

enum class PromiseDecision { Yes, No, OutsidePromise };

struct PromiseInstance {
    HamiltonianInstance hamiltonian;
    double alpha = 0.0;
    double beta = 0.0;
};

PromiseDecision decide_promise(const PromiseInstance& instance);

struct EnergyLinkReport {
    double ideal_per_term = 0.0;     // <EPR|H_i|EPR> = (1 - 1/sqrt2)/2
    double measured_mean = 0.0;      // mean of (1 - c)/2 over the transcript
    double deviation = 0.0;
};

EnergyLinkReport correlation_energy_link(const ChshTranscript& transcript);

}  // namespace chshkyber
