#include "chshkyber/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace chshkyber {

HermitianOp kron(const HermitianOp& a, const HermitianOp& b) {
    HermitianOp out = HermitianOp::zero(a.dim * b.dim);
    for (size_t i = 0; i < a.dim; ++i)
        for (size_t j = 0; j < a.dim; ++j)
            for (size_t k = 0; k < b.dim; ++k)
                for (size_t l = 0; l < b.dim; ++l)
                    out.at(i * b.dim + k, j * b.dim + l) = a.at(i, j) * b.at(k, l);
    return out;
}

HermitianOp from_mat2(const Mat2& m) {
    HermitianOp out = HermitianOp::zero(2);
    out.m.assign(m.begin(), m.end());
    return out;
}

EigenResult jacobi_eigen(const HermitianOp& h, double tol) {
    const size_t n = h.dim;
    std::vector<Cx> a = h.m;
    std::vector<Cx> v(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_norm = [&] {
        double s = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) s += std::norm(a[p * n + q]);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const Cx z = a[p * n + q];
                const double az = std::abs(z);
                if (az <= tol * 1e-3) continue;
                const Cx phase = z / az;  // e^{i phi}
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                const double tau = (aqq - app) / (2.0 * az);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // R: R_pp = c, R_pq = s*phase, R_qp = -s*conj(phase), R_qq = c
                for (size_t i = 0; i < n; ++i) {
                    const Cx aip = a[i * n + p];
                    const Cx aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * std::conj(phase) * aiq;
                    a[i * n + q] = s * phase * aip + c * aiq;
                }
                for (size_t j = 0; j < n; ++j) {
                    const Cx apj = a[p * n + j];
                    const Cx aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * phase * aqj;
                    a[q * n + j] = s * std::conj(phase) * apj + c * aqj;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    const Cx vip = v[i * n + p];
                    const Cx viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * std::conj(phase) * viq;
                    v[i * n + q] = s * phase * vip + c * viq;
                }
            }
        }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return a[i * n + i].real() < a[j * n + j].real(); });

    EigenResult res;
    res.values.reserve(n);
    res.vectors.reserve(n);
    for (size_t idx : order) {
        res.values.push_back(a[idx * n + idx].real());
        std::vector<Cx> vec(n);
        for (size_t i = 0; i < n; ++i) vec[i] = v[i * n + idx];
        res.vectors.push_back(std::move(vec));
    }
    return res;
}

HermitianOp4 term_from_settings(int a, int b) {
    const Mat2 alice = (a == 0 ? obs_sigma_z() : obs_sigma_x()).m;
    const Mat2 bob = (b == 0 ? obs_bob_plus() : obs_bob_minus()).m;
    const double sign = (a & b) ? -1.0 : 1.0;
    HermitianOp4 h = kron(from_mat2(alice), from_mat2(bob));
    for (size_t i = 0; i < 16; ++i) h.m[i] *= -0.5 * sign;
    for (size_t i = 0; i < 4; ++i) h.at(i, i) += 0.5;
    return h;
}

HamiltonianInstance instance_from_transcript(const ChshTranscript& transcript) {
    if (transcript.rounds.empty()) throw std::invalid_argument("empty transcript");
    HamiltonianInstance inst;
    inst.terms.reserve(transcript.rounds.size());
    for (size_t i = 0; i < transcript.rounds.size(); ++i) {
        const auto& r = transcript.rounds[i];
        HamiltonianInstance::Term term;
        term.pair_index = i;  // each round consumes a fresh EPR pair
        term.op = term_from_settings(r.a, r.b);
        const auto eig = jacobi_eigen(term.op);
        inst.norm_check = std::max(inst.norm_check,
                                   std::max(std::abs(eig.values.front()), std::abs(eig.values.back())));
        inst.terms.push_back(std::move(term));
    }
    inst.pair_count = transcript.rounds.size();
    return inst;
}

static std::map<size_t, HermitianOp4> blocks_by_pair(const HamiltonianInstance& instance) {
    std::map<size_t, HermitianOp4> blocks;
    for (const auto& term : instance.terms) {
        auto [it, inserted] = blocks.emplace(term.pair_index, term.op);
        if (!inserted)
            for (size_t i = 0; i < 16; ++i) it->second.m[i] += term.op.m[i];
    }
    return blocks;
}

std::vector<double> per_pair_energies(const HamiltonianInstance& instance) {
    std::vector<double> energies;
    for (const auto& [_, block] : blocks_by_pair(instance))
        energies.push_back(jacobi_eigen(block).values.front());
    return energies;
}

double ground_energy(const HamiltonianInstance& instance) {
    const auto energies = per_pair_energies(instance);
    return std::accumulate(energies.begin(), energies.end(), 0.0);
}

PromiseDecision decide_promise(const PromiseInstance& instance) {
    if (instance.alpha >= instance.beta) throw InvalidPromise("need alpha < beta");
    const double e = ground_energy(instance.hamiltonian);
    if (e <= instance.alpha) return PromiseDecision::Yes;
    if (e >= instance.beta) return PromiseDecision::No;
    return PromiseDecision::OutsidePromise;
}

EnergyLinkReport correlation_energy_link(const ChshTranscript& transcript) {
    if (transcript.rounds.empty()) throw std::invalid_argument("empty transcript");
    EnergyLinkReport rep;
    rep.ideal_per_term = 0.5 * (1.0 - 1.0 / std::sqrt(2.0));
    double acc = 0.0;
    for (const auto& r : transcript.rounds) acc += 0.5 * (1.0 - r.c);
    rep.measured_mean = acc / double(transcript.rounds.size());
    rep.deviation = rep.measured_mean - rep.ideal_per_term;
    return rep;
}

}  // namespace chshkyber
