#pragma once

// Bell (CHSH) and Leggett-Garg diagnostics, and the two-phase experiment in
// which alignment of bases is followed by entangling joint evolution.

#include <array>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qfep/channel.hpp"
#include "qfep/fep.hpp"

namespace qfep {

StateVector singlet();

struct CHSHConfig {
    StateVector state = singlet();
    BasisAxis a = BasisAxis::from_angle(std::numbers::pi / 4);
    BasisAxis a_prime = BasisAxis::from_angle(3 * std::numbers::pi / 4);
    BasisAxis b = BasisAxis::from_angle(std::numbers::pi / 2);
    BasisAxis b_prime = BasisAxis::from_angle(0.0);
    // Exact trace formula when empty; otherwise shots per correlator.
    std::optional<std::size_t> shots;
};

struct CHSHResult {
    double s = 0.0;
    // E(a,b), E(a,b'), E(a',b), E(a',b')
    std::array<double, 4> correlators{};
    double standard_error = 0.0;
};

// S = |E(a,b) + E(a,b') + E(a',b) - E(a',b')|. Sampled mode measures qubit 0
// then qubit 1 with Born collapse.
CHSHResult chsh(const CHSHConfig &config, Rng *rng = nullptr);
double correlator(const StateVector &two_qubits, const BasisAxis &a, const BasisAxis &b);
// Largest S over the 16 deterministic local strategies.
double chsh_lhv_max();
// Four contexts {A0,B0}, {A0,B1}, {A1,B0}, {A1,B1} with exact Born weights;
// A0/A1 stand for a/a', B0/B1 for b/b'.
ContextFamily chsh_statistics(const CHSHConfig &config);

struct LGConfig {
    HermitianOperator hamiltonian = HermitianOperator(pauli::x() * 0.5);
    BasisAxis axis = BasisAxis::z();
    std::array<double, 3> times{0.0, std::numbers::pi / 3, 2 * std::numbers::pi / 3};
    StateVector initial = StateVector::qubits(1);
    std::optional<std::size_t> shots;
};

struct LGResult {
    double k3 = 0.0;
    double c12 = 0.0, c23 = 0.0, c13 = 0.0;
    double standard_error = 0.0;
};

// K3 = C12 + C23 - C13. Each correlator comes from its own two-time run in
// which the first measurement collapses the state.
LGResult leggett_garg_k3(const LGConfig &config, Rng *rng = nullptr);
// Largest K3 over the 8 pre-assigned +-1 histories.
double lg_classical_max();

struct AsymptoticConfig {
    Scenario alignment = alignment_scenario();
    // Starting polar angle of B's frame; A's axes are the scenario's axes.
    double initial_angle = std::numbers::pi / 2;
    FepOptions fep;
    std::size_t n_a = 1;
    std::size_t n_b = 1;
    double local_scale = 0.2;
    // Coupling strengths are drawn from coupling_scale * U(0.5, 1.5); zero
    // switches the interaction off.
    double coupling_scale = 1.0;
    double t_max = 20.0;
    std::size_t samples = 400;
};

struct AsymptoticReport {
    Trajectory alignment;
    double initial_misalignment = 0.0;
    double final_misalignment = 0.0;
    std::vector<double> alphas;
    std::vector<double> times;
    std::vector<double> entropy;
    double cut_max = 0.0;
    double max_entropy = 0.0;

    double max_fraction() const { return cut_max > 0.0 ? max_entropy / cut_max : 0.0; }
    nlohmann::json to_json() const;
};

// Phase 1: B, a trivial agent that only rotates its frame, minimizes its error
// against A's scripted records. Phase 2: n_a qubits of A and n_b of B, each
// prepared along the axis perpendicular (in the x-z plane) to its own frame
// axis, evolve under H_A + H_B + sum_i alpha_i (a_i.sigma)(b_i.sigma).
AsymptoticReport asymptotic_experiment(const AsymptoticConfig &config, const Rng &rng);

}  // namespace qfep
