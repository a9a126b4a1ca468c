#pragma once

// The qubit screen shared by two systems: an array of non-interacting qubits
// that each side alternately prepares and reads, plus the thermodynamic
// bookkeeping of that exchange.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfep/quantum.hpp"

namespace qfep {

namespace si {
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double hbar = 1.054571817e-34;      // J s
}  // namespace si

inline constexpr double kLn2 = 0.69314718055994530942;

class BasisAxis {
public:
    // Direction must be unit norm within kStateTol.
    explicit BasisAxis(std::array<double, 3> direction);

    static BasisAxis z() { return BasisAxis({0.0, 0.0, 1.0}); }
    static BasisAxis x() { return BasisAxis({1.0, 0.0, 0.0}); }
    static BasisAxis y() { return BasisAxis({0.0, 1.0, 0.0}); }
    // Axis at polar angle theta in the x-z plane (theta = 0 is +z).
    static BasisAxis from_angle(double theta);
    static BasisAxis from_spherical(double theta, double phi);
    static BasisAxis normalized(std::array<double, 3> v);

    const std::array<double, 3> &direction() const { return dir_; }
    double dot(const BasisAxis &o) const;
    // Angle between the two axes, in [0, pi].
    double angle_to(const BasisAxis &o) const;

    // n . sigma
    Eigen::Matrix2cd observable() const;
    // Eigenstate for a bit: bit 0 <-> eigenvalue +1, bit 1 <-> eigenvalue -1.
    Eigen::Vector2cd eigenstate(int bit) const;

    bool operator==(const BasisAxis &o) const { return dir_ == o.dir_; }

private:
    std::array<double, 3> dir_;
};

// Fixed encoding: outcome +1 <-> bit 0, outcome -1 <-> bit 1.
inline int bit_of(int outcome) { return outcome > 0 ? 0 : 1; }
inline int outcome_of(int bit) { return bit == 0 ? +1 : -1; }

enum class ScreenAction { prepare, read };

struct TranscriptEntry {
    std::uint64_t tick;
    std::size_t qubit;
    std::string actor;
    ScreenAction action;
    std::array<double, 3> axis;
    int bit;
    double probability;
};

class QubitScreen {
public:
    // All qubits in |0> (z-up).
    explicit QubitScreen(std::size_t n_qubits);
    // Arbitrary (possibly entangled) joint state over qubits.
    explicit QubitScreen(const StateVector &joint);

    std::size_t n_qubits() const { return n_; }
    StateVector joint_state() const;
    // Single-qubit factor; only meaningful while the screen is a product state.
    bool is_product() const { return product_; }

    std::uint64_t tick() const { return tick_; }
    void advance_tick() { ++tick_; }

    const std::vector<TranscriptEntry> &transcript() const { return transcript_; }
    void set_recording(bool on) { recording_ = on; }
    bool recording() const { return recording_; }
    void clear_transcript() { transcript_.clear(); }

    // Replaces the qubit's tensor factor by the axis eigenstate for `bit`.
    void prepare_bit(std::size_t qubit, int bit, const BasisAxis &axis, const std::string &actor = "A");
    // Born measurement of the axis observable on one qubit; collapses the
    // screen. Returns (bit, exact probability of that bit). One uniform draw.
    std::pair<int, double> read_bit(std::size_t qubit, const BasisAxis &axis, Rng &rng, const std::string &actor = "A");
    // Probability that a read along `axis` yields `bit`, without collapse.
    double bit_probability(std::size_t qubit, const BasisAxis &axis, int bit) const;

    // Per (tick, qubit): a preparation by one actor precedes any read by a
    // different actor within that tick.
    bool prepare_precedes_measure() const;

    void write_transcript_csv(std::ostream &os) const;

private:
    void log(std::size_t qubit, const std::string &actor, ScreenAction a, const BasisAxis &axis, int bit, double p);
    void check_index(std::size_t qubit) const;
    void to_dense();

    std::size_t n_;
    bool product_ = true;
    std::vector<Eigen::Vector2cd> factors_;
    std::optional<StateVector> joint_;
    std::uint64_t tick_ = 0;
    bool recording_ = true;
    std::vector<TranscriptEntry> transcript_;
};

// Free-function forms matching the module's operation list.
void prepare_bit(QubitScreen &screen, std::size_t qubit, int bit, const BasisAxis &axis,
                 const std::string &actor = "A");
std::pair<int, double> read_bit(QubitScreen &screen, std::size_t qubit, const BasisAxis &axis, Rng &rng,
                                const std::string &actor = "A");

// -------------------------------------------------------------------- sectors

struct SectorMap {
    std::size_t n_qubits = 0;
    std::vector<std::size_t> E, F, Y;
    // Optional refinement of E.
    bool refined = false;
    std::vector<std::size_t> P, R, Etilde;

    bool symmetry_broken = false;
    bool trivial() const { return !symmetry_broken; }

    // Lookup by name: "E", "F", "Y", "P", "R", "Etilde".
    const std::vector<std::size_t> &sector(const std::string &name) const;
    bool has_sector(const std::string &name) const;
};

// Keys: E, F, Y and optionally P, R, Etilde. Missing top-level keys mean empty.
SectorMap decompose_sectors(std::size_t n_qubits, const std::map<std::string, std::vector<std::size_t>> &assignment);

// --------------------------------------------------------------- interaction

struct InteractionSpec {
    std::vector<double> alphas;
    double beta = kLn2;
    double temperature = 310.0;  // K
    std::vector<BasisAxis> axes_a;
    std::vector<BasisAxis> axes_b;

    std::size_t n() const { return alphas.size(); }
    // Energy exchanged per cycle, beta k_B T, in joules.
    double cycle_energy() const;
    const std::vector<BasisAxis> &axes(char actor) const { return actor == 'B' ? axes_b : axes_a; }
};

InteractionSpec build_interaction(std::vector<double> alphas, double beta, double temperature,
                                  std::vector<BasisAxis> axes_a, std::vector<BasisAxis> axes_b);

// sum_i alpha_i (n_i . sigma)_i on the n screen qubits for one actor, in units of
// beta k_B T.
HermitianOperator screen_operator(const InteractionSpec &spec, char actor);

// Energy per cycle for each nonempty top-level sector (E, F, Y), joules.
std::map<std::string, double> sector_energy(const InteractionSpec &spec, const SectorMap &sectors,
                                            const std::map<std::string, double> &per_sector_beta);

// bits * beta * k_B * T, joules.
double landauer_cost(double bits, double temperature, double beta = kLn2);
// hbar / (ln2 k_B T): minimal time to irreversibly record one bit.
double minimal_bit_time(double temperature);
// pi hbar / (2 ln2 k_B T): thermal dissipation time.
double dissipation_time(double temperature);

}  // namespace qfep
