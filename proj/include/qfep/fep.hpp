#pragma once

// Episodes of an agent reading a scripted environment through the screen, and
// the derivative-free search over the agent's basis angles that minimizes
// per-sector prediction error.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfep/agent.hpp"

namespace qfep {

enum class EnvironmentMode {
    scripted,             // B prepares its record along fixed axes every tick
    random_basis,         // B draws a fresh random axis per qubit every tick
    alternating_context,  // B uses `axes` on even ticks and `alt_axes` on odd ticks
};

std::string_view to_string(EnvironmentMode m);
EnvironmentMode environment_mode_from_string(std::string_view s);

struct Environment {
    EnvironmentMode mode = EnvironmentMode::scripted;
    // B's record dynamics over E records (bit i <-> i-th qubit of the E sector).
    MarkovKernel kernel;
    std::vector<BasisAxis> axes;
    std::vector<BasisAxis> alt_axes;
};

// w-bit counter: each record steps to its successor mod 2^w.
MarkovKernel counting_cycle(std::size_t width);
// Counting order with the last two records swapped. For width >= 3 no
// bit-complement pattern maps the cycle onto itself.
MarkovKernel twisted_cycle(std::size_t width);

struct Scenario {
    SectorMap sectors;
    Environment env;
    std::size_t ticks = 20000;
    // Agent uses frame (tick mod #frames) when on, frame 0 otherwise.
    bool context_switching = false;
    bool entanglement_probe = true;
};

// E = qubits 0-2, F = 3, Y = 4-10 (two 3-bit records and a label bit).
// B runs the twisted 3-bit cycle along z.
Scenario alignment_scenario(std::size_t ticks = 10000);
// One frame "U" over E with every axis at polar angle theta; F and Y along z.
Agent alignment_agent(const Scenario &s, double theta, const std::string &name = "A");

// True kernels for E and, when refined, the P and R marginals under the
// stationary distribution of the environment kernel.
std::map<std::string, MarkovKernel> true_kernels(const Scenario &s);

struct EpisodeResult {
    double score = 0.0;  // sum of Er over modelled sectors
    std::map<std::string, double> er;
    std::map<std::string, MarkovKernel> learned;
    bool identification_failure = false;
    double entanglement_bits = 0.0;
};

// Runs a fresh copy of the agent for s.ticks cycles. Reads and environment use
// separate forks of `rng`, so two calls with equal streams share random numbers.
EpisodeResult run_episode(const Agent &agent, const Scenario &s, const Rng &rng);

// Polar angle in the x-z plane of one frame axis.
double frame_angle(const Agent &agent, std::size_t frame, std::size_t position);
void set_frame_angle(Agent &agent, std::size_t frame, std::size_t position, double theta);

// A search coordinate: the global rotation of a frame (no position) or the
// offset of one of its axes from that rotation. Axis angle = global + offset.
struct AngleParam {
    std::size_t frame;
    std::optional<std::size_t> position;
};

struct TrajectoryStep {
    std::size_t step = 0;
    double evaluated = 0.0;  // score of this evaluation
    double score = 0.0;      // best so far
    // Per-sector Er and parameters of the best-so-far point.
    std::map<std::string, double> er;
    std::vector<double> angles;
    double entanglement_bits = 0.0;
};

struct Trajectory {
    std::vector<std::string> param_names;
    std::vector<TrajectoryStep> steps;
    // Episode at the best point.
    EpisodeResult best;

    // step,score,Er_E,Er_P,Er_R,<params>,entanglement_bits; absent sectors blank.
    void write_csv(std::ostream &os) const;
};

struct FepOptions {
    std::size_t budget = 200;
    double tolerance = 2e-3;
    // Grid points scanned to bracket the first coordinate on the first sweep.
    std::size_t grid = 13;
    // Points per axis of the joint grid over global rotations when several
    // frames are optimized together.
    std::size_t joint_grid = 8;
    // Empty means, for every frame the scenario uses, its global rotation
    // followed by each axis offset.
    std::vector<AngleParam> params;
};

// Coordinate descent, round-robin. The first sweep brackets the first
// coordinate on a grid over a full turn (or, with several frames, all global
// rotations on a joint grid) and refines by golden section;
// later sweeps run golden section on every coordinate over a shrinking window.
// Leaves the agent at the best point found.
Trajectory fep_minimize(Agent &agent, const Scenario &s, const FepOptions &opt, const Rng &rng);

// Largest angle between the agent's frame axes and the environment's axes for
// the same qubits (frame k is compared with axes for k even, alt_axes for k odd).
double misalignment(const Agent &agent, const Scenario &s);

struct NoiseFloor {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> samples;
};

// Score statistics of `episodes` independent episodes at the agent's current axes.
NoiseFloor noise_floor(const Agent &agent, const Scenario &s, std::size_t episodes, const Rng &rng);

enum class SectorOverlap { contains, contained, overlap, equal, disjoint };
std::string_view to_string(SectorOverlap o);
SectorOverlap sector_overlap(const std::vector<std::size_t> &x_a, const std::vector<std::size_t> &x_b);

struct NoiseDecomposition {
    double noise_floor = 0.0;
    double learning_gap = 0.0;
    SectorOverlap relation = SectorOverlap::equal;
};

// Floor = mean best-so-far score over the last `tail_window` steps; gap =
// initial score minus floor.
NoiseDecomposition noise_decomposition(const Trajectory &t, std::size_t tail_window,
                                       const std::vector<std::size_t> &x_a, const std::vector<std::size_t> &x_b);

}  // namespace qfep
