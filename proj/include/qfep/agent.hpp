#pragma once

// The agent side of the screen: a memory tape written into the Y sector, a
// groupoid clock, per-sector kernel models and free-energy bookkeeping.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfep/kernel.hpp"
#include "qfep/qrf.hpp"
#include "qfep/screen.hpp"

namespace qfep {

// n * dimE + ceil(log2 n) bits.
std::size_t memory_capacity(std::size_t dim_e, std::size_t n_records);
// Largest n with memory_capacity(width, n) <= y_bits; 0 if not even one fits.
std::size_t max_records(std::size_t width, std::size_t y_bits);

using Bits = std::vector<int>;

// Bitwise majority over the samples (ties go to 0), truncated to `width`.
Bits coarse_grain(const std::vector<Bits> &samples, std::size_t width);

std::string bits_to_string(const Bits &b);
Bits string_to_bits(const std::string &s);
// Index into bit_alphabet(b.size()).
std::size_t bits_to_index(const Bits &b);

struct MemoryRecord {
    std::uint64_t tick;
    Bits payload;
};

struct ClockTransition {
    std::uint64_t from;
    std::uint64_t to;
    // QRF contexts active along the transition, consecutive repeats merged.
    std::vector<std::string> contexts;
};

class GroupoidClock {
public:
    std::uint64_t current_tick() const { return current_; }
    const std::vector<ClockTransition> &log() const { return log_; }
    void set_logging(bool on) { logging_ = on; }

    // current -> current + 1 under `context`.
    ClockTransition tick(const std::string &context);

    static bool composable(const ClockTransition &first, const ClockTransition &second);
    // first then second; throws invalid-argument unless first.to == second.from.
    static ClockTransition compose(const ClockTransition &first, const ClockTransition &second);
    static ClockTransition inverse(const ClockTransition &t);

private:
    std::uint64_t current_ = 0;
    bool logging_ = true;
    std::vector<ClockTransition> log_;
};

struct LearningConfig {
    double smoothing = 1.0;
    // Record width; 0 means the full E sector.
    std::size_t record_width = 0;
    std::size_t samples_per_tick = 1;
    // Fraction of non-self R transitions above which identification fails.
    double r_flag_threshold = 0.05;
};

struct RcwResult {
    std::uint64_t tick;
    Bits record;
    // Per-bit equality with the previous record; empty on the first write.
    std::vector<bool> comparison;
};

struct PredictionError {
    double value = 0.0;
    bool identification_failure = false;
};

class Agent {
public:
    // `axes` has one entry per screen qubit and fixes how Y (and any other
    // non-frame sector) is written and read. `frames` are the E-reading QRFs,
    // each covering exactly the E sector. `f_allowance` is joules per episode.
    Agent(std::string name, SectorMap sectors, std::vector<BasisAxis> axes, std::vector<QRF> frames,
          LearningConfig learning = {}, double temperature = 310.0, double beta = kLn2,
          double f_allowance = std::numeric_limits<double>::infinity());

    const std::string &name() const { return name_; }
    const SectorMap &sectors() const { return sectors_; }
    const std::vector<BasisAxis> &axes() const { return axes_; }
    const std::vector<QRF> &qrfs() const { return frames_; }
    QRF &qrf(std::size_t i) { return frames_.at(i); }
    std::size_t active_context() const { return active_; }
    void set_active_context(std::size_t i);

    const LearningConfig &learning() const { return learning_; }
    std::size_t record_width() const { return width_; }
    std::size_t memory_slots() const { return slots_; }
    const std::vector<MemoryRecord> &memory() const { return tape_; }
    bool memory_full() const { return tape_.size() >= slots_; }
    // Keeps only the newest record, rewritten into the first slot.
    void consolidate_memory(QubitScreen &screen);

    GroupoidClock &clock() { return clock_; }
    const GroupoidClock &clock() const { return clock_; }

    double f_spent() const { return f_spent_; }
    double f_allowance() const { return f_allowance_; }
    void reset_f_budget() { f_spent_ = 0.0; }

    bool has_model(const std::string &sector) const { return models_.count(sector) != 0; }
    const KernelModel &model(const std::string &sector) const;
    // Sectors with a model, in order E, P, R.
    std::vector<std::string> modelled_sectors() const;
    // Fraction of observed R transitions that changed the record.
    double r_change_fraction() const;

    RcwResult read_compare_write(QubitScreen &screen, Rng &rng);

    // Forgets memory, clock, models and F spending; keeps frames and axes.
    void reset();

private:
    void write_slot(QubitScreen &screen, std::size_t slot, const Bits &record);
    Bits read_slot(QubitScreen &screen, std::size_t slot, Rng &rng);
    void learn(const Bits &prev, const Bits &next);
    Bits project(const Bits &record, const std::vector<std::size_t> &sector) const;

    std::string name_;
    SectorMap sectors_;
    std::vector<BasisAxis> axes_;
    std::vector<QRF> frames_;
    std::size_t active_ = 0;
    LearningConfig learning_;
    double temperature_;
    double beta_;
    double f_allowance_;
    double f_spent_ = 0.0;
    std::size_t width_;
    std::size_t slots_;
    std::size_t label_bits_;
    std::vector<MemoryRecord> tape_;
    GroupoidClock clock_;
    std::map<std::string, KernelModel> models_;
    std::size_t r_changes_ = 0;
    std::size_t r_observed_ = 0;
};

// Free-function form of the agent cycle.
RcwResult read_compare_write(Agent &agent, QubitScreen &screen, Rng &rng);

// Model is a learned kernel, reference the sector's true kernel. For the R
// sector the agent's R statistics must be constant, otherwise the
// identification-failure flag is raised.
PredictionError prediction_error(const Agent &agent, const std::string &sector, const MarkovKernel &true_kernel);

// F = surprisal + divergence, bits.
double vfe(double surprisal, double divergence);
// Kullback-Leibler divergence in bits; q must cover the support of p.
double kl_divergence(const std::vector<double> &p, const std::vector<double> &q);

}  // namespace qfep
