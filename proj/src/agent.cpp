#include "qfep/agent.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qfep/error.hpp"

namespace qfep {

namespace {

std::size_t ceil_log2(std::size_t n) {
    std::size_t b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
}

}  // namespace

std::size_t memory_capacity(std::size_t dim_e, std::size_t n_records) {
    require(n_records >= 1, ErrorKind::invalid_argument, "memory needs at least one record");
    return n_records * dim_e + ceil_log2(n_records);
}

std::size_t max_records(std::size_t width, std::size_t y_bits) {
    std::size_t n = 0;
    while (memory_capacity(width, n + 1) <= y_bits) {
        ++n;
        if (width == 0 && n > y_bits + 64) break;
    }
    return n;
}

Bits coarse_grain(const std::vector<Bits> &samples, std::size_t width) {
    require(!samples.empty(), ErrorKind::invalid_argument, "coarse_grain needs at least one sample");
    const std::size_t in = samples.front().size();
    for (const auto &s : samples) require(s.size() == in, ErrorKind::invalid_argument, "samples differ in width");
    require(width <= in, ErrorKind::invalid_argument, "record width exceeds sample width");
    Bits out(width);
    for (std::size_t i = 0; i < width; ++i) {
        std::size_t ones = 0;
        for (const auto &s : samples) ones += s[i] ? 1 : 0;
        out[i] = 2 * ones > samples.size() ? 1 : 0;
    }
    return out;
}

std::string bits_to_string(const Bits &b) {
    std::string s;
    s.reserve(b.size());
    for (int v : b) s.push_back(v ? '1' : '0');
    return s;
}

Bits string_to_bits(const std::string &s) {
    Bits b;
    b.reserve(s.size());
    for (char c : s) {
        require(c == '0' || c == '1', ErrorKind::invalid_argument, "record strings are made of 0 and 1");
        b.push_back(c == '1');
    }
    return b;
}

std::size_t bits_to_index(const Bits &b) {
    std::size_t v = 0;
    for (int x : b) v = (v << 1) | static_cast<std::size_t>(x & 1);
    return v;
}

// --------------------------------------------------------------------- clock

ClockTransition GroupoidClock::tick(const std::string &context) {
    ClockTransition t{current_, current_ + 1, {context}};
    ++current_;
    if (logging_) log_.push_back(t);
    return t;
}

bool GroupoidClock::composable(const ClockTransition &first, const ClockTransition &second) {
    return first.to == second.from;
}

ClockTransition GroupoidClock::compose(const ClockTransition &first, const ClockTransition &second) {
    require(composable(first, second), ErrorKind::invalid_argument,
            "transitions do not compose: " + std::to_string(first.to) + " != " + std::to_string(second.from));
    ClockTransition out{first.from, second.to, first.contexts};
    for (const auto &c : second.contexts)
        if (out.contexts.empty() || out.contexts.back() != c) out.contexts.push_back(c);
    return out;
}

ClockTransition GroupoidClock::inverse(const ClockTransition &t) {
    return {t.to, t.from, std::vector<std::string>(t.contexts.rbegin(), t.contexts.rend())};
}

// --------------------------------------------------------------------- agent

Agent::Agent(std::string name, SectorMap sectors, std::vector<BasisAxis> axes, std::vector<QRF> frames,
             LearningConfig learning, double temperature, double beta, double f_allowance)
    : name_(std::move(name)), sectors_(std::move(sectors)), axes_(std::move(axes)), frames_(std::move(frames)),
      learning_(learning), temperature_(temperature), beta_(beta), f_allowance_(f_allowance) {
    require(axes_.size() == sectors_.n_qubits, ErrorKind::invalid_argument, "one axis per screen qubit is required");
    require(!sectors_.E.empty(), ErrorKind::invalid_argument, "agent needs a nonempty E sector");
    require(!frames_.empty(), ErrorKind::invalid_argument, "agent needs at least one E frame");
    require(learning_.samples_per_tick >= 1, ErrorKind::invalid_argument, "samples_per_tick must be positive");
    require(learning_.smoothing >= 0.0, ErrorKind::invalid_argument, "smoothing must be non-negative");
    require(f_allowance_ >= 0.0, ErrorKind::invalid_argument, "F allowance must be non-negative");
    require(beta_ >= kLn2 * (1.0 - 1e-12), ErrorKind::landauer_violation, "beta below ln 2");
    const std::set<std::size_t> e(sectors_.E.begin(), sectors_.E.end());
    const std::size_t out_width = frames_.front().program.output_width();
    for (const auto &f : frames_) {
        require(std::set<std::size_t>(f.sector.begin(), f.sector.end()) == e, ErrorKind::invalid_argument,
                "frame " + f.name + " must cover exactly the E sector");
        require(f.program.output_width() == out_width, ErrorKind::invalid_argument, "frames disagree on record width");
    }
    width_ = learning_.record_width == 0 ? out_width : learning_.record_width;
    require(width_ >= 1 && width_ <= out_width, ErrorKind::invalid_argument, "record width out of range");
    slots_ = max_records(width_, sectors_.Y.size());
    label_bits_ = slots_ > 0 ? ceil_log2(slots_) : 0;

    const double lambda = learning_.smoothing;
    models_.emplace("E", KernelModel(bit_alphabet(width_), lambda));
    if (sectors_.refined) {
        require(width_ == out_width && frames_.front().program.output_width() == sectors_.E.size(),
                ErrorKind::invalid_argument, "P and R models need full-width identity-shaped records");
        if (!sectors_.P.empty()) models_.emplace("P", KernelModel(bit_alphabet(sectors_.P.size()), lambda));
        if (!sectors_.R.empty()) models_.emplace("R", KernelModel(bit_alphabet(sectors_.R.size()), lambda));
    }
}

void Agent::set_active_context(std::size_t i) {
    require(i < frames_.size(), ErrorKind::invalid_argument, "no such frame");
    active_ = i;
}

const KernelModel &Agent::model(const std::string &sector) const {
    auto it = models_.find(sector);
    require(it != models_.end(), ErrorKind::invalid_argument, "agent has no model for sector '" + sector + "'");
    return it->second;
}

std::vector<std::string> Agent::modelled_sectors() const {
    std::vector<std::string> out;
    for (const char *s : {"E", "P", "R"})
        if (models_.count(s)) out.push_back(s);
    return out;
}

double Agent::r_change_fraction() const {
    return r_observed_ == 0 ? 0.0 : static_cast<double>(r_changes_) / static_cast<double>(r_observed_);
}

void Agent::write_slot(QubitScreen &screen, std::size_t slot, const Bits &record) {
    const auto &y = sectors_.Y;
    for (std::size_t i = 0; i < record.size(); ++i) {
        const std::size_t q = y[slot * width_ + i];
        screen.prepare_bit(q, record[i], axes_[q], name_);
    }
    // Label bits hold the index of the newest slot.
    for (std::size_t i = 0; i < label_bits_; ++i) {
        const std::size_t q = y[slots_ * width_ + i];
        screen.prepare_bit(q, static_cast<int>((slot >> (label_bits_ - 1 - i)) & 1), axes_[q], name_);
    }
}

Bits Agent::read_slot(QubitScreen &screen, std::size_t slot, Rng &rng) {
    Bits out(width_);
    for (std::size_t i = 0; i < width_; ++i) {
        const std::size_t q = sectors_.Y[slot * width_ + i];
        out[i] = screen.read_bit(q, axes_[q], rng, name_).first;
    }
    return out;
}

Bits Agent::project(const Bits &record, const std::vector<std::size_t> &sector) const {
    const auto &frame_sector = frames_[active_].sector;
    Bits out;
    out.reserve(sector.size());
    for (std::size_t q : sector) {
        auto it = std::find(frame_sector.begin(), frame_sector.end(), q);
        out.push_back(record[static_cast<std::size_t>(it - frame_sector.begin())]);
    }
    return out;
}

void Agent::learn(const Bits &prev, const Bits &next) {
    models_.at("E").observe(bits_to_index(prev), bits_to_index(next));
    if (auto it = models_.find("P"); it != models_.end())
        it->second.observe(bits_to_index(project(prev, sectors_.P)), bits_to_index(project(next, sectors_.P)));
    if (auto it = models_.find("R"); it != models_.end()) {
        const Bits a = project(prev, sectors_.R);
        const Bits b = project(next, sectors_.R);
        it->second.observe(bits_to_index(a), bits_to_index(b));
        ++r_observed_;
        if (a != b) ++r_changes_;
    }
}

void Agent::reset() {
    tape_.clear();
    clock_ = GroupoidClock();
    for (auto &[_, m] : models_) m.reset();
    f_spent_ = 0.0;
    r_changes_ = 0;
    r_observed_ = 0;
}

void Agent::consolidate_memory(QubitScreen &screen) {
    if (tape_.size() <= 1) return;
    MemoryRecord last = tape_.back();
    tape_.clear();
    write_slot(screen, 0, last.payload);
    tape_.push_back(std::move(last));
}

RcwResult Agent::read_compare_write(QubitScreen &screen, Rng &rng) {
    require(screen.n_qubits() == sectors_.n_qubits, ErrorKind::invalid_argument, "screen size does not match sectors");
    require(slots_ > 0, ErrorKind::memory_full,
            "Y holds " + std::to_string(sectors_.Y.size()) + " bits, one record needs " +
                std::to_string(memory_capacity(width_, 1)));
    require(tape_.size() < slots_, ErrorKind::memory_full,
            "tape holds " + std::to_string(tape_.size()) + " records of " + std::to_string(width_) +
                " bits; capacity is " + std::to_string(slots_));

    const QRF &frame = frames_[active_];
    std::vector<Bits> samples;
    samples.reserve(learning_.samples_per_tick);
    for (std::size_t s = 0; s < learning_.samples_per_tick; ++s) samples.push_back(frame.read(screen, rng, name_));
    Bits record = coarse_grain(samples, width_);

    std::optional<Bits> prev;
    std::vector<bool> comparison;
    if (!tape_.empty()) {
        prev = read_slot(screen, tape_.size() - 1, rng);
        comparison.resize(width_);
        for (std::size_t i = 0; i < width_; ++i) comparison[i] = (*prev)[i] == record[i];
    }

    const double cost = static_cast<double>(width_) * landauer_cost(1.0, temperature_, beta_);
    require(f_spent_ + cost <= f_allowance_ * (1.0 + 1e-12), ErrorKind::thermodynamic_starvation,
            "F budget exhausted after " + std::to_string(clock_.current_tick()) + " ticks");
    f_spent_ += cost;

    const ClockTransition t = clock_.tick(frame.name);
    write_slot(screen, tape_.size(), record);
    tape_.push_back({t.to, record});
    if (prev) learn(*prev, record);
    return {t.to, std::move(record), std::move(comparison)};
}

RcwResult read_compare_write(Agent &agent, QubitScreen &screen, Rng &rng) {
    return agent.read_compare_write(screen, rng);
}

PredictionError prediction_error(const Agent &agent, const std::string &sector, const MarkovKernel &true_kernel) {
    const KernelModel &m = agent.model(sector);
    PredictionError out;
    out.value = kernel_distance(m.kernel(), true_kernel);
    if (sector == "R") out.identification_failure = agent.r_change_fraction() > agent.learning().r_flag_threshold;
    return out;
}

double vfe(double surprisal, double divergence) {
    require(std::isfinite(surprisal), ErrorKind::invalid_argument, "surprisal must be finite");
    require(divergence >= 0.0 && std::isfinite(divergence), ErrorKind::invalid_argument,
            "divergence must be finite and non-negative");
    return surprisal + divergence;
}

double kl_divergence(const std::vector<double> &p, const std::vector<double> &q) {
    require(p.size() == q.size(), ErrorKind::invalid_argument, "distributions differ in size");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        require(q[i] > 0.0, ErrorKind::invalid_argument, "q does not cover the support of p");
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

}  // namespace qfep
