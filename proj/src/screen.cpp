#include "qfep/screen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "qfep/error.hpp"

namespace qfep {

// ------------------------------------------------------------------ BasisAxis

BasisAxis::BasisAxis(std::array<double, 3> direction) : dir_(direction) {
    const double n = std::sqrt(dir_[0] * dir_[0] + dir_[1] * dir_[1] + dir_[2] * dir_[2]);
    require(std::abs(n - 1.0) <= kStateTol, ErrorKind::invalid_argument, "basis axis must be unit norm");
}

BasisAxis BasisAxis::from_angle(double theta) { return normalized({std::sin(theta), 0.0, std::cos(theta)}); }

BasisAxis BasisAxis::from_spherical(double theta, double phi) {
    return normalized({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
}

BasisAxis BasisAxis::normalized(std::array<double, 3> v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    require(n > 0.0 && std::isfinite(n), ErrorKind::invalid_argument, "cannot normalize a zero axis");
    return BasisAxis({v[0] / n, v[1] / n, v[2] / n});
}

double BasisAxis::dot(const BasisAxis &o) const {
    return dir_[0] * o.dir_[0] + dir_[1] * o.dir_[1] + dir_[2] * o.dir_[2];
}

double BasisAxis::angle_to(const BasisAxis &o) const { return std::acos(std::clamp(dot(o), -1.0, 1.0)); }

Eigen::Matrix2cd BasisAxis::observable() const {
    return dir_[0] * pauli::x() + dir_[1] * pauli::y() + dir_[2] * pauli::z();
}

Eigen::Vector2cd BasisAxis::eigenstate(int bit) const {
    require(bit == 0 || bit == 1, ErrorKind::invalid_argument, "bit must be 0 or 1");
    const double theta = std::acos(std::clamp(dir_[2], -1.0, 1.0));
    const double phi = std::atan2(dir_[1], dir_[0]);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const cplx e = std::polar(1.0, phi);
    Eigen::Vector2cd v;
    if (bit == 0)
        v << c, e * s;
    else
        v << s, -e * c;
    return v;
}

// ---------------------------------------------------------------- QubitScreen

QubitScreen::QubitScreen(std::size_t n_qubits) : n_(n_qubits) {
    require(n_ > 0, ErrorKind::invalid_argument, "screen needs at least one qubit");
    factors_.assign(n_, Eigen::Vector2cd(1.0, 0.0));
}

QubitScreen::QubitScreen(const StateVector &joint) : n_(joint.num_subsystems()), product_(false), joint_(joint) {
    for (std::size_t d : joint.dims()) require(d == 2, ErrorKind::invalid_argument, "screen subsystems must be qubits");
}

StateVector QubitScreen::joint_state() const {
    if (!product_) return *joint_;
    Eigen::VectorXcd amps(Eigen::Index(1) << n_);
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        cplx a = 1.0;
        for (std::size_t q = 0; q < n_; ++q) {
            const auto b = (i >> (n_ - 1 - q)) & 1;
            a *= factors_[q][b];
        }
        amps[i] = a;
    }
    return StateVector::normalized(Dims(n_, 2), std::move(amps));
}

void QubitScreen::check_index(std::size_t qubit) const {
    require(qubit < n_, ErrorKind::invalid_argument, "qubit index " + std::to_string(qubit) + " out of range");
}

void QubitScreen::to_dense() {
    if (!product_) return;
    joint_ = joint_state();
    product_ = false;
    factors_.clear();
}

void QubitScreen::log(std::size_t qubit, const std::string &actor, ScreenAction a, const BasisAxis &axis, int bit,
                      double p) {
    if (!recording_) return;
    transcript_.push_back({tick_, qubit, actor, a, axis.direction(), bit, p});
}

void QubitScreen::prepare_bit(std::size_t qubit, int bit, const BasisAxis &axis, const std::string &actor) {
    check_index(qubit);
    require(bit == 0 || bit == 1, ErrorKind::invalid_argument, "bit must be 0 or 1");
    const Eigen::Vector2cd f = axis.eigenstate(bit);
    if (product_) {
        factors_[qubit] = f;
    } else if (n_ == 1) {
        joint_ = StateVector(Dims{2}, Eigen::VectorXcd(f));
    } else {
        // Replacement of one tensor factor. If the qubit is entangled with the
        // rest, the rest keeps its dominant Schmidt component.
        const SchmidtDecomposition sd = schmidt(*joint_, {qubit});
        const StateVector &rest = sd.right_basis.front();
        Eigen::VectorXcd amps(joint_->amplitudes().size());
        const std::size_t right = std::size_t{1} << (n_ - 1 - qubit);
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            const std::size_t b = (idx / right) & 1;
            const std::size_t hi = idx / (2 * right);
            const std::size_t lo = idx % right;
            amps[i] = f[static_cast<Eigen::Index>(b)] * rest[hi * right + lo];
        }
        joint_ = StateVector::normalized(Dims(n_, 2), std::move(amps));
    }
    log(qubit, actor, ScreenAction::prepare, axis, bit, 1.0);
}

std::pair<int, double> QubitScreen::read_bit(std::size_t qubit, const BasisAxis &axis, Rng &rng,
                                             const std::string &actor) {
    check_index(qubit);
    int bit = 0;
    double p = 1.0;
    if (product_) {
        const Eigen::Vector2cd up = axis.eigenstate(0);
        const Eigen::Vector2cd &f = factors_[qubit];
        const double p0 = std::clamp(std::norm(up.dot(f)), 0.0, 1.0);
        const double u = rng.uniform();
        if (u < p0 || 1.0 - p0 <= 1e-15) {
            bit = 0;
            p = p0;
            factors_[qubit] = up;
        } else {
            bit = 1;
            p = 1.0 - p0;
            factors_[qubit] = axis.eigenstate(1);
        }
    } else {
        Measurement m = born_measure(*joint_, HermitianOperator(axis.observable()), qubit, rng);
        bit = bit_of(m.outcome);
        p = m.probability;
        joint_ = std::move(m.post_state);
    }
    log(qubit, actor, ScreenAction::read, axis, bit, p);
    return {bit, p};
}

double QubitScreen::bit_probability(std::size_t qubit, const BasisAxis &axis, int bit) const {
    check_index(qubit);
    if (product_) {
        const double p0 = std::clamp(std::norm(axis.eigenstate(0).dot(factors_[qubit])), 0.0, 1.0);
        return bit == 0 ? p0 : 1.0 - p0;
    }
    return born_probability(*joint_, HermitianOperator(axis.observable()), qubit, outcome_of(bit));
}

bool QubitScreen::prepare_precedes_measure() const {
    std::map<std::pair<std::uint64_t, std::size_t>, std::vector<const TranscriptEntry *>> groups;
    for (const auto &e : transcript_) groups[{e.tick, e.qubit}].push_back(&e);
    for (const auto &[key, entries] : groups) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i]->action != ScreenAction::read) continue;
            for (std::size_t j = i + 1; j < entries.size(); ++j)
                if (entries[j]->action == ScreenAction::prepare && entries[j]->actor != entries[i]->actor) return false;
        }
    }
    return true;
}

void QubitScreen::write_transcript_csv(std::ostream &os) const {
    os << "tick,qubit,actor,action,axis_xyz,bit,probability\n";
    char buf[256];
    for (const auto &e : transcript_) {
        std::snprintf(buf, sizeof buf, "%llu,%zu,%s,%s,%.17g %.17g %.17g,%d,%.17g\n",
                      static_cast<unsigned long long>(e.tick), e.qubit, e.actor.c_str(),
                      e.action == ScreenAction::prepare ? "prepare" : "read", e.axis[0], e.axis[1], e.axis[2], e.bit,
                      e.probability);
        os << buf;
    }
}

void prepare_bit(QubitScreen &screen, std::size_t qubit, int bit, const BasisAxis &axis, const std::string &actor) {
    screen.prepare_bit(qubit, bit, axis, actor);
}

std::pair<int, double> read_bit(QubitScreen &screen, std::size_t qubit, const BasisAxis &axis, Rng &rng,
                                const std::string &actor) {
    return screen.read_bit(qubit, axis, rng, actor);
}

// -------------------------------------------------------------------- sectors

const std::vector<std::size_t> &SectorMap::sector(const std::string &name) const {
    if (name == "E") return E;
    if (name == "F") return F;
    if (name == "Y") return Y;
    if (name == "P") return P;
    if (name == "R") return R;
    if (name == "Etilde") return Etilde;
    fail(ErrorKind::invalid_argument, "unknown sector '" + name + "'");
}

bool SectorMap::has_sector(const std::string &name) const {
    if (name == "E" || name == "F" || name == "Y") return !sector(name).empty();
    if (name == "P" || name == "R" || name == "Etilde") return refined && !sector(name).empty();
    return false;
}

SectorMap decompose_sectors(std::size_t n_qubits, const std::map<std::string, std::vector<std::size_t>> &assignment) {
    static const std::set<std::string> known{"E", "F", "Y", "P", "R", "Etilde"};
    SectorMap m;
    m.n_qubits = n_qubits;
    for (const auto &[name, idx] : assignment) {
        require(known.count(name) > 0, ErrorKind::invalid_partition, "unknown sector name '" + name + "'");
        for (std::size_t q : idx)
            require(q < n_qubits, ErrorKind::invalid_partition,
                    "sector " + name + " index " + std::to_string(q) + " out of range");
    }
    auto get = [&](const std::string &k) {
        auto it = assignment.find(k);
        std::vector<std::size_t> v = it == assignment.end() ? std::vector<std::size_t>{} : it->second;
        std::sort(v.begin(), v.end());
        return v;
    };
    m.E = get("E");
    m.F = get("F");
    m.Y = get("Y");

    std::vector<int> owner(n_qubits, 0);
    for (const auto *s : {&m.E, &m.F, &m.Y})
        for (std::size_t q : *s) {
            require(owner[q] == 0, ErrorKind::invalid_partition, "qubit " + std::to_string(q) + " in two sectors");
            owner[q] = 1;
        }
    for (std::size_t q = 0; q < n_qubits; ++q)
        require(owner[q] == 1, ErrorKind::invalid_partition, "qubit " + std::to_string(q) + " in no sector");

    if (assignment.count("P") || assignment.count("R") || assignment.count("Etilde")) {
        m.refined = true;
        m.P = get("P");
        m.R = get("R");
        m.Etilde = get("Etilde");
        std::vector<std::size_t> all;
        for (const auto *s : {&m.P, &m.R, &m.Etilde}) all.insert(all.end(), s->begin(), s->end());
        std::sort(all.begin(), all.end());
        require(std::adjacent_find(all.begin(), all.end()) == all.end(), ErrorKind::invalid_partition,
                "refinement sectors overlap");
        require(all == m.E, ErrorKind::invalid_partition, "P, R, Etilde must partition E");
    }
    int nonempty = 0;
    for (const auto *s : {&m.E, &m.F, &m.Y}) nonempty += s->empty() ? 0 : 1;
    m.symmetry_broken = nonempty > 1;
    return m;
}

// --------------------------------------------------------------- interaction

double InteractionSpec::cycle_energy() const { return beta * si::k_boltzmann * temperature; }

InteractionSpec build_interaction(std::vector<double> alphas, double beta, double temperature,
                                  std::vector<BasisAxis> axes_a, std::vector<BasisAxis> axes_b) {
    require(!alphas.empty(), ErrorKind::invalid_weights, "no interaction weights");
    double sum = 0.0;
    for (double a : alphas) {
        require(a >= 0.0 && a <= 1.0, ErrorKind::invalid_weights, "weights must lie in [0,1]");
        sum += a;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::invalid_weights, "weights must sum to 1");
    require(beta >= kLn2 - 1e-12, ErrorKind::landauer_violation, "beta must be at least ln 2");
    require(temperature > 0.0, ErrorKind::invalid_argument, "temperature must be positive");
    require(axes_a.size() == alphas.size() && axes_b.size() == alphas.size(), ErrorKind::invalid_argument,
            "one axis per screen qubit is required for each actor");
    InteractionSpec s;
    s.alphas = std::move(alphas);
    s.beta = beta;
    s.temperature = temperature;
    s.axes_a = std::move(axes_a);
    s.axes_b = std::move(axes_b);
    return s;
}

HermitianOperator screen_operator(const InteractionSpec &spec, char actor) {
    const std::size_t n = spec.n();
    const Dims dims(n, 2);
    const auto &axes = spec.axes(actor);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) h += spec.alphas[i] * embed(dims, axes[i].observable(), i);
    return HermitianOperator(std::move(h));
}

std::map<std::string, double> sector_energy(const InteractionSpec &spec, const SectorMap &sectors,
                                            const std::map<std::string, double> &per_sector_beta) {
    require(spec.n() == sectors.n_qubits, ErrorKind::invalid_argument, "sector map and interaction sizes differ");
    std::map<std::string, double> out;
    for (const std::string name : {"E", "F", "Y"}) {
        const auto &idx = sectors.sector(name);
        if (idx.empty()) continue;
        auto it = per_sector_beta.find(name);
        require(it != per_sector_beta.end(), ErrorKind::invalid_argument, "missing beta for sector " + name);
        require(it->second >= kLn2 - 1e-12, ErrorKind::landauer_violation, "sector " + name + " beta below ln 2");
        double w = 0.0;
        for (std::size_t q : idx) w += spec.alphas[q];
        out[name] = it->second * si::k_boltzmann * spec.temperature * w;
    }
    return out;
}

double landauer_cost(double bits, double temperature, double beta) {
    require(bits >= 0.0, ErrorKind::invalid_argument, "bit count must be non-negative");
    require(beta >= kLn2 - 1e-12, ErrorKind::landauer_violation, "beta must be at least ln 2");
    require(temperature > 0.0, ErrorKind::invalid_argument, "temperature must be positive");
    return bits * beta * si::k_boltzmann * temperature;
}

double minimal_bit_time(double temperature) { return si::hbar / (kLn2 * si::k_boltzmann * temperature); }

double dissipation_time(double temperature) {
    return std::numbers::pi * si::hbar / (2.0 * kLn2 * si::k_boltzmann * temperature);
}

}  // namespace qfep
