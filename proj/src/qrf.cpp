#include "qfep/qrf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qfep/error.hpp"

namespace qfep {

std::string_view to_string(GateOp op) {
    switch (op) {
    case GateOp::input: return "input";
    case GateOp::identity: return "id";
    case GateOp::negate: return "not";
    case GateOp::conj: return "and";
    case GateOp::disj: return "or";
    case GateOp::parity: return "xor";
    }
    return "?";
}

GateOp gate_from_string(std::string_view s) {
    if (s == "id" || s == "identity") return GateOp::identity;
    if (s == "not") return GateOp::negate;
    if (s == "and") return GateOp::conj;
    if (s == "or") return GateOp::disj;
    if (s == "xor" || s == "parity") return GateOp::parity;
    fail(ErrorKind::invalid_argument, "unknown gate '" + std::string(s) + "'");
}

// -------------------------------------------------------------- RecordProgram

RecordProgram::RecordProgram(std::size_t n_inputs, DiagramCCD diagram, std::vector<GateOp> ops,
                             std::vector<std::size_t> outputs)
    : n_inputs_(n_inputs), diagram_(std::move(diagram)), ops_(std::move(ops)), outputs_(std::move(outputs)) {
    const std::size_t n = diagram_.nodes().size();
    require(ops_.size() == n, ErrorKind::invalid_argument, "one gate per diagram node is required");
    require(n_inputs_ <= n, ErrorKind::invalid_argument, "more inputs than nodes");
    require(!outputs_.empty(), ErrorKind::invalid_argument, "program has no outputs");
    for (std::size_t i = 0; i < n; ++i)
        require((i < n_inputs_) == (ops_[i] == GateOp::input), ErrorKind::invalid_argument,
                "the first arity nodes, and only those, must be inputs");
    for (std::size_t o : outputs_) require(o < n, ErrorKind::invalid_argument, "output node out of range");

    inputs_of_.assign(n, {});
    for (const auto &e : diagram_.edges()) inputs_of_[e.to].push_back(e.from);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = inputs_of_[i].size();
        switch (ops_[i]) {
        case GateOp::input: require(k == 0, ErrorKind::invalid_argument, "input nodes take no edges"); break;
        case GateOp::identity:
        case GateOp::negate: require(k == 1, ErrorKind::invalid_argument, "unary gate needs exactly one input"); break;
        default: require(k >= 1, ErrorKind::invalid_argument, "gate has no inputs");
        }
    }

    // Topological order; rejects cycles.
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = inputs_of_[i].size();
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        const std::size_t u = ready.front();
        ready.erase(ready.begin());
        order_.push_back(u);
        for (const auto &e : diagram_.edges())
            if (e.from == u && --indeg[e.to] == 0) ready.push_back(e.to);
    }
    require(order_.size() == n, ErrorKind::invalid_argument, "program diagram has a cycle");
    require(diagram_.depth() <= 3, ErrorKind::invalid_argument, "program exceeds three layers");
}

RecordProgram RecordProgram::identity(std::size_t width) {
    DiagramCCD d;
    std::vector<GateOp> ops;
    std::vector<std::size_t> outs;
    for (std::size_t i = 0; i < width; ++i) {
        d.add_node("in" + std::to_string(i));
        ops.push_back(GateOp::input);
        outs.push_back(i);
    }
    return RecordProgram(width, std::move(d), std::move(ops), std::move(outs));
}

RecordProgram RecordProgram::negation(std::size_t width) {
    DiagramCCD d;
    std::vector<GateOp> ops;
    std::vector<std::size_t> outs;
    for (std::size_t i = 0; i < width; ++i) {
        d.add_node("in" + std::to_string(i));
        ops.push_back(GateOp::input);
    }
    for (std::size_t i = 0; i < width; ++i) {
        const std::size_t o = d.add_node("not" + std::to_string(i));
        d.add_edge(i, o, 1.0);
        ops.push_back(GateOp::negate);
        outs.push_back(o);
    }
    return RecordProgram(width, std::move(d), std::move(ops), std::move(outs));
}

std::vector<int> RecordProgram::run(const std::vector<int> &bits) const {
    require(bits.size() == n_inputs_, ErrorKind::invalid_argument, "program input arity mismatch");
    std::vector<int> val(ops_.size(), 0);
    for (std::size_t u : order_) {
        const auto &in = inputs_of_[u];
        switch (ops_[u]) {
        case GateOp::input: val[u] = bits[u] & 1; break;
        case GateOp::identity: val[u] = val[in[0]]; break;
        case GateOp::negate: val[u] = 1 - val[in[0]]; break;
        case GateOp::conj: {
            int v = 1;
            for (std::size_t s : in) v &= val[s];
            val[u] = v;
            break;
        }
        case GateOp::disj: {
            int v = 0;
            for (std::size_t s : in) v |= val[s];
            val[u] = v;
            break;
        }
        case GateOp::parity: {
            int v = 0;
            for (std::size_t s : in) v ^= val[s];
            val[u] = v;
            break;
        }
        }
    }
    std::vector<int> out;
    out.reserve(outputs_.size());
    for (std::size_t o : outputs_) out.push_back(val[o]);
    return out;
}

namespace {
std::vector<int> bits_of(std::size_t v, std::size_t width) {
    std::vector<int> b(width);
    for (std::size_t i = 0; i < width; ++i) b[i] = static_cast<int>((v >> (width - 1 - i)) & 1);
    return b;
}
}  // namespace

bool RecordProgram::invertible() const {
    require(n_inputs_ <= 16, ErrorKind::resource_limit, "program arity too large to invert");
    std::set<std::vector<int>> images;
    for (std::size_t v = 0; v < (std::size_t{1} << n_inputs_); ++v)
        if (!images.insert(run(bits_of(v, n_inputs_))).second) return false;
    return true;
}

std::vector<int> RecordProgram::preimage(const std::vector<int> &record) const {
    require(invertible(), ErrorKind::invalid_argument, "program is not invertible; cannot prepare from a record");
    for (std::size_t v = 0; v < (std::size_t{1} << n_inputs_); ++v) {
        auto in = bits_of(v, n_inputs_);
        if (run(in) == record) return in;
    }
    fail(ErrorKind::invalid_argument, "record is not in the program's image");
}

// ------------------------------------------------------------------------ QRF

QRF::QRF(std::string name_, std::vector<std::size_t> sector_, std::vector<BasisAxis> axes_)
    : QRF(std::move(name_), sector_, std::move(axes_), RecordProgram::identity(sector_.size())) {}

QRF::QRF(std::string name_, std::vector<std::size_t> sector_, std::vector<BasisAxis> axes_, RecordProgram program_)
    : name(std::move(name_)), sector(std::move(sector_)), axes(std::move(axes_)), program(std::move(program_)) {
    require(!sector.empty(), ErrorKind::invalid_argument, "QRF sector is empty");
    std::vector<std::size_t> s = sector;
    std::sort(s.begin(), s.end());
    require(std::adjacent_find(s.begin(), s.end()) == s.end(), ErrorKind::invalid_argument,
            "QRF sector indices must be distinct");
    require(axes.size() == sector.size(), ErrorKind::invalid_argument, "one axis per sector qubit is required");
    require(program.arity() == sector.size(), ErrorKind::invalid_argument, "program arity must equal sector size");
}

std::vector<int> QRF::read(QubitScreen &screen, Rng &rng, const std::string &actor) const {
    std::vector<int> bits(sector.size());
    for (std::size_t k = 0; k < sector.size(); ++k) bits[k] = screen.read_bit(sector[k], axes[k], rng, actor).first;
    return program.run(bits);
}

void QRF::set_axis(std::size_t qubit, const BasisAxis &axis) {
    auto it = std::find(sector.begin(), sector.end(), qubit);
    require(it != sector.end(), ErrorKind::invalid_argument, "qubit not in QRF sector");
    axes[static_cast<std::size_t>(it - sector.begin())] = axis;
}

namespace {

// Product observable of the frame restricted to `support` (ascending qubits).
Eigen::MatrixXcd restricted_observable(const QRF &q, const std::vector<std::size_t> &support) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t qubit : support) {
        auto it = std::find(q.sector.begin(), q.sector.end(), qubit);
        const Eigen::MatrixXcd f = it == q.sector.end()
                                       ? Eigen::MatrixXcd(Eigen::Matrix2cd::Identity())
                                       : Eigen::MatrixXcd(q.axes[static_cast<std::size_t>(it - q.sector.begin())].observable());
        out = kron(out, f);
    }
    return out;
}

}  // namespace

HermitianOperator observable_of(const QRF &q, std::size_t n_qubits) {
    for (std::size_t s : q.sector) require(s < n_qubits, ErrorKind::invalid_argument, "QRF sector outside the screen");
    require(n_qubits <= 12, ErrorKind::resource_limit, "screen too large for a dense observable");
    std::vector<std::size_t> all(n_qubits);
    for (std::size_t i = 0; i < n_qubits; ++i) all[i] = i;
    return HermitianOperator(restricted_observable(q, all));
}

double commutator_norm(const QRF &a, const QRF &b) {
    std::set<std::size_t> u(a.sector.begin(), a.sector.end());
    u.insert(b.sector.begin(), b.sector.end());
    const std::vector<std::size_t> support(u.begin(), u.end());
    require(support.size() <= 12, ErrorKind::resource_limit, "QRF supports too large");
    const Eigen::MatrixXcd oa = restricted_observable(a, support);
    const Eigen::MatrixXcd ob = restricted_observable(b, support);
    return (oa * ob - ob * oa).cwiseAbs().maxCoeff();
}

bool qrfs_commute(const QRF &a, const QRF &b) { return commutator_norm(a, b) < 1e-9; }

ContextFamily context_statistics(const StateVector &state, const ContextPair &pair, std::optional<std::size_t> shots,
                                 Rng *rng) {
    const std::size_t n = state.num_subsystems();
    for (std::size_t d : state.dims()) require(d == 2, ErrorKind::invalid_argument, "screen state must be qubits");
    for (std::size_t b : pair.background) {
        require(b < n, ErrorKind::invalid_argument, "background qubit out of range");
        for (const QRF *q : {&pair.u, &pair.v})
            require(std::find(q->sector.begin(), q->sector.end(), b) == q->sector.end(), ErrorKind::invalid_argument,
                    "background overlaps a frame sector");
    }
    require(!shots || rng != nullptr, ErrorKind::invalid_argument, "sampled statistics need an rng");

    ContextFamily f;
    f.variables = {pair.u.name, pair.v.name};
    for (std::size_t b : pair.background) f.variables.push_back("q" + std::to_string(b));
    f.alphabet_sizes.assign(f.variables.size(), 2);
    // Outcome index 0 <-> eigenvalue +1.
    f.outcome_labels.assign(f.variables.size(), {"+1", "-1"});

    const Dims dims(n, 2);
    std::vector<Eigen::MatrixXcd> bg_obs;
    for (std::size_t b : pair.background) bg_obs.push_back(embed(dims, pauli::z(), b));

    for (int which = 0; which < 2; ++which) {
        const QRF &frame = which == 0 ? pair.u : pair.v;
        std::vector<Eigen::MatrixXcd> obs{observable_of(frame, n).matrix()};
        obs.insert(obs.end(), bg_obs.begin(), bg_obs.end());
        const std::size_t k = obs.size();
        const auto d = static_cast<Eigen::Index>(state.dim());
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);

        std::vector<double> dist(std::size_t{1} << k, 0.0);
        for (std::size_t o = 0; o < dist.size(); ++o) {
            Eigen::VectorXcd v = state.amplitudes();
            for (std::size_t i = 0; i < k; ++i) {
                const double sign = ((o >> (k - 1 - i)) & 1) ? -1.0 : 1.0;
                v = 0.5 * (id + sign * obs[i]) * v;
            }
            dist[o] = v.squaredNorm();
        }
        double total = 0.0;
        for (double p : dist) total += p;
        for (double &p : dist) p /= total;

        if (shots) {
            std::vector<double> counts(dist.size(), 0.0);
            for (std::size_t s = 0; s < *shots; ++s) {
                const double u = rng->uniform();
                double acc = 0.0;
                std::size_t pick = dist.size() - 1;
                for (std::size_t o = 0; o < dist.size(); ++o) {
                    acc += dist[o];
                    if (u < acc) {
                        pick = o;
                        break;
                    }
                }
                counts[pick] += 1.0;
            }
            for (std::size_t o = 0; o < dist.size(); ++o) dist[o] = counts[o] / static_cast<double>(*shots);
        }

        std::vector<std::size_t> vars{static_cast<std::size_t>(which)};
        for (std::size_t i = 0; i < pair.background.size(); ++i) vars.push_back(2 + i);
        f.contexts.push_back({frame.name, std::move(vars), std::move(dist)});
    }
    // Both frames must appear in some context; the V variable otherwise has no data.
    return f;
}

bool codeployable(const ContextPair &pair, const ContextFamily &stats) {
    auto has_context_with = [&](const std::string &name) {
        auto it = std::find(stats.variables.begin(), stats.variables.end(), name);
        if (it == stats.variables.end()) return false;
        const auto v = static_cast<std::size_t>(it - stats.variables.begin());
        for (const auto &c : stats.contexts)
            if (std::find(c.vars.begin(), c.vars.end(), v) != c.vars.end()) return true;
        return false;
    };
    require(has_context_with(pair.u.name) && has_context_with(pair.v.name), ErrorKind::invalid_argument,
            "statistics lack a context for one of the frames");
    if (!qrfs_commute(pair.u, pair.v)) return false;
    return joint_feasible(stats).feasible;
}

Eigen::Matrix2cd rotation_between(const BasisAxis &from, const BasisAxis &to) {
    const auto &a = from.direction();
    const auto &b = to.direction();
    std::array<double, 3> k{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const double angle = from.angle_to(to);
    if (kn < 1e-12) {
        if (angle < 1.0) return Eigen::Matrix2cd::Identity();
        // Antiparallel: any axis perpendicular to `from`.
        k = std::abs(a[0]) < 0.9 ? std::array<double, 3>{0.0, -a[2], a[1]} : std::array<double, 3>{-a[1], a[0], 0.0};
        kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
    const BasisAxis axis({k[0] / kn, k[1] / kn, k[2] / kn});
    return std::cos(angle / 2.0) * pauli::identity() - cplx(0.0, std::sin(angle / 2.0)) * axis.observable();
}

InteractionSpec context_switch(const InteractionSpec &spec, const QRF &target,
                               const std::map<std::size_t, BasisAxis> &rotation,
                               const std::vector<std::size_t> &background, char actor) {
    require(actor == 'A' || actor == 'B', ErrorKind::invalid_argument, "actor must be A or B");
    for (std::size_t q : target.sector)
        require(std::find(background.begin(), background.end(), q) == background.end(), ErrorKind::invalid_argument,
                "target sector intersects the background");
    std::vector<BasisAxis> axes = spec.axes(actor);
    for (const auto &[q, axis] : rotation) {
        require(q < spec.n(), ErrorKind::invalid_argument, "rotation qubit outside the screen");
        require(std::find(background.begin(), background.end(), q) == background.end(), ErrorKind::invalid_argument,
                "rotation touches background qubit " + std::to_string(q));
        require(std::find(target.sector.begin(), target.sector.end(), q) != target.sector.end(),
                ErrorKind::invalid_argument, "rotation touches qubit outside the target sector");
        axes[q] = axis;
    }
    // Weights carry over unchanged (alpha relabelled lambda); build_interaction re-validates.
    return build_interaction(spec.alphas, spec.beta, spec.temperature, actor == 'A' ? axes : spec.axes_a,
                             actor == 'B' ? axes : spec.axes_b);
}

bool implements_check(const QRF &q, const ScreenDynamics &dynamics, std::size_t n_qubits, std::size_t trials,
                      Rng &rng) {
    require(q.program.output_width() == q.sector.size(), ErrorKind::invalid_argument,
            "program must map sector records to records of the same width");
    for (std::size_t t = 0; t < trials; ++t) {
        QubitScreen screen(n_qubits);
        screen.set_recording(false);
        std::vector<int> bits(q.sector.size());
        for (std::size_t k = 0; k < q.sector.size(); ++k) {
            bits[k] = static_cast<int>(rng.below(2));
            screen.prepare_bit(q.sector[k], bits[k], q.axes[k]);
        }
        const std::vector<int> expected = q.program.run(bits);
        QubitScreen stepped(dynamics(screen.joint_state()));
        stepped.set_recording(false);
        std::vector<int> observed(q.sector.size());
        for (std::size_t k = 0; k < q.sector.size(); ++k) observed[k] = stepped.read_bit(q.sector[k], q.axes[k], rng).first;
        if (observed != expected) return false;
    }
    return true;
}

// --------------------------------------------------------------------- config

namespace {

std::vector<std::string> words(const std::string &s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::size_t parse_index(const std::string &s, const std::string &what) {
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    fail(ErrorKind::parse_error, what + ": expected a non-negative integer, got '" + s + "'");
}

double parse_double(const std::string &s, const std::string &what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    fail(ErrorKind::parse_error, what + ": expected a number, got '" + s + "'");
}

}  // namespace

QRF qrf_from_config(const std::string &name, const std::map<std::string, std::string> &kv) {
    const std::string where = "qrf " + name;
    auto get = [&](const std::string &k) -> std::optional<std::string> {
        auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    const auto sector_s = get("sector");
    require(sector_s.has_value(), ErrorKind::parse_error, where + ": missing 'sector'");
    std::vector<std::size_t> sector;
    for (const auto &w : words(*sector_s)) sector.push_back(parse_index(w, where + " sector"));

    std::vector<BasisAxis> axes;
    if (auto axes_s = get("axes")) {
        std::string chunk;
        std::istringstream is(*axes_s);
        while (std::getline(is, chunk, '|')) {
            const auto w = words(chunk);
            require(w.size() == 3, ErrorKind::parse_error, where + ": each axis needs three components");
            axes.push_back(BasisAxis::normalized({parse_double(w[0], where), parse_double(w[1], where),
                                                  parse_double(w[2], where)}));
        }
    } else {
        axes.assign(sector.size(), BasisAxis::z());
    }

    const std::string program = get("program").value_or(get("nodes") ? "custom" : "identity");
    if (program == "identity") return QRF(name, sector, axes);
    if (program == "not") return QRF(name, sector, axes, RecordProgram::negation(sector.size()));
    require(program == "custom", ErrorKind::parse_error, where + ": unknown program '" + program + "'");

    DiagramCCD d;
    std::vector<GateOp> ops;
    for (std::size_t i = 0; i < sector.size(); ++i) {
        d.add_node("in" + std::to_string(i));
        ops.push_back(GateOp::input);
    }
    for (const auto &w : words(get("nodes").value_or(""))) {
        const auto eq = w.find('=');
        require(eq != std::string::npos, ErrorKind::parse_error, where + ": node spec must be name=gate");
        d.add_node(w.substr(0, eq));
        ops.push_back(gate_from_string(w.substr(eq + 1)));
    }
    for (const auto &w : words(get("edges").value_or(""))) {
        const auto arrow = w.find("->");
        require(arrow != std::string::npos, ErrorKind::parse_error, where + ": edge spec must be from->to[:weight]");
        const auto colon = w.find(':', arrow);
        const std::string from = w.substr(0, arrow);
        const std::string to = w.substr(arrow + 2, colon == std::string::npos ? std::string::npos : colon - arrow - 2);
        const double weight = colon == std::string::npos ? 1.0 : parse_double(w.substr(colon + 1), where + " edge");
        d.add_edge(from, to, weight);
    }
    std::vector<std::size_t> outs;
    for (const auto &w : words(get("outputs").value_or(""))) outs.push_back(d.index_of(w));
    return QRF(name, sector, axes, RecordProgram(sector.size(), std::move(d), std::move(ops), std::move(outs)));
}

}  // namespace qfep
