#include "qfep/inequalities.hpp"

#include <algorithm>
#include <cmath>

#include "qfep/error.hpp"

namespace qfep {

StateVector singlet() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return StateVector({2, 2}, v);
}

namespace {

void check_two_qubits(const StateVector &s) {
    require(s.dims() == Dims{2, 2}, ErrorKind::invalid_argument, "CHSH needs a two-qubit state");
}

double sampled_correlator(const StateVector &s, const BasisAxis &a, const BasisAxis &b, std::size_t shots, Rng &rng) {
    const HermitianOperator oa(Eigen::MatrixXcd(a.observable()));
    const HermitianOperator ob(Eigen::MatrixXcd(b.observable()));
    double sum = 0.0;
    for (std::size_t i = 0; i < shots; ++i) {
        const Measurement ma = born_measure(s, oa, 0, rng);
        const Measurement mb = born_measure(ma.post_state, ob, 1, rng);
        sum += ma.outcome * mb.outcome;
    }
    return sum / static_cast<double>(shots);
}

Eigen::MatrixXcd projector(const BasisAxis &axis, int sign) {
    return 0.5 * (Eigen::Matrix2cd::Identity() + static_cast<double>(sign) * axis.observable());
}

}  // namespace

double correlator(const StateVector &s, const BasisAxis &a, const BasisAxis &b) {
    check_two_qubits(s);
    return expectation(s, kron(a.observable(), b.observable()));
}

CHSHResult chsh(const CHSHConfig &c, Rng *rng) {
    check_two_qubits(c.state);
    const std::array<std::pair<const BasisAxis *, const BasisAxis *>, 4> pairs{
        {{&c.a, &c.b}, {&c.a, &c.b_prime}, {&c.a_prime, &c.b}, {&c.a_prime, &c.b_prime}}};
    CHSHResult r;
    double var = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (c.shots) {
            require(rng != nullptr, ErrorKind::invalid_argument, "sampled CHSH needs an rng");
            require(*c.shots > 0, ErrorKind::invalid_argument, "shots must be positive");
            Rng stream = rng->fork(k);
            r.correlators[k] = sampled_correlator(c.state, *pairs[k].first, *pairs[k].second, *c.shots, stream);
            var += (1.0 - r.correlators[k] * r.correlators[k]) / static_cast<double>(*c.shots);
        } else {
            r.correlators[k] = correlator(c.state, *pairs[k].first, *pairs[k].second);
        }
    }
    r.s = std::abs(r.correlators[0] + r.correlators[1] + r.correlators[2] - r.correlators[3]);
    r.standard_error = std::sqrt(var);
    return r;
}

double chsh_lhv_max() {
    double best = 0.0;
    for (int m = 0; m < 16; ++m) {
        const int a = m & 1 ? -1 : 1, a2 = m & 2 ? -1 : 1, b = m & 4 ? -1 : 1, b2 = m & 8 ? -1 : 1;
        best = std::max(best, static_cast<double>(std::abs(a * b + a * b2 + a2 * b - a2 * b2)));
    }
    return best;
}

ContextFamily chsh_statistics(const CHSHConfig &c) {
    check_two_qubits(c.state);
    ContextFamily f;
    f.variables = {"A0", "A1", "B0", "B1"};
    f.alphabet_sizes = {2, 2, 2, 2};
    f.outcome_labels.assign(4, {"+1", "-1"});
    const std::array<const BasisAxis *, 2> as{&c.a, &c.a_prime};
    const std::array<const BasisAxis *, 2> bs{&c.b, &c.b_prime};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<double> dist;
            for (int x : {+1, -1})
                for (int y : {+1, -1}) {
                    const Eigen::VectorXcd v = kron(projector(*as[i], x), projector(*bs[j], y)) * c.state.amplitudes();
                    dist.push_back(v.squaredNorm());
                }
            f.contexts.push_back({"A" + std::to_string(i) + "B" + std::to_string(j), {i, 2 + j}, dist});
        }
    return f;
}

LGResult leggett_garg_k3(const LGConfig &c, Rng *rng) {
    require(c.hamiltonian.dim() == 2, ErrorKind::invalid_argument, "Leggett-Garg needs a single-qubit Hamiltonian");
    require(c.initial.dims() == Dims{2}, ErrorKind::invalid_argument, "Leggett-Garg needs a single-qubit state");
    require(c.times[0] < c.times[1] && c.times[1] < c.times[2], ErrorKind::invalid_argument,
            "measurement times must be strictly increasing");
    const Propagator u(c.hamiltonian);
    const HermitianOperator obs(Eigen::MatrixXcd(c.axis.observable()));

    double var = 0.0;
    auto two_time = [&](double ti, double tj, std::uint64_t stream_id) {
        if (c.shots) {
            require(rng != nullptr, ErrorKind::invalid_argument, "sampled Leggett-Garg needs an rng");
            require(*c.shots > 0, ErrorKind::invalid_argument, "shots must be positive");
            Rng stream = rng->fork(stream_id);
            double sum = 0.0;
            for (std::size_t k = 0; k < *c.shots; ++k) {
                const Measurement m1 = born_measure(u.apply(c.initial, ti), obs, 0, stream);
                const Measurement m2 = born_measure(u.apply(m1.post_state, tj - ti), obs, 0, stream);
                sum += m1.outcome * m2.outcome;
            }
            const double e = sum / static_cast<double>(*c.shots);
            var += (1.0 - e * e) / static_cast<double>(*c.shots);
            return e;
        }
        const Eigen::MatrixXcd ui = u.unitary(ti);
        const Eigen::MatrixXcd uij = u.unitary(tj - ti);
        double e = 0.0;
        for (int a : {+1, -1})
            for (int b : {+1, -1}) {
                const Eigen::VectorXcd v = projector(c.axis, b) * uij * projector(c.axis, a) * ui * c.initial.amplitudes();
                e += a * b * v.squaredNorm();
            }
        return e;
    };
    LGResult r;
    r.c12 = two_time(c.times[0], c.times[1], 12);
    r.c23 = two_time(c.times[1], c.times[2], 23);
    r.c13 = two_time(c.times[0], c.times[2], 13);
    r.k3 = r.c12 + r.c23 - r.c13;
    r.standard_error = std::sqrt(var);
    return r;
}

double lg_classical_max() {
    double best = -3.0;
    for (int m = 0; m < 8; ++m) {
        const int q1 = m & 1 ? -1 : 1, q2 = m & 2 ? -1 : 1, q3 = m & 4 ? -1 : 1;
        best = std::max(best, static_cast<double>(q1 * q2 + q2 * q3 - q1 * q3));
    }
    return best;
}

// ------------------------------------------------------------ asymptotic

namespace {

BasisAxis perpendicular_in_xz(const BasisAxis &axis) {
    const auto &d = axis.direction();
    const double n = std::hypot(d[0], d[2]);
    if (n < 1e-12) return BasisAxis::x();
    return BasisAxis::normalized({d[2] / n, 0.0, -d[0] / n});
}

}  // namespace

nlohmann::json AsymptoticReport::to_json() const {
    nlohmann::json j;
    j["initial_misalignment"] = initial_misalignment;
    j["final_misalignment"] = final_misalignment;
    j["alignment_evaluations"] = alignment.steps.size();
    j["alignment_initial_score"] = alignment.steps.empty() ? 0.0 : alignment.steps.front().score;
    j["alignment_final_score"] = alignment.steps.empty() ? 0.0 : alignment.steps.back().score;
    j["alphas"] = alphas;
    j["cut_max_bits"] = cut_max;
    j["max_entropy_bits"] = max_entropy;
    j["max_fraction"] = max_fraction();
    j["times"] = times;
    j["entropy_bits"] = entropy;
    return j;
}

AsymptoticReport asymptotic_experiment(const AsymptoticConfig &c, const Rng &rng) {
    const Scenario &sc = c.alignment;
    const std::size_t e = sc.sectors.E.size();
    require(c.n_a >= 1 && c.n_b >= 1, ErrorKind::invalid_argument, "both sides need at least one qubit");
    require(c.n_a <= 3, ErrorKind::resource_limit, "A is limited to three qubits");
    require(c.n_a + c.n_b <= 4, ErrorKind::resource_limit, "joint system is limited to four qubits");
    require(c.n_a <= e && c.n_b <= e, ErrorKind::invalid_argument, "coupled qubits must lie in the E sector");
    require(c.t_max > 0.0 && c.samples >= 1, ErrorKind::invalid_argument, "need a positive horizon and samples");
    require(c.local_scale >= 0.0 && c.coupling_scale >= 0.0, ErrorKind::invalid_argument, "scales must be non-negative");

    AsymptoticReport r;
    Agent b = alignment_agent(sc, c.initial_angle, "B");
    FepOptions opt = c.fep;
    if (opt.params.empty()) opt.params = {{0, std::nullopt}};
    r.initial_misalignment = misalignment(b, sc);
    r.alignment = fep_minimize(b, sc, opt, rng.fork("alignment"));
    r.final_misalignment = misalignment(b, sc);

    Rng gen = rng.fork("evolution");
    const std::size_t n = c.n_a + c.n_b;
    const Dims dims(n, 2);
    const auto da = static_cast<Eigen::Index>(std::size_t{1} << c.n_a);
    const auto db = static_cast<Eigen::Index>(std::size_t{1} << c.n_b);
    const HermitianOperator ha = HermitianOperator::random(static_cast<std::size_t>(da), gen, c.local_scale);
    const HermitianOperator hb = HermitianOperator::random(static_cast<std::size_t>(db), gen, c.local_scale);
    Eigen::MatrixXcd h = kron(ha.matrix(), Eigen::MatrixXcd::Identity(db, db)) +
                         kron(Eigen::MatrixXcd::Identity(da, da), hb.matrix());

    std::vector<BasisAxis> axes_a(sc.env.axes.begin(), sc.env.axes.begin() + static_cast<std::ptrdiff_t>(c.n_a));
    std::vector<BasisAxis> axes_b;
    for (std::size_t i = 0; i < c.n_b; ++i) axes_b.push_back(b.qrfs()[0].axes[i]);
    for (std::size_t i = 0; i < std::min(c.n_a, c.n_b); ++i) {
        const double alpha = c.coupling_scale * (0.5 + gen.uniform());
        r.alphas.push_back(alpha);
        if (alpha == 0.0) continue;
        h += alpha * embed(dims, axes_a[i].observable(), i) * embed(dims, axes_b[i].observable(), c.n_a + i);
    }
    const Propagator u{HermitianOperator(h)};

    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (std::size_t i = 0; i < n; ++i) {
        const BasisAxis &axis = i < c.n_a ? axes_a[i] : axes_b[i - c.n_a];
        psi = kron(psi, perpendicular_in_xz(axis).eigenstate(0));
    }
    const StateVector psi0(dims, psi);
    Subsystems cut;
    for (std::size_t i = 0; i < c.n_a; ++i) cut.push_back(i);

    r.cut_max = static_cast<double>(std::min(c.n_a, c.n_b));
    for (std::size_t k = 0; k <= c.samples; ++k) {
        const double t = c.t_max * static_cast<double>(k) / static_cast<double>(c.samples);
        const double s = entanglement_entropy(u.apply(psi0, t), cut);
        r.times.push_back(t);
        r.entropy.push_back(s);
        r.max_entropy = std::max(r.max_entropy, s);
    }
    return r;
}

}  // namespace qfep
