#include "qfep/fep.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "qfep/error.hpp"

namespace qfep {

std::string_view to_string(EnvironmentMode m) {
    switch (m) {
    case EnvironmentMode::scripted: return "scripted";
    case EnvironmentMode::random_basis: return "random_basis";
    case EnvironmentMode::alternating_context: return "alternating_context";
    }
    return "?";
}

EnvironmentMode environment_mode_from_string(std::string_view s) {
    if (s == "scripted") return EnvironmentMode::scripted;
    if (s == "random_basis") return EnvironmentMode::random_basis;
    if (s == "alternating_context") return EnvironmentMode::alternating_context;
    fail(ErrorKind::invalid_argument, "unknown environment mode '" + std::string(s) + "'");
}

MarkovKernel counting_cycle(std::size_t width) {
    require(width >= 1 && width <= 12, ErrorKind::invalid_argument, "counter width out of range");
    const std::size_t n = std::size_t{1} << width;
    std::vector<std::size_t> succ(n);
    for (std::size_t i = 0; i < n; ++i) succ[i] = (i + 1) % n;
    return MarkovKernel::permutation(bit_alphabet(width), succ);
}

MarkovKernel twisted_cycle(std::size_t width) {
    require(width >= 2 && width <= 12, ErrorKind::invalid_argument, "cycle width out of range");
    const std::size_t n = std::size_t{1} << width;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::swap(order[n - 2], order[n - 1]);
    std::vector<std::size_t> succ(n);
    for (std::size_t i = 0; i < n; ++i) succ[order[i]] = order[(i + 1) % n];
    return MarkovKernel::permutation(bit_alphabet(width), succ);
}

Scenario alignment_scenario(std::size_t ticks) {
    Scenario s;
    s.sectors = decompose_sectors(11, {{"E", {0, 1, 2}}, {"F", {3}}, {"Y", {4, 5, 6, 7, 8, 9, 10}}});
    s.env.kernel = twisted_cycle(3);
    s.env.axes.assign(3, BasisAxis::z());
    s.ticks = ticks;
    return s;
}

Agent alignment_agent(const Scenario &s, double theta, const std::string &name) {
    const auto &e = s.sectors.E;
    QRF u("U", e, std::vector<BasisAxis>(e.size(), BasisAxis::from_angle(theta)));
    return Agent(name, s.sectors, std::vector<BasisAxis>(s.sectors.n_qubits, BasisAxis::z()), {u});
}

namespace {

void check_scenario(const Scenario &s) {
    const std::size_t w = s.sectors.E.size();
    require(w >= 1, ErrorKind::invalid_argument, "scenario needs an E sector");
    require(s.env.kernel.size() == (std::size_t{1} << w), ErrorKind::invalid_argument,
            "environment kernel must act on records of the E sector");
    require(s.env.axes.size() == w, ErrorKind::invalid_argument, "environment needs one axis per E qubit");
    if (s.env.mode == EnvironmentMode::alternating_context)
        require(s.env.alt_axes.size() == w, ErrorKind::invalid_argument, "alternating environment needs alt_axes");
    require(s.ticks >= 2, ErrorKind::invalid_argument, "episode needs at least two ticks");
}

std::vector<double> stationary(const MarkovKernel &k) {
    const auto n = static_cast<Eigen::Index>(k.size());
    Eigen::MatrixXd a(n + 1, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(j, i) = k(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - (i == j ? 1.0 : 0.0);
    a.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b[n] = 1.0;
    const Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
    std::vector<double> out(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += out[static_cast<std::size_t>(i)] = std::max(pi[i], 0.0);
    for (double &p : out) p /= total;
    return out;
}

std::size_t project_index(std::size_t record, std::size_t width, const std::vector<std::size_t> &positions) {
    std::size_t v = 0;
    for (std::size_t p : positions) v = (v << 1) | ((record >> (width - 1 - p)) & 1);
    return v;
}

MarkovKernel marginal_kernel(const MarkovKernel &k, const std::vector<double> &pi, std::size_t width,
                             const std::vector<std::size_t> &positions) {
    const std::size_t m = std::size_t{1} << positions.size();
    std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
    std::vector<double> mass(m, 0.0);
    for (std::size_t e = 0; e < k.size(); ++e) {
        const std::size_t x = project_index(e, width, positions);
        mass[x] += pi[e];
        for (std::size_t e2 = 0; e2 < k.size(); ++e2) rows[x][project_index(e2, width, positions)] += pi[e] * k(e, e2);
    }
    for (std::size_t x = 0; x < m; ++x) {
        if (mass[x] <= 1e-15) {
            std::fill(rows[x].begin(), rows[x].end(), 1.0 / static_cast<double>(m));
            continue;
        }
        double total = 0.0;
        for (double &v : rows[x]) total += v /= mass[x];
        for (double &v : rows[x]) v /= total;
    }
    return MarkovKernel(bit_alphabet(positions.size()), std::move(rows));
}

std::vector<std::size_t> positions_in(const std::vector<std::size_t> &e, const std::vector<std::size_t> &sub) {
    std::vector<std::size_t> out;
    for (std::size_t q : sub) {
        auto it = std::find(e.begin(), e.end(), q);
        require(it != e.end(), ErrorKind::invalid_partition, "refined sector lies outside E");
        out.push_back(static_cast<std::size_t>(it - e.begin()));
    }
    return out;
}

BasisAxis random_axis(Rng &rng) {
    const double c = 1.0 - 2.0 * rng.uniform();
    const double phi = 2.0 * M_PI * rng.uniform();
    return BasisAxis::from_spherical(std::acos(std::clamp(c, -1.0, 1.0)), phi);
}

std::size_t frames_in_use(const Agent &agent, const Scenario &s) {
    return s.context_switching ? agent.qrfs().size() : 1;
}

}  // namespace

std::map<std::string, MarkovKernel> true_kernels(const Scenario &s) {
    check_scenario(s);
    std::map<std::string, MarkovKernel> out;
    out.emplace("E", s.env.kernel);
    if (s.sectors.refined) {
        const auto pi = stationary(s.env.kernel);
        const std::size_t w = s.sectors.E.size();
        if (!s.sectors.P.empty())
            out.emplace("P", marginal_kernel(s.env.kernel, pi, w, positions_in(s.sectors.E, s.sectors.P)));
        if (!s.sectors.R.empty())
            out.emplace("R", marginal_kernel(s.env.kernel, pi, w, positions_in(s.sectors.E, s.sectors.R)));
    }
    return out;
}

EpisodeResult run_episode(const Agent &agent, const Scenario &s, const Rng &rng) {
    check_scenario(s);
    require(agent.sectors().n_qubits == s.sectors.n_qubits, ErrorKind::invalid_argument,
            "agent and scenario disagree on screen size");
    Agent a = agent;
    a.reset();
    a.clock().set_logging(false);
    QubitScreen screen(s.sectors.n_qubits);
    screen.set_recording(false);
    Rng env = rng.fork("environment");
    Rng reads = rng.fork("reads");

    const auto &e = s.sectors.E;
    const std::size_t w = e.size();
    const std::size_t nframes = frames_in_use(a, s);
    std::size_t rec = static_cast<std::size_t>(env.below(s.env.kernel.size()));
    for (std::size_t t = 0; t < s.ticks; ++t) {
        rec = s.env.kernel.sample_next(rec, env);
        for (std::size_t k = 0; k < w; ++k) {
            const int bit = static_cast<int>((rec >> (w - 1 - k)) & 1);
            switch (s.env.mode) {
            case EnvironmentMode::scripted: screen.prepare_bit(e[k], bit, s.env.axes[k], "B"); break;
            case EnvironmentMode::alternating_context:
                screen.prepare_bit(e[k], bit, t % 2 == 0 ? s.env.axes[k] : s.env.alt_axes[k], "B");
                break;
            case EnvironmentMode::random_basis: screen.prepare_bit(e[k], bit, random_axis(env), "B"); break;
            }
        }
        a.set_active_context(t % nframes);
        if (a.memory_full()) a.consolidate_memory(screen);
        a.read_compare_write(screen, reads);
        screen.advance_tick();
    }

    EpisodeResult out;
    const auto truth = true_kernels(s);
    for (const auto &sector : a.modelled_sectors()) {
        const PredictionError pe = prediction_error(a, sector, truth.at(sector));
        out.er[sector] = pe.value;
        out.learned.emplace(sector, a.model(sector).kernel());
        out.score += pe.value;
        out.identification_failure = out.identification_failure || pe.identification_failure;
    }
    if (s.entanglement_probe && s.sectors.n_qubits <= 12) out.entanglement_bits = entanglement_entropy(screen.joint_state(), e);
    return out;
}

double frame_angle(const Agent &agent, std::size_t frame, std::size_t position) {
    const auto &d = agent.qrfs().at(frame).axes.at(position).direction();
    return std::atan2(d[0], d[2]);
}

void set_frame_angle(Agent &agent, std::size_t frame, std::size_t position, double theta) {
    QRF &f = agent.qrf(frame);
    require(position < f.sector.size(), ErrorKind::invalid_argument, "angle parameter outside the frame");
    f.axes[position] = BasisAxis::from_angle(theta);
}

void Trajectory::write_csv(std::ostream &os) const {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "step,score,Er_E,Er_P,Er_R";
    for (const auto &n : param_names) os << ',' << n;
    os << ",entanglement_bits\n";
    for (const auto &st : steps) {
        os << st.step << ',' << num(st.score);
        for (const char *sec : {"E", "P", "R"}) {
            os << ',';
            if (auto it = st.er.find(sec); it != st.er.end()) os << num(it->second);
        }
        for (double a : st.angles) os << ',' << num(a);
        os << ',' << num(st.entanglement_bits) << '\n';
    }
}

Trajectory fep_minimize(Agent &agent, const Scenario &s, const FepOptions &opt, const Rng &rng) {
    check_scenario(s);
    require(opt.tolerance > 0.0, ErrorKind::invalid_argument, "tolerance must be positive");
    const std::size_t nframes = frames_in_use(agent, s);
    std::vector<AngleParam> params = opt.params;
    if (params.empty())
        for (std::size_t f = 0; f < nframes; ++f) {
            params.push_back({f, std::nullopt});
            for (std::size_t p = 0; p < agent.qrfs()[f].sector.size(); ++p) params.push_back({f, p});
        }

    // Global rotations start at the first axis angle; offsets carry the rest.
    std::vector<double> global(agent.qrfs().size(), 0.0);
    std::vector<std::vector<double>> offset(agent.qrfs().size());
    for (std::size_t f = 0; f < agent.qrfs().size(); ++f) {
        global[f] = frame_angle(agent, f, 0);
        for (std::size_t p = 0; p < agent.qrfs()[f].sector.size(); ++p)
            offset[f].push_back(frame_angle(agent, f, p) - global[f]);
    }
    auto slot = [&](const AngleParam &p) -> double & {
        require(p.frame < agent.qrfs().size(), ErrorKind::invalid_argument, "angle parameter names no frame");
        if (!p.position) return global[p.frame];
        require(*p.position < offset[p.frame].size(), ErrorKind::invalid_argument, "angle parameter outside the frame");
        return offset[p.frame][*p.position];
    };

    Trajectory traj;
    for (const auto &p : params) {
        const QRF &f = agent.qrfs().at(p.frame);
        traj.param_names.push_back(p.position ? "delta_" + f.name + "_q" + std::to_string(f.sector.at(*p.position))
                                              : "phi_" + f.name);
    }
    if (opt.budget == 0) return traj;

    auto apply = [&](Agent &target, const std::vector<double> &x) {
        for (std::size_t i = 0; i < params.size(); ++i) slot(params[i]) = x[i];
        for (std::size_t f = 0; f < target.qrfs().size(); ++f)
            for (std::size_t p = 0; p < offset[f].size(); ++p) set_frame_angle(target, f, p, global[f] + offset[f][p]);
    };

    // Every evaluation replays the same episode stream.
    const Rng episode_rng = rng.fork("episode");
    Agent work = agent;
    std::vector<double> best_x(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) best_x[i] = slot(params[i]);
    EpisodeResult best;
    bool have_best = false;

    auto evaluate = [&](const std::vector<double> &x) {
        apply(work, x);
        const EpisodeResult r = run_episode(work, s, episode_rng);
        bool improved = false;
        if (!have_best || r.score < best.score) {
            best = r;
            best_x = x;
            have_best = true;
            improved = true;
        }
        TrajectoryStep st;
        st.step = traj.steps.size();
        st.evaluated = r.score;
        st.score = best.score;
        st.er = best.er;
        st.angles = best_x;
        st.entanglement_bits = r.entanglement_bits;
        if (!traj.steps.empty() && st.score > traj.steps.back().score)
            fail(ErrorKind::invalid_argument, "best-so-far score increased");
        traj.steps.push_back(std::move(st));
        return std::pair<double, bool>{r.score, improved};
    };
    auto budget_left = [&] { return traj.steps.size() < opt.budget; };

    evaluate(best_x);

    // Several frames: their global rotations are coupled (a misaligned frame
    // flattens the landscape of the others), so bracket them on a joint grid.
    std::vector<std::size_t> globals;
    for (std::size_t i = 0; i < params.size(); ++i)
        if (!params[i].position) globals.push_back(i);
    const bool joint = globals.size() >= 2;
    const std::size_t jg = std::max<std::size_t>(opt.joint_grid, 2);
    const double joint_step = 2.0 * M_PI / static_cast<double>(jg);
    if (joint) {
        const std::vector<double> centre = best_x;
        std::size_t cells = 1;
        for (std::size_t k = 0; k < globals.size(); ++k) cells *= jg;
        for (std::size_t cell = 1; cell < cells && budget_left(); ++cell) {
            std::vector<double> x = centre;
            std::size_t rest = cell;
            for (std::size_t i : globals) {
                x[i] = centre[i] + static_cast<double>(rest % jg) * joint_step;
                rest /= jg;
            }
            evaluate(x);
        }
    }
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    const double floor_h = 8.0 * opt.tolerance;
    double h = M_PI / 16.0;
    for (std::size_t sweep = 0; budget_left() && !params.empty(); ++sweep) {
        bool improved = false;
        for (std::size_t c = 0; c < params.size() && budget_left(); ++c) {
            std::vector<double> x = best_x;
            auto f_at = [&](double v) {
                x[c] = v;
                auto [score, imp] = evaluate(x);
                improved = improved || imp;
                return score;
            };
            double a = best_x[c] - h;
            double b = best_x[c] + h;
            if (sweep == 0 && joint) {
                if (params[c].position) continue;
                a = best_x[c] - joint_step;
                b = best_x[c] + joint_step;
            } else if (sweep == 0) {
                if (c > 0) break;
                const double centre = best_x[c];
                const double step = 2.0 * M_PI / static_cast<double>(std::max<std::size_t>(opt.grid, 3));
                double best_v = centre;
                double best_f = best.score;
                for (std::size_t k = 1; k < std::max<std::size_t>(opt.grid, 3) && budget_left(); ++k) {
                    const double v = centre + static_cast<double>(k) * step;
                    const double fv = f_at(v);
                    if (fv < best_f) {
                        best_f = fv;
                        best_v = v;
                    }
                }
                a = best_v - step;
                b = best_v + step;
            }
            if (!budget_left()) break;
            double x1 = b - g * (b - a);
            double x2 = a + g * (b - a);
            double f1 = f_at(x1);
            if (!budget_left()) break;
            double f2 = f_at(x2);
            while (b - a > opt.tolerance && budget_left()) {
                if (f1 <= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = f_at(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = f_at(x2);
                }
            }
        }
        if (sweep >= 1 && !improved && h <= floor_h) break;
        if (sweep >= 1) h = std::max(h / 4.0, floor_h);
    }

    apply(agent, best_x);
    traj.best = best;
    return traj;
}

double misalignment(const Agent &agent, const Scenario &s) {
    check_scenario(s);
    double worst = 0.0;
    const auto &e = s.sectors.E;
    for (std::size_t f = 0; f < frames_in_use(agent, s); ++f) {
        const QRF &frame = agent.qrfs()[f];
        const auto &ref = (f % 2 == 1 && s.env.mode == EnvironmentMode::alternating_context) ? s.env.alt_axes : s.env.axes;
        for (std::size_t p = 0; p < frame.sector.size(); ++p) {
            const auto k = static_cast<std::size_t>(std::find(e.begin(), e.end(), frame.sector[p]) - e.begin());
            worst = std::max(worst, frame.axes[p].angle_to(ref[k]));
        }
    }
    return worst;
}

NoiseFloor noise_floor(const Agent &agent, const Scenario &s, std::size_t episodes, const Rng &rng) {
    require(episodes >= 2, ErrorKind::insufficient_data, "noise floor needs at least two episodes");
    NoiseFloor out;
    for (std::size_t k = 0; k < episodes; ++k) out.samples.push_back(run_episode(agent, s, rng.fork(k)).score);
    double sum = 0.0;
    for (double v : out.samples) sum += v;
    out.mean = sum / static_cast<double>(episodes);
    double ss = 0.0;
    for (double v : out.samples) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(episodes - 1));
    return out;
}

std::string_view to_string(SectorOverlap o) {
    switch (o) {
    case SectorOverlap::contains: return "contains";
    case SectorOverlap::contained: return "contained";
    case SectorOverlap::overlap: return "overlap";
    case SectorOverlap::equal: return "equal";
    case SectorOverlap::disjoint: return "disjoint";
    }
    return "?";
}

SectorOverlap sector_overlap(const std::vector<std::size_t> &x_a, const std::vector<std::size_t> &x_b) {
    const std::set<std::size_t> a(x_a.begin(), x_a.end());
    const std::set<std::size_t> b(x_b.begin(), x_b.end());
    if (a == b) return SectorOverlap::equal;
    std::size_t shared = 0;
    for (std::size_t q : a) shared += b.count(q);
    if (shared == 0) return SectorOverlap::disjoint;
    if (shared == b.size()) return SectorOverlap::contains;
    if (shared == a.size()) return SectorOverlap::contained;
    return SectorOverlap::overlap;
}

NoiseDecomposition noise_decomposition(const Trajectory &t, std::size_t tail_window,
                                       const std::vector<std::size_t> &x_a, const std::vector<std::size_t> &x_b) {
    require(tail_window >= 1, ErrorKind::invalid_argument, "tail window must be positive");
    require(t.steps.size() >= tail_window, ErrorKind::insufficient_data,
            "trajectory has " + std::to_string(t.steps.size()) + " steps, tail window is " + std::to_string(tail_window));
    double sum = 0.0;
    for (std::size_t i = t.steps.size() - tail_window; i < t.steps.size(); ++i) sum += t.steps[i].score;
    NoiseDecomposition out;
    out.noise_floor = sum / static_cast<double>(tail_window);
    out.learning_gap = t.steps.front().score - out.noise_floor;
    out.relation = sector_overlap(x_a, x_b);
    return out;
}

}  // namespace qfep
