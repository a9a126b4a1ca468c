#include "qfep/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "qfep/error.hpp"
#include "qfep/inequalities.hpp"

namespace qfep {

LogLevel log_level() {
    const char *v = std::getenv("QFEP_LOG");
    if (v == nullptr) return LogLevel::info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return LogLevel::quiet;
    if (s == "debug" || s == "2") return LogLevel::debug;
    return LogLevel::info;
}

void log_line(LogLevel level, const std::string &msg) {
    if (level == LogLevel::quiet || static_cast<int>(level) > static_cast<int>(log_level())) return;
    std::cerr << "[qfep] " << msg << '\n';
}

std::string sha256_hex(const std::string &bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::invalid_argument,
            "sha256 failed");
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

ContextFamily ingest_contexts(const std::filesystem::path &path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::invalid_argument, "cannot open " + path.string());
    ContextFamily f = read_context_csv(in);
    f.validate();
    return f;
}

// --------------------------------------------------------------------- config

std::map<std::string, std::string> parse_config_text(const std::string &text, const std::string &scenario) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error &e) {
        fail(ErrorKind::parse_error, "config line " + std::to_string(e.line()) + ": " + e.message());
    }
    std::map<std::string, std::string> out;
    for (const auto &[key, node] : tree) {
        if (node.empty()) {
            out[key] = node.data();
            continue;
        }
        if (key != scenario && key != "run") continue;
        for (const auto &[k, v] : node) out[k] = v.data();
    }
    return out;
}

RunConfig load_run_config(const std::string &scenario, const std::optional<std::filesystem::path> &config_file,
                          std::uint64_t seed, const std::filesystem::path &out_dir) {
    RunConfig c;
    c.scenario = scenario;
    c.seed = seed;
    c.out_dir = out_dir;
    if (config_file) {
        std::ifstream in(*config_file);
        require(static_cast<bool>(in), ErrorKind::parse_error, "cannot open config " + config_file->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        c.config_text = ss.str();
        c.config_dir = config_file->parent_path();
        c.params = parse_config_text(c.config_text, scenario);
    }
    return c;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump(const nlohmann::json &j) { return j.dump(2) + "\n"; }

// Typed access to scenario parameters. Every violated constraint is collected
// and reported together by finish().
class Params {
public:
    explicit Params(const std::map<std::string, std::string> &kv) : kv_(kv) {
        for (const char *k : {"scenario", "seed"}) used_.insert(k);
    }

    double real(const std::string &key, double def, double lo = -std::numeric_limits<double>::infinity(),
                double hi = std::numeric_limits<double>::infinity()) {
        double v = def;
        if (auto s = raw(key)) {
            char *end = nullptr;
            v = std::strtod(s->c_str(), &end);
            if (s->empty() || *end != '\0' || std::isnan(v)) {
                violations_.push_back(key + ": expected a number, got '" + *s + "'");
                return def;
            }
        }
        if (v < lo || v > hi) violations_.push_back(key + ": " + num(v) + " outside [" + num(lo) + ", " + num(hi) + "]");
        resolved_[key] = num(v);
        return v;
    }

    std::size_t count(const std::string &key, std::size_t def, std::size_t lo = 0,
                      std::size_t hi = std::numeric_limits<std::size_t>::max()) {
        std::size_t v = def;
        if (auto s = raw(key)) {
            char *end = nullptr;
            const unsigned long long x = std::strtoull(s->c_str(), &end, 10);
            if (s->empty() || *end != '\0' || (*s)[0] == '-') {
                violations_.push_back(key + ": expected a non-negative integer, got '" + *s + "'");
                return def;
            }
            v = static_cast<std::size_t>(x);
        }
        if (v < lo || v > hi)
            violations_.push_back(key + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
        resolved_[key] = std::to_string(v);
        return v;
    }

    bool flag(const std::string &key, bool def) {
        bool v = def;
        if (auto s = raw(key)) {
            if (*s == "true" || *s == "1" || *s == "yes")
                v = true;
            else if (*s == "false" || *s == "0" || *s == "no")
                v = false;
            else
                violations_.push_back(key + ": expected true or false, got '" + *s + "'");
        }
        resolved_[key] = v ? "true" : "false";
        return v;
    }

    std::string choice(const std::string &key, const std::string &def, const std::vector<std::string> &allowed) {
        std::string v = raw(key).value_or(def);
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto &a : allowed) list += (list.empty() ? "" : ", ") + a;
            violations_.push_back(key + ": '" + v + "' is not one of " + list);
            v = def;
        }
        resolved_[key] = v;
        return v;
    }

    std::string text(const std::string &key, const std::string &def) {
        std::string v = raw(key).value_or(def);
        resolved_[key] = v;
        return v;
    }

    std::vector<double> reals(const std::string &key, const std::string &def, std::size_t n) {
        const std::string s = text(key, def);
        std::istringstream is(s);
        std::vector<double> out;
        std::string w;
        while (is >> w) {
            char *end = nullptr;
            const double v = std::strtod(w.c_str(), &end);
            if (*end != '\0') {
                violations_.push_back(key + ": '" + w + "' is not a number");
                return {};
            }
            out.push_back(v);
        }
        if (out.size() != n) {
            violations_.push_back(key + ": expected " + std::to_string(n) + " numbers");
            return {};
        }
        return out;
    }

    void check(bool ok, const std::string &msg) {
        if (!ok) violations_.push_back(msg);
    }

    void finish() {
        for (const auto &[k, _] : kv_)
            if (!used_.count(k)) violations_.push_back(k + ": unknown parameter");
        if (violations_.empty()) return;
        std::string msg = "invalid parameters:";
        for (const auto &v : violations_) msg += "\n  - " + v;
        fail(ErrorKind::validation_error, msg);
    }

    const std::map<std::string, std::string> &resolved() const { return resolved_; }

private:
    std::optional<std::string> raw(const std::string &key) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        return it->second;
    }

    const std::map<std::string, std::string> &kv_;
    std::set<std::string> used_;
    std::vector<std::string> violations_;
    std::map<std::string, std::string> resolved_;
};

using Files = std::map<std::string, std::string>;
// Validates parameters, then returns the work to run.
using Scenario_ = std::function<std::function<Files()>(Params &, const RunConfig &)>;

std::optional<std::size_t> shots_for(Params &p, const RunConfig &c) {
    std::size_t shots = p.count("shots", 0);
    if (c.shots) shots = *c.shots;
    if (shots == 0) return std::nullopt;
    return shots;
}

std::function<Files()> chsh_scenario(Params &p, const RunConfig &c) {
    const auto angles = p.reals("angles_deg", "45 135 90 0", 4);
    const std::string state = p.choice("state", "singlet", {"singlet", "product"});
    const auto shots = shots_for(p, c);
    p.finish();
    return [=] {
        CHSHConfig cfg;
        const double deg = std::numbers::pi / 180.0;
        cfg.a = BasisAxis::from_angle(angles[0] * deg);
        cfg.a_prime = BasisAxis::from_angle(angles[1] * deg);
        cfg.b = BasisAxis::from_angle(angles[2] * deg);
        cfg.b_prime = BasisAxis::from_angle(angles[3] * deg);
        if (state == "product") cfg.state = StateVector::qubits(2);
        const CHSHResult exact = chsh(cfg);
        CHSHResult sampled = exact;
        if (shots) {
            cfg.shots = shots;
            Rng rng = Rng(c.seed).fork("chsh");
            sampled = chsh(cfg, &rng);
        }
        cfg.shots.reset();
        const ContextFamily stats = chsh_statistics(cfg);
        const FeasibilityResult fr = joint_feasible(stats);

        nlohmann::json r;
        r["scenario"] = "chsh";
        r["mode"] = shots ? "sampled" : "exact";
        r["S"] = sampled.s;
        r["standard_error"] = sampled.standard_error;
        r["exact_S"] = exact.s;
        r["lhv_max"] = chsh_lhv_max();
        r["tsirelson_bound"] = 2.0 * std::sqrt(2.0);
        r["violates_classical_bound"] = sampled.s > 2.0;
        r["joint_feasible"] = fr.feasible;
        std::ostringstream csv;
        csv << "pair,a_deg,b_deg,exact,sampled\n";
        const char *names[4] = {"ab", "ab'", "a'b", "a'b'"};
        const double as[4] = {angles[0], angles[0], angles[1], angles[1]};
        const double bs[4] = {angles[2], angles[3], angles[2], angles[3]};
        for (int k = 0; k < 4; ++k)
            csv << names[k] << ',' << num(as[k]) << ',' << num(bs[k]) << ',' << num(exact.correlators[k]) << ','
                << num(sampled.correlators[k]) << '\n';
        std::ostringstream ctx;
        write_context_csv(ctx, stats);
        return Files{{"report.json", dump(r)}, {"correlators.csv", csv.str()}, {"contexts.csv", ctx.str()}};
    };
}

std::function<Files()> lg_scenario(Params &p, const RunConfig &c) {
    const double omega = p.real("omega", 1.0);
    const double tau = p.real("tau", std::numbers::pi / 3, 0.0);
    p.check(tau > 0.0, "tau: must be positive");
    const auto shots = shots_for(p, c);
    p.finish();
    return [=] {
        LGConfig cfg;
        cfg.hamiltonian = HermitianOperator(Eigen::MatrixXcd(pauli::x() * (omega / 2.0)));
        cfg.times = {0.0, tau, 2.0 * tau};
        const LGResult exact = leggett_garg_k3(cfg);
        LGResult r = exact;
        if (shots) {
            cfg.shots = shots;
            Rng rng = Rng(c.seed).fork("leggett-garg");
            r = leggett_garg_k3(cfg, &rng);
        }
        nlohmann::json j;
        j["scenario"] = "leggett-garg";
        j["mode"] = shots ? "sampled" : "exact";
        j["K3"] = r.k3;
        j["standard_error"] = r.standard_error;
        j["exact_K3"] = exact.k3;
        j["C12"] = r.c12;
        j["C23"] = r.c23;
        j["C13"] = r.c13;
        j["classical_max"] = lg_classical_max();
        j["violates_classical_bound"] = r.k3 > 1.0;
        std::ostringstream csv;
        csv << "pair,t_i,t_j,correlator\n";
        csv << "12,0," << num(tau) << ',' << num(r.c12) << '\n';
        csv << "23," << num(tau) << ',' << num(2 * tau) << ',' << num(r.c23) << '\n';
        csv << "13,0," << num(2 * tau) << ',' << num(r.c13) << '\n';
        return Files{{"report.json", dump(j)}, {"correlators.csv", csv.str()}};
    };
}

std::function<Files()> contextuality_scenario(Params &p, const RunConfig &c) {
    const std::string input = p.text("input", "");
    const std::string builtin = p.choice("builtin", "pr_box", {"pr_box", "chsh", "product"});
    p.finish();
    return [=] {
        ContextFamily f;
        std::string source = "builtin:" + builtin;
        if (!input.empty()) {
            std::filesystem::path path(input);
            if (path.is_relative()) path = c.config_dir / path;
            f = ingest_contexts(path);
            source = "file:" + input;
        } else if (builtin == "pr_box") {
            f = pr_box_family();
        } else {
            CHSHConfig cfg;
            if (builtin == "product") cfg.state = StateVector::qubits(2);
            f = chsh_statistics(cfg);
        }
        const FeasibilityResult fr = joint_feasible(f);
        nlohmann::json j = feasibility_report(f, fr);
        j["scenario"] = "contextuality";
        j["source"] = source;
        j["contexts"] = f.contexts.size();
        std::ostringstream ctx;
        write_context_csv(ctx, f);
        return Files{{"report.json", dump(j)}, {"contexts.csv", ctx.str()}};
    };
}

std::function<Files()> memory_cycle_scenario(Params &p, const RunConfig &c) {
    const std::size_t ne = p.count("e_qubits", 2, 1, 6);
    const std::size_t nf = p.count("f_qubits", 1, 0, 4);
    const std::size_t ny = p.count("y_qubits", 5, 1, 16);
    const std::size_t ticks = p.count("ticks", 64, 1, 1000000);
    const double flip = p.real("flip_probability", 0.3, 0.0, 1.0);
    const std::size_t width = p.count("record_width", 0, 0, 6);
    const double temperature = p.real("temperature", 310.0, 1e-9);
    const double beta = p.real("beta", kLn2);
    p.check(beta >= kLn2, "beta: below ln 2");
    const double allowance_bits = p.real("f_allowance_bits", std::numeric_limits<double>::infinity(), 0.0);
    p.check(width <= ne, "record_width: exceeds e_qubits");
    p.finish();
    return [=] {
        const std::size_t n = ne + nf + ny;
        std::map<std::string, std::vector<std::size_t>> assign;
        for (std::size_t i = 0; i < n; ++i) assign[i < ne ? "E" : i < ne + nf ? "F" : "Y"].push_back(i);
        const SectorMap sectors = decompose_sectors(n, assign);
        LearningConfig lc;
        lc.record_width = width;
        const double allowance = std::isinf(allowance_bits) ? allowance_bits : landauer_cost(allowance_bits, temperature, beta);
        Agent agent("A", sectors, std::vector<BasisAxis>(n, BasisAxis::z()),
                    {QRF("U", sectors.E, std::vector<BasisAxis>(ne, BasisAxis::z()))}, lc, temperature, beta, allowance);
        QubitScreen screen(n);
        Rng env = Rng(c.seed).fork("environment");
        Rng reads = Rng(c.seed).fork("reads");
        std::vector<int> bits(ne, 0);
        std::ostringstream mem;
        mem << "tick,record,comparison\n";
        std::size_t consolidations = 0, compared = 0, differing = 0;
        for (std::size_t t = 0; t < ticks; ++t) {
            for (std::size_t k = 0; k < ne; ++k) {
                if (env.uniform() < flip) bits[k] ^= 1;
                screen.prepare_bit(sectors.E[k], bits[k], BasisAxis::z(), "B");
            }
            if (agent.memory_full()) {
                agent.consolidate_memory(screen);
                ++consolidations;
            }
            const RcwResult r = agent.read_compare_write(screen, reads);
            std::string cmp;
            for (bool eq : r.comparison) {
                cmp.push_back(eq ? '1' : '0');
                ++compared;
                differing += eq ? 0 : 1;
            }
            mem << r.tick << ',' << bits_to_string(r.record) << ',' << cmp << '\n';
            screen.advance_tick();
        }
        const auto &log = agent.clock().log();
        ClockTransition whole = log.front();
        bool monotone = true;
        for (std::size_t i = 1; i < log.size(); ++i) {
            monotone = monotone && log[i].to > log[i - 1].to;
            whole = GroupoidClock::compose(whole, log[i]);
        }
        nlohmann::json j;
        j["scenario"] = "memory-cycle";
        j["ticks"] = ticks;
        j["record_width"] = agent.record_width();
        j["y_bits"] = ny;
        j["memory_slots"] = agent.memory_slots();
        j["capacity_bits"] = agent.memory_slots() > 0 ? memory_capacity(agent.record_width(), agent.memory_slots()) : 0;
        j["consolidations"] = consolidations;
        j["flip_probability"] = flip;
        j["disagreement_frequency"] = compared ? static_cast<double>(differing) / static_cast<double>(compared) : 0.0;
        j["f_spent_joules"] = agent.f_spent();
        j["landauer_cost_per_record_joules"] = landauer_cost(static_cast<double>(agent.record_width()), temperature, beta);
        j["ticks_monotone"] = monotone;
        j["composed_transition"] = {{"from", whole.from}, {"to", whole.to}, {"contexts", whole.contexts}};
        j["prepare_precedes_measure"] = screen.prepare_precedes_measure();
        j["kernel_E"] = kernel_to_json(agent.model("E").kernel());
        std::ostringstream tr;
        screen.write_transcript_csv(tr);
        return Files{{"report.json", dump(j)}, {"memory.csv", mem.str()}, {"transcript.csv", tr.str()}};
    };
}

std::function<Files()> fep_align_scenario(Params &p, const RunConfig &c) {
    const std::size_t ticks = p.count("ticks", 10000, 2, 10000000);
    FepOptions opt;
    opt.budget = p.count("budget", 200);
    opt.grid = p.count("grid", 13, 3, 1000);
    opt.joint_grid = p.count("joint_grid", 8, 2, 64);
    opt.tolerance = p.real("tolerance", 2e-3, 1e-9, 1.0);
    const double theta0 = p.real("initial_angle", std::numbers::pi / 2);
    const std::size_t floor_episodes = p.count("floor_episodes", 20, 2, 10000);
    const std::size_t tail = p.count("tail_window", 10, 1);
    const std::string env = p.choice("environment", "scripted", {"scripted", "random_basis", "alternating_context"});
    const bool switching = p.flag("context_switching", false);
    const double smoothing = p.real("smoothing", 1.0, 0.0);
    p.finish();
    return [=] {
        Scenario s = alignment_scenario(ticks);
        s.env.mode = environment_mode_from_string(env);
        s.context_switching = switching;
        std::vector<QRF> frames{QRF("U", s.sectors.E, std::vector<BasisAxis>(3, BasisAxis::from_angle(theta0)))};
        if (s.env.mode == EnvironmentMode::alternating_context) {
            s.env.alt_axes.assign(3, BasisAxis::x());
            frames.emplace_back("V", s.sectors.E,
                                std::vector<BasisAxis>(3, BasisAxis::from_angle(theta0 + std::numbers::pi / 2)));
        }
        LearningConfig lc;
        lc.smoothing = smoothing;
        Agent agent("A", s.sectors, std::vector<BasisAxis>(s.sectors.n_qubits, BasisAxis::z()), frames, lc);
        const Rng rng = Rng(c.seed).fork("fep-align");
        const double start = misalignment(agent, s);
        log_line(LogLevel::debug, "fep-align: starting search, misalignment " + num(start));
        const Trajectory traj = fep_minimize(agent, s, opt, rng);

        Agent aligned = agent;
        for (std::size_t f = 0; f < aligned.qrfs().size(); ++f)
            aligned.qrf(f).axes = (f == 1 && s.env.mode == EnvironmentMode::alternating_context) ? s.env.alt_axes : s.env.axes;
        const NoiseFloor nf = noise_floor(aligned, s, floor_episodes, rng.fork("floor"));

        nlohmann::json j;
        j["scenario"] = "fep-align";
        j["environment"] = env;
        j["context_switching"] = switching;
        j["initial_misalignment"] = start;
        j["final_misalignment"] = misalignment(agent, s);
        j["evaluations"] = traj.steps.size();
        std::ostringstream csv;
        traj.write_csv(csv);
        std::ostringstream floor_csv;
        floor_csv << "episode,score\n";
        for (std::size_t k = 0; k < nf.samples.size(); ++k) floor_csv << k << ',' << num(nf.samples[k]) << '\n';
        j["noise_floor"] = {{"mean", nf.mean}, {"stddev", nf.stddev}, {"episodes", floor_episodes}};
        Files files{{"trajectory.csv", csv.str()}, {"floor.csv", floor_csv.str()}};
        if (!traj.steps.empty()) {
            const double final_score = traj.steps.back().score;
            j["initial_score"] = traj.steps.front().score;
            j["final_score"] = final_score;
            j["final_er"] = traj.steps.back().er;
            j["within_two_sigma_of_floor"] = std::abs(final_score - nf.mean) <= 2.0 * nf.stddev + 1e-12;
            j["identification_failure"] = traj.best.identification_failure;
            if (traj.steps.size() >= tail) {
                const NoiseDecomposition d = noise_decomposition(traj, tail, s.sectors.E, s.sectors.E);
                j["noise_decomposition"] = {{"noise_floor", d.noise_floor},
                                            {"learning_gap", d.learning_gap},
                                            {"sector_relation", std::string(to_string(d.relation))}};
            }
            for (const auto &[sector, k] : traj.best.learned) files["kernel_" + sector + ".json"] = dump(kernel_to_json(k));
        }
        files["report.json"] = dump(j);
        return files;
    };
}

std::function<Files()> asymptotic_scenario(Params &p, const RunConfig &c) {
    AsymptoticConfig cfg;
    cfg.n_a = p.count("n_a", 1, 1, 3);
    cfg.n_b = p.count("n_b", 1, 1, 3);
    p.check(cfg.n_a + cfg.n_b <= 4, "n_a + n_b: joint system is limited to four qubits");
    cfg.local_scale = p.real("local_scale", 0.2, 0.0);
    cfg.coupling_scale = p.real("coupling_scale", 1.0, 0.0);
    cfg.t_max = p.real("t_max", 20.0, 1e-9);
    cfg.samples = p.count("samples", 400, 1, 1000000);
    cfg.alignment = alignment_scenario(p.count("ticks", 10000, 2, 10000000));
    cfg.fep.budget = p.count("budget", 60);
    cfg.initial_angle = p.real("initial_angle", std::numbers::pi / 2);
    p.finish();
    return [=] {
        const AsymptoticReport r = asymptotic_experiment(cfg, Rng(c.seed).fork("asymptotic"));
        nlohmann::json j = r.to_json();
        j["scenario"] = "asymptotic";
        std::ostringstream align, ent;
        r.alignment.write_csv(align);
        ent << "t,entropy_bits\n";
        for (std::size_t k = 0; k < r.times.size(); ++k) ent << num(r.times[k]) << ',' << num(r.entropy[k]) << '\n';
        return Files{{"report.json", dump(j)}, {"alignment.csv", align.str()}, {"entropy.csv", ent.str()}};
    };
}

const std::map<std::string, Scenario_> &registry() {
    static const std::map<std::string, Scenario_> r{
        {"asymptotic", asymptotic_scenario},       {"chsh", chsh_scenario},
        {"contextuality", contextuality_scenario}, {"fep-align", fep_align_scenario},
        {"leggett-garg", lg_scenario},             {"memory-cycle", memory_cycle_scenario},
    };
    return r;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto &[k, _] : registry()) out.push_back(k);
    return out;
}

bool has_scenario(const std::string &name) { return registry().count(name) != 0; }

RunOutput run_in_memory(const RunConfig &config) {
    if (!has_scenario(config.scenario)) {
        std::string list;
        for (const auto &n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
        fail(ErrorKind::validation_error, "unknown scenario '" + config.scenario + "'; registered: " + list);
    }
    Params params(config.params);
    auto work = registry().at(config.scenario)(params, config);
    log_line(LogLevel::info, "running " + config.scenario + " with seed " + std::to_string(config.seed));
    RunOutput out;
    out.files = work();

    nlohmann::json m;
    m["scenario"] = config.scenario;
    m["seed"] = config.seed;
    m["parameters"] = params.resolved();
    m["config_text"] = config.config_text;
    if (config.shots) m["shots_override"] = *config.shots;
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto &[name, body] : out.files) hashes[name] = sha256_hex(body);
    m["files"] = hashes;
    out.files["manifest.json"] = dump(m);
    return out;
}

RunOutput run(const RunConfig &config) {
    require(!config.out_dir.empty(), ErrorKind::validation_error, "output directory is required");
    RunOutput out = run_in_memory(config);
    std::filesystem::create_directories(config.out_dir);
    for (const auto &[name, body] : out.files) {
        std::ofstream f(config.out_dir / name, std::ios::binary);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write " + (config.out_dir / name).string());
        f << body;
        log_line(LogLevel::debug, "wrote " + (config.out_dir / name).string());
    }
    return out;
}

}  // namespace qfep
