#include <doctest.h>

#include <cmath>

#include "qfep/agent.hpp"
#include "qfep/error.hpp"

using namespace qfep;

namespace {

struct Rig {
    SectorMap sectors;
    Agent agent;
    QubitScreen screen;

    explicit Rig(std::size_t ne = 2, std::size_t ny = 5, LearningConfig lc = {},
                 double allowance = std::numeric_limits<double>::infinity())
        : sectors(make(ne, ny)),
          agent("A", sectors, std::vector<BasisAxis>(sectors.n_qubits, BasisAxis::z()),
                {QRF("U", sectors.E, std::vector<BasisAxis>(ne, BasisAxis::z()))}, lc, 310.0, kLn2, allowance),
          screen(sectors.n_qubits) {}

    static SectorMap make(std::size_t ne, std::size_t ny) {
        std::map<std::string, std::vector<std::size_t>> a;
        for (std::size_t i = 0; i < ne; ++i) a["E"].push_back(i);
        a["F"] = {ne};
        for (std::size_t i = 0; i < ny; ++i) a["Y"].push_back(ne + 1 + i);
        return decompose_sectors(ne + 1 + ny, a);
    }

    RcwResult step(const Bits &env) {
        for (std::size_t k = 0; k < env.size(); ++k) screen.prepare_bit(sectors.E[k], env[k], BasisAxis::z(), "B");
        if (agent.memory_full()) agent.consolidate_memory(screen);
        const RcwResult r = agent.read_compare_write(screen, rng);
        screen.advance_tick();
        return r;
    }

    Rng rng{11};
};

}  // namespace

TEST_CASE("memory capacity") {
    CHECK(memory_capacity(4, 1) == 4);
    CHECK(memory_capacity(3, 4) == 14);
    CHECK(memory_capacity(2, 3) == 8);
    CHECK_THROWS_AS(memory_capacity(2, 0), Error);
    for (std::size_t w = 1; w <= 6; ++w)
        for (std::size_t y = 0; y <= 40; ++y) {
            const std::size_t n = max_records(w, y);
            if (n > 0) CHECK(memory_capacity(w, n) <= y);
            CHECK(memory_capacity(w, n + 1) > y);
        }
}

TEST_CASE("coarse graining") {
    CHECK(coarse_grain({{1, 0, 1}}, 3) == Bits{1, 0, 1});
    CHECK(coarse_grain({{0, 0}, {0, 0}, {0, 1}}, 2) == Bits{0, 0});
    CHECK(coarse_grain({{0, 0}, {0, 0}, {0, 1}}, 1) == Bits{0});
    CHECK(coarse_grain({{1}, {0}}, 1) == Bits{0});
    CHECK_THROWS_AS(coarse_grain({}, 1), Error);
    CHECK(bits_to_index({1, 0, 1}) == 5);
    CHECK(string_to_bits(bits_to_string({0, 1, 1})) == Bits{0, 1, 1});
}

TEST_CASE("read compare write") {
    SUBCASE("static environment") {
        Rig rig;
        for (int t = 0; t < 20; ++t) {
            const RcwResult r = rig.step({1, 0});
            if (t == 0) {
                CHECK(r.comparison.empty());
            } else {
                for (bool eq : r.comparison) CHECK(eq);
            }
        }
    }
    SUBCASE("flipping environment") {
        Rig rig;
        for (int t = 0; t < 20; ++t) {
            const RcwResult r = rig.step({t % 2, t % 2});
            for (bool eq : r.comparison) CHECK_FALSE(eq);
        }
    }
    SUBCASE("stochastic environment") {
        Rig rig;
        Rng env(3);
        Bits bits{0, 0};
        std::size_t compared = 0, differ = 0;
        for (int t = 0; t < 10000; ++t) {
            for (int &b : bits)
                if (env.uniform() < 0.3) b ^= 1;
            for (bool eq : rig.step(bits).comparison) {
                ++compared;
                differ += !eq;
            }
        }
        const double f = double(differ) / compared;
        CHECK(std::abs(f - 0.3) < 3 * std::sqrt(0.3 * 0.7 / compared));
    }
}

TEST_CASE("memory full and free energy budget") {
    Rig rig;
    rig.step({0, 0});
    rig.step({0, 1});
    CHECK(rig.agent.memory_full());
    try {
        (void)rig.agent.read_compare_write(rig.screen, rig.rng);
        FAIL("expected memory-full");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::memory_full);
    }

    Rig poor(2, 5, {}, landauer_cost(3, 310.0));
    poor.step({0, 0});
    try {
        poor.step({1, 0});
        FAIL("expected starvation");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::thermodynamic_starvation);
    }
}

TEST_CASE("clock") {
    GroupoidClock c;
    const auto t0 = c.tick("U");
    const auto t1 = c.tick("U");
    const auto t2 = c.tick("V");
    CHECK(GroupoidClock::composable(t0, t1));
    CHECK_FALSE(GroupoidClock::composable(t0, t2));
    CHECK_THROWS_AS(GroupoidClock::compose(t0, t2), Error);
    const auto all = GroupoidClock::compose(GroupoidClock::compose(t0, t1), t2);
    CHECK(all.from == 0);
    CHECK(all.to == 3);
    CHECK(all.contexts == std::vector<std::string>{"U", "V"});
    const auto inv = GroupoidClock::inverse(all);
    CHECK(inv.from == 3);
    CHECK(inv.to == 0);
}

TEST_CASE("clock fuzz") {
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        GroupoidClock c;
        const std::size_t n = 2 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) c.tick(rng.uniform() < 0.5 ? "U" : "V");
        const auto &log = c.log();
        for (std::size_t i = 1; i < log.size(); ++i) CHECK(log[i].from == log[i - 1].to);
        const std::size_t i = rng.below(n), j = rng.below(n);
        CHECK(GroupoidClock::composable(log[i], log[j]) == (j == i + 1));
    }
}

TEST_CASE("prediction error and free energy") {
    Rig rig(1, 4);
    const auto det = MarkovKernel::permutation({"0", "1"}, {1, 0});
    CHECK(prediction_error(rig.agent, "E", det).value == doctest::Approx(0.5));
    for (int t = 0; t < 4000; ++t) {
        if (rig.agent.memory_full()) rig.agent.consolidate_memory(rig.screen);
        rig.step({t % 2});
    }
    CHECK(prediction_error(rig.agent, "E", det).value < 0.01);

    CHECK(vfe(1.5, 0.0) == 1.5);
    const double d = kl_divergence({0.5, 0.5}, {0.25, 0.75});
    CHECK(d == doctest::Approx(0.2075).epsilon(1e-3));
    CHECK(vfe(2.0, d) == doctest::Approx(2.2075).epsilon(1e-4));
    CHECK_THROWS_AS(vfe(1.0, -0.1), Error);
    Rng rng(6);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> p(4), q(4);
        double zp = 0, zq = 0;
        for (int i = 0; i < 4; ++i) {
            zp += (p[i] = rng.uniform());
            zq += (q[i] = rng.uniform() + 1e-3);
        }
        for (int i = 0; i < 4; ++i) p[i] /= zp, q[i] /= zq;
        const double s = -std::log2(rng.uniform() + 1e-9);
        CHECK(vfe(s, kl_divergence(p, q)) >= s);
    }
}

TEST_CASE("drifting reference raises identification failure") {
    std::map<std::string, std::vector<std::size_t>> a{{"E", {0, 1}}, {"P", {0}}, {"R", {1}}, {"F", {2}}, {"Y", {3, 4, 5, 6, 7}}};
    const SectorMap s = decompose_sectors(8, a);
    Agent agent("A", s, std::vector<BasisAxis>(8, BasisAxis::z()), {QRF("U", s.E, std::vector<BasisAxis>(2, BasisAxis::z()))});
    QubitScreen screen(8);
    Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        screen.prepare_bit(0, t % 2, BasisAxis::z(), "B");
        screen.prepare_bit(1, (t / 3) % 2, BasisAxis::z(), "B");
        if (agent.memory_full()) agent.consolidate_memory(screen);
        agent.read_compare_write(screen, rng);
        screen.advance_tick();
    }
    const auto ident = MarkovKernel::identity({"0", "1"});
    CHECK(prediction_error(agent, "R", ident).identification_failure);
    CHECK(agent.modelled_sectors() == std::vector<std::string>{"E", "P", "R"});
}
