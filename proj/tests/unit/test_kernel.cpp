#include <doctest.h>

#include "../oracles.hpp"
#include "qfep/error.hpp"
#include "qfep/kernel.hpp"

using namespace qfep;

TEST_CASE("learning update with smoothing") {
    KernelModel m({"0", "1"}, 1.0);
    const MarkovKernel prior = m.kernel();
    for (const auto &row : prior.matrix())
        for (double v : row) CHECK(v == doctest::Approx(0.5));
    m = learn_update(m, "0", "1");
    CHECK(m.kernel()(0, 0) == doctest::Approx(1.0 / 3));
    CHECK(m.kernel()(0, 1) == doctest::Approx(2.0 / 3));
    m = learn_update(m, "1", "2");
    CHECK(m.alphabet().size() == 3);
}

TEST_CASE("kernel distance examples") {
    const auto id = MarkovKernel::identity({"0", "1"});
    const auto flip = MarkovKernel::permutation({"0", "1"}, {1, 0});
    CHECK(kernel_distance(id, id) == 0.0);
    CHECK(kernel_distance(id, flip) == doctest::Approx(1.0));
    CHECK(kernel_distance(MarkovKernel::uniform({"0", "1"}), id) == doctest::Approx(0.5));
    CHECK_THROWS_AS(kernel_distance(id, MarkovKernel::identity({"0", "1", "2"})), Error);
}

TEST_CASE("kernel distance is a metric") {
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const auto a = MarkovKernel::random(bit_alphabet(2), rng);
        const auto b = MarkovKernel::random(bit_alphabet(2), rng);
        const auto c = MarkovKernel::random(bit_alphabet(2), rng);
        const double ab = kernel_distance(a, b), bc = kernel_distance(b, c), ac = kernel_distance(a, c);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == doctest::Approx(kernel_distance(b, a)).epsilon(1e-15));
        CHECK(ac <= ab + bc + 1e-12);
        double expected = 0.0;
        for (std::size_t i = 0; i < 4; ++i) expected = std::max(expected, oracle::tv(a.matrix()[i], b.matrix()[i]));
        CHECK(ab == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("learned kernel converges") {
    Rng rng(2);
    const auto truth = MarkovKernel::random(bit_alphabet(2), rng);
    KernelModel m(bit_alphabet(2), 1.0);
    std::size_t s = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t next = truth.sample_next(s, rng);
        m.observe(s, next);
        s = next;
    }
    CHECK(m.transitions() == 10000);
    CHECK(kernel_distance(m.kernel(), truth) < 0.05);
}

TEST_CASE("kernel validation and json") {
    CHECK_THROWS_AS(MarkovKernel({"a", "b"}, {{0.5, 0.4}, {0.0, 1.0}}), Error);
    Rng rng(3);
    const auto k = MarkovKernel::random(bit_alphabet(3), rng);
    CHECK(kernel_from_json(kernel_to_json(k)) == k);
    CHECK(bit_alphabet(2) == std::vector<std::string>{"00", "01", "10", "11"});
}
