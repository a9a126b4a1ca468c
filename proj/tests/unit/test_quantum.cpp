#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "qfep/error.hpp"
#include "qfep/quantum.hpp"

using namespace qfep;

namespace {

StateVector bell() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v[0] = v[3] = 1.0 / std::sqrt(2.0);
    return StateVector({2, 2}, v);
}

}  // namespace

TEST_CASE("tensor of basis states") {
    const StateVector s = tensor(StateVector::qubits(1, 0), StateVector::qubits(1, 1));
    CHECK(s.dims() == Dims{2, 2});
    CHECK(std::abs(s[1] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(s[0]) + std::abs(s[2]) + std::abs(s[3]) == 0.0);

    Rng rng(1);
    const StateVector a = StateVector::random({2}, rng);
    const StateVector b = StateVector::random({2, 3}, rng);
    const StateVector ab = tensor(a, b);
    CHECK(ab.dims() == Dims{2, 2, 3});
    CHECK(ab.dim() == 12);
    CHECK(ab.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state validation") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(2);
    CHECK_THROWS_AS(StateVector({2}, v), Error);
    CHECK_THROWS_AS(StateVector({2, 2}, Eigen::VectorXcd::Ones(2) / std::sqrt(2.0)), Error);
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(HermitianOperator{m}, Error);
}

TEST_CASE("evolve with zero Hamiltonian is the identity") {
    Rng rng(2);
    const StateVector s = StateVector::random({2, 2}, rng);
    const StateVector out = evolve(s, HermitianOperator::zero(4), 3.7);
    CHECK((out.amplitudes() - s.amplitudes()).norm() < 1e-12);
}

TEST_CASE("eigenstate picks up a phase") {
    const double phi = 0.83, t = 1.9;
    const HermitianOperator h(Eigen::MatrixXcd(pauli::z() * phi));
    const StateVector out = evolve(StateVector::qubits(1, 0), h, t);
    CHECK(std::abs(out[0] - std::exp(cplx(0.0, -phi * t))) < 1e-12);
}

TEST_CASE("pauli x for a quarter period flips with phase -i") {
    const StateVector out = evolve(StateVector::qubits(1, 0), HermitianOperator(Eigen::MatrixXcd(pauli::x())), M_PI / 2);
    CHECK(std::abs(out[0]) < 1e-12);
    CHECK(std::abs(out[1] - cplx(0.0, -1.0)) < 1e-12);
}

TEST_CASE("single qubit propagator matches the closed form") {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const double h0 = rng.normal();
        const std::array<double, 3> h{rng.normal(), rng.normal(), rng.normal()};
        const double t = 3.0 * rng.uniform();
        Eigen::Matrix2cd hm = h0 * pauli::identity() + h[0] * pauli::x() + h[1] * pauli::y() + h[2] * pauli::z();
        const Propagator u{HermitianOperator(Eigen::MatrixXcd(hm))};
        CHECK((u.unitary(t) - oracle::qubit_propagator(h0, h, t)).norm() < 1e-10);
    }
}

TEST_CASE("schmidt coefficients") {
    SUBCASE("product") {
        const auto d = schmidt(StateVector::qubits(2, 1), {0});
        REQUIRE(d.coefficients.size() == 1);
        CHECK(d.coefficients[0] == doctest::Approx(1.0));
    }
    SUBCASE("bell") {
        const auto d = schmidt(bell(), {0});
        REQUIRE(d.coefficients.size() == 2);
        for (double c : d.coefficients) CHECK(c == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("ghz") {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
        v[0] = v[7] = 1.0 / std::sqrt(2.0);
        const auto d = schmidt(StateVector({2, 2, 2}, v), {0});
        REQUIRE(d.coefficients.size() == 2);
        for (double c : d.coefficients) CHECK(c == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("reconstruction on a non-contiguous cut") {
        Rng rng(4);
        const StateVector s = StateVector::random({2, 2, 2, 2}, rng);
        const auto d = schmidt(s, {1, 3});
        CHECK((d.reconstruct(s.dims()).amplitudes() - s.amplitudes()).norm() < 1e-10);
    }
}

TEST_CASE("entanglement entropy") {
    CHECK(entanglement_entropy(StateVector::qubits(3, 5), {0}) == doctest::Approx(0.0));
    CHECK(entanglement_entropy(bell(), {0}) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v[0] = std::sqrt(0.9);
    v[3] = std::sqrt(0.1);
    const double expected = -0.9 * std::log2(0.9) - 0.1 * std::log2(0.1);
    CHECK(entanglement_entropy(StateVector({2, 2}, v), {0}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.469).epsilon(1e-3));
}

TEST_CASE("partial trace") {
    const DensityMatrix r = partial_trace(StateVector::qubits(2, 1), {0});
    CHECK(std::abs(r.matrix()(0, 0) - cplx(1.0)) < 1e-12);
    CHECK(r.purity() == doctest::Approx(1.0));
    const DensityMatrix b = partial_trace(bell(), {0});
    CHECK((b.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);

    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const StateVector s = StateVector::random({2, 2, 2}, rng);
        const DensityMatrix p = partial_trace(s, {0, 2});
        CHECK((p.matrix() - oracle::reduced(s.amplitudes(), 3, {0, 2})).norm() < 1e-10);
        const auto d = schmidt(s, {0});
        Eigen::VectorXd ev = partial_trace(s, {0}).eigenvalues();
        std::vector<double> c2;
        for (double c : d.coefficients) c2.push_back(c * c);
        std::sort(c2.begin(), c2.end());
        std::vector<double> ev2;
        for (double e : ev)
            if (e > 1e-12) ev2.push_back(e);
        REQUIRE(ev2.size() == c2.size());
        for (std::size_t i = 0; i < c2.size(); ++i) CHECK(ev2[i] == doctest::Approx(c2[i]).epsilon(1e-9));
    }
}

TEST_CASE("born measurement") {
    const HermitianOperator z(Eigen::MatrixXcd(pauli::z()));
    Rng rng(6);
    const Measurement m = born_measure(StateVector::qubits(1, 1), z, 0, rng);
    CHECK(m.outcome == -1);
    CHECK(m.probability == doctest::Approx(1.0));

    Eigen::VectorXcd plus = Eigen::VectorXcd::Ones(2) / std::sqrt(2.0);
    const StateVector p({2}, plus);
    CHECK(born_probability(p, z, 0, +1) == doctest::Approx(0.5));
    CHECK(born_probability(p, z, 0, -1) == doctest::Approx(0.5));

    SUBCASE("frequency within three sigma") {
        Eigen::VectorXcd v(2);
        v << std::sqrt(0.3), std::sqrt(0.7);
        const StateVector s({2}, v);
        const int shots = 100000;
        int up = 0;
        for (int i = 0; i < shots; ++i) up += born_measure(s, z, 0, rng).outcome > 0;
        const double sigma = std::sqrt(0.3 * 0.7 / shots);
        CHECK(std::abs(up / double(shots) - 0.3) < 3 * sigma);
    }
    SUBCASE("one uniform draw per measurement") {
        Rng a(9), b(9);
        (void)born_measure(p, z, 0, a);
        (void)b.uniform();
        CHECK(a.next() == b.next());
    }
    SUBCASE("non binary observable") {
        CHECK_THROWS_AS(born_measure(p, HermitianOperator(Eigen::MatrixXcd(pauli::z() * 2.0)), 0, rng), Error);
    }
    SUBCASE("collapse on a subsystem of a bell pair") {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);
        const Measurement mb = born_measure(StateVector({2, 2}, v), z, 0, rng);
        CHECK(born_probability(mb.post_state, z, 1, mb.outcome) == doctest::Approx(1.0));
    }
}

TEST_CASE("dense routines respect the dimension cap") {
    CHECK_THROWS_AS(StateVector::qubits(13), Error);
}

TEST_CASE("rng streams") {
    Rng a(42);
    const Rng f1 = a.fork("x");
    (void)a.next();
    const Rng f2 = a.fork("x");
    Rng c1 = f1, c2 = f2;
    CHECK(c1.next() == c2.next());
    Rng d1 = a.fork(1), d2 = a.fork(2);
    CHECK(d1.next() != d2.next());
    Rng u(7);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) mean += u.uniform();
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
    for (int i = 0; i < 1000; ++i) CHECK(u.below(7) < 7);
}
