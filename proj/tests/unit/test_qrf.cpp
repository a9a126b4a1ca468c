#include <doctest.h>

#include "qfep/error.hpp"
#include "qfep/qrf.hpp"

using namespace qfep;

namespace {

QRF frame(const std::string &name, std::vector<std::size_t> sector, const BasisAxis &axis) {
    const std::size_t n = sector.size();
    return QRF(name, std::move(sector), std::vector<BasisAxis>(n, axis));
}

}  // namespace

TEST_CASE("observables of frames") {
    const auto z = observable_of(frame("U", {0}, BasisAxis::z()), 1);
    CHECK((z.matrix() - Eigen::MatrixXcd(pauli::z())).norm() < 1e-12);
    const auto zz = observable_of(frame("U", {0, 1}, BasisAxis::z()), 2);
    CHECK(zz.matrix().isDiagonal(1e-12));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(std::abs(zz.matrix()(i, i).real()) - 1.0) < 1e-12);
    const auto x = observable_of(frame("U", {1}, BasisAxis::x()), 2);
    CHECK((x.matrix() * x.matrix() - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
    CHECK((x.matrix() - kron(pauli::identity(), pauli::x())).norm() < 1e-12);
}

TEST_CASE("commutation") {
    CHECK(qrfs_commute(frame("U", {0}, BasisAxis::z()), frame("V", {1}, BasisAxis::x())));
    CHECK(qrfs_commute(frame("U", {0}, BasisAxis::z()), frame("V", {0}, BasisAxis::z())));
    CHECK_FALSE(qrfs_commute(frame("U", {0}, BasisAxis::z()), frame("V", {0}, BasisAxis::x())));
    CHECK(commutator_norm(frame("U", {0}, BasisAxis::z()), frame("V", {0}, BasisAxis::x())) > 1.0);
}

TEST_CASE("co-deployability") {
    SUBCASE("commuting frames on a product state") {
        const ContextPair pair{frame("U", {0}, BasisAxis::z()), frame("V", {1}, BasisAxis::z()), {2}};
        const auto stats = context_statistics(StateVector::qubits(3, 2), pair, std::nullopt);
        CHECK(codeployable(pair, stats));
    }
    SUBCASE("z and x on one pointer qubit") {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);
        const ContextPair pair{frame("U", {0}, BasisAxis::z()), frame("V", {0}, BasisAxis::x()), {1}};
        const auto stats = context_statistics(StateVector({2, 2}, v), pair, std::nullopt);
        CHECK_FALSE(codeployable(pair, stats));
    }
    SUBCASE("commuting frames with disturbed statistics") {
        const ContextPair pair{frame("U", {0}, BasisAxis::z()), frame("V", {1}, BasisAxis::z()), {2}};
        auto stats = context_statistics(StateVector::qubits(3, 0), pair, std::nullopt);
        // the background marginal now disagrees between the two contexts
        stats.contexts[1].distribution = {0.5, 0.5, 0.0, 0.0};
        CHECK_FALSE(codeployable(pair, stats));
    }
    SUBCASE("sampled statistics") {
        const ContextPair pair{frame("U", {0}, BasisAxis::z()), frame("V", {1}, BasisAxis::z()), {}};
        Rng rng(1);
        const auto stats = context_statistics(StateVector::qubits(2, 1), pair, 200, &rng);
        CHECK(stats.contexts.size() == 2);
        CHECK_THROWS_AS(context_statistics(StateVector::qubits(2, 1), pair, 200), Error);
    }
}

TEST_CASE("context switch") {
    const std::vector<BasisAxis> z2(2, BasisAxis::z());
    const InteractionSpec spec = build_interaction({0.5, 0.5}, kLn2, 310.0, z2, z2);
    const QRF target = frame("P", {0}, BasisAxis::z());
    const InteractionSpec same = context_switch(spec, target, {{0, BasisAxis::z()}});
    CHECK((screen_operator(same, 'A').matrix() - screen_operator(spec, 'A').matrix()).norm() < 1e-12);

    const InteractionSpec sw = context_switch(spec, target, {{0, BasisAxis::x()}});
    const Eigen::Matrix2cd after = sw.axes_a[0].observable();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(after);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.0));
    const Eigen::Matrix2cd u = rotation_between(BasisAxis::z(), BasisAxis::x());
    CHECK((u * pauli::z() * u.adjoint() - after).norm() < 1e-9);
    CHECK((sw.axes_b[0].observable() - Eigen::Matrix2cd(pauli::z())).norm() < 1e-12);

    CHECK_THROWS_AS(context_switch(spec, target, {{1, BasisAxis::x()}}), Error);
    CHECK_THROWS_AS(context_switch(spec, target, {{0, BasisAxis::x()}}, {0}), Error);

    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
        const BasisAxis a = BasisAxis::from_spherical(M_PI * rng.uniform(), 2 * M_PI * rng.uniform());
        const BasisAxis b = BasisAxis::from_spherical(M_PI * rng.uniform(), 2 * M_PI * rng.uniform());
        const Eigen::Matrix2cd r = rotation_between(a, b);
        CHECK((r * a.observable() * r.adjoint() - b.observable()).norm() < 1e-9);
    }
    const Eigen::Matrix2cd anti = rotation_between(BasisAxis::z(), BasisAxis::from_angle(M_PI));
    CHECK((anti * pauli::z() * anti.adjoint() + Eigen::Matrix2cd(pauli::z())).norm() < 1e-9);
}

TEST_CASE("record programs") {
    const RecordProgram id = RecordProgram::identity(3);
    CHECK(id.run({1, 0, 1}) == std::vector<int>{1, 0, 1});
    CHECK(id.invertible());
    CHECK(RecordProgram::negation(2).run({1, 0}) == std::vector<int>{0, 1});
    CHECK(RecordProgram::negation(2).preimage({0, 1}) == std::vector<int>{1, 0});

    const QRF parity = qrf_from_config("W", {{"sector", "0 1"}, {"axes", "0 0 1 | 0 0 1"}, {"nodes", "h=xor"},
                                             {"edges", "in0->h:1 in1->h:1"}, {"outputs", "h"}});
    CHECK(parity.program.run({1, 1}) == std::vector<int>{0});
    CHECK(parity.program.run({1, 0}) == std::vector<int>{1});
    CHECK_FALSE(parity.program.invertible());
    CHECK_THROWS_AS(parity.program.preimage({1}), Error);

    // four layers of negation exceed the depth limit
    CHECK_THROWS_AS(qrf_from_config("D", {{"sector", "0"}, {"axes", "0 0 1"}, {"nodes", "a=not b=not c=not d=not"},
                                          {"edges", "in0->a:1 a->b:1 b->c:1 c->d:1"}, {"outputs", "d"}}),
                    Error);
    CHECK_THROWS_AS(qrf_from_config("B", {{"sector", "0 1"}, {"axes", "0 0 1 | 0 0 1"}, {"nodes", "a=not"},
                                          {"edges", "in0->a:1 in1->a:1"}, {"outputs", "a"}}),
                    Error);
}

TEST_CASE("implements check") {
    Rng rng(3);
    const QRF id("U", {0, 1}, std::vector<BasisAxis>(2, BasisAxis::z()));
    const QRF neg("N", {0, 1}, std::vector<BasisAxis>(2, BasisAxis::z()), RecordProgram::negation(2));
    const ScreenDynamics nothing = [](const StateVector &s) { return s; };
    const Eigen::MatrixXcd flip_all = kron(pauli::x(), pauli::x());
    const ScreenDynamics flip = [&](const StateVector &s) { return StateVector(s.dims(), flip_all * s.amplitudes()); };
    CHECK(implements_check(id, nothing, 2, 20, rng));
    CHECK(implements_check(neg, flip, 2, 20, rng));
    CHECK_FALSE(implements_check(neg, nothing, 2, 20, rng));
}

TEST_CASE("frames read through their program") {
    Rng rng(4);
    QubitScreen s(2);
    s.prepare_bit(0, 1, BasisAxis::x(), "B");
    s.prepare_bit(1, 0, BasisAxis::x(), "B");
    QRF neg("N", {0, 1}, std::vector<BasisAxis>(2, BasisAxis::x()), RecordProgram::negation(2));
    CHECK(neg.read(s, rng) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(QRF("Bad", {0, 0}, std::vector<BasisAxis>(2, BasisAxis::z())), Error);
}
