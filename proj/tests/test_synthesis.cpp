#include "doctest.h"

#include <random>

#include "qwalk/dm_oracle.hpp"
#include "qwalk/synthesis.hpp"
#include "test_helpers.hpp"

using namespace qwalk;

namespace {
const cplx kI(0.0, 1.0);
}

TEST_CASE("hadamard decomposition u1^2 u2 u1^2") {
    GateSequence seq = synthesize_unitary(Matrix2cd(hadamard_matrix()));
    REQUIRE(seq.items.size() == 3);
    CHECK(seq.items[0].kind == SeqItem::Kind::u1pow);
    CHECK(seq.items[0].pow == 2);
    CHECK(seq.items[1].kind == SeqItem::Kind::u2pow);
    CHECK(seq.items[1].pow == 1);
    CHECK(seq.items[2].kind == SeqItem::Kind::u1pow);
    CHECK(seq.items[2].pow == 2);
    // The emitted product is exactly i*H.
    CHECK((seq.matrix() - kI * hadamard_matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(seq.global_phase_eighths == 2);
}

TEST_CASE("identity synthesizes to the empty sequence") {
    GateSequence seq = synthesize_unitary(Matrix2cd(Matrix2cd::Identity()));
    CHECK(seq.items.empty());
    CHECK(seq.global_phase_eighths == 0);
}

TEST_CASE("u1 and u2 powers synthesize to single items") {
    for (int m = 1; m < 8; ++m) {
        Matrix2cd target = Matrix2cd::Identity();
        for (int i = 0; i < m; ++i) target = u1_matrix() * target;
        GateSequence seq = synthesize_unitary(target);
        CHECK((seq.matrix() -
               std::pow(std::polar(1.0, M_PI / 4), seq.global_phase_eighths) *
                   target)
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
}

TEST_CASE("conjugate_sequence maps u1 powers to their complements") {
    GateSequence seq;
    seq.n_wires = 2;
    seq.items.push_back({SeqItem::Kind::u1pow, 1, 1, 1, {}});
    GateSequence conj = conjugate_sequence(seq);
    REQUIRE(conj.items.size() == 1);
    CHECK(conj.items[0].pow == 7);
    CHECK((conj.matrix() - seq.matrix().conjugate()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("conjugate_sequence keeps crossings") {
    GateSequence seq;
    seq.n_wires = 2;
    SeqItem cross;
    cross.kind = SeqItem::Kind::crossing;
    cross.perm = {1, 0};
    seq.items.push_back(cross);
    GateSequence conj = conjugate_sequence(seq);
    REQUIRE(conj.items.size() == 1);
    CHECK(conj.items[0].kind == SeqItem::Kind::crossing);
    CHECK((conj.matrix() - seq.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conjugate of u2 is u2^3 with a 4-unit pad") {
    GateSequence seq;
    seq.n_wires = 2;
    seq.items.push_back({SeqItem::Kind::u2pow, 1, 0, 1, {}});
    GateSequence conj = conjugate_sequence(seq);
    REQUIRE(conj.items.size() == 1);
    CHECK(conj.items[0].pow == 3);
    CHECK(conj.pad_units == 4);
    CHECK((conj.matrix() - u2_matrix().conjugate()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("conjugate of the hadamard sequence has product -iH") {
    GateSequence seq = synthesize_unitary(Matrix2cd(hadamard_matrix()));
    GateSequence conj = conjugate_sequence(seq);
    CHECK((conj.matrix() + kI * hadamard_matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conjugate_sequence inverts the product for random words") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> kind(0, 1), u1pow(1, 7), u2pow(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        GateSequence seq;
        seq.n_wires = 2;
        int len = 1 + trial % 6;
        for (int i = 0; i < len; ++i) {
            if (kind(rng) == 0)
                seq.items.push_back({SeqItem::Kind::u1pow, u1pow(rng), 1, 1, {}});
            else
                seq.items.push_back({SeqItem::Kind::u2pow, u2pow(rng), 0, 1, {}});
        }
        GateSequence conj = conjugate_sequence(seq);
        CHECK((conj.matrix() - seq.matrix().conjugate()).cwiseAbs().maxCoeff() <
              1e-11);
    }
}

TEST_CASE("4x4 synthesis handles hadamard plus identity") {
    Matrix4cd target = Matrix4cd::Identity();
    target.block<2, 2>(0, 0) = hadamard_matrix();
    GateSequence seq = synthesize_unitary(target);
    CHECK((seq.matrix() - target).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(seq.global_phase_eighths == 0);
}

TEST_CASE("4x4 synthesis handles permutations with phases") {
    Matrix4cd target = Matrix4cd::Zero();
    target(2, 0) = 1.0;
    target(0, 2) = std::polar(1.0, M_PI / 4);
    target(1, 1) = std::polar(1.0, 3 * M_PI / 4);
    target(3, 3) = 1.0;
    GateSequence seq = synthesize_unitary(target);
    CHECK((seq.matrix() - target).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("generic unitaries are rejected as not exactly representable") {
    std::mt19937 rng(3);
    Matrix2cd u = qwalk::testing::random_unitary_2(rng);
    CHECK_THROWS_AS(synthesize_unitary(u), NotExactlyRepresentable);
    Matrix4cd u4 = Matrix4cd::Identity();
    u4.block<2, 2>(1, 1) = u;
    CHECK_THROWS_AS(synthesize_unitary(u4), NotExactlyRepresentable);
}

TEST_CASE("non-unitary input is an error, not a synthesis failure") {
    Matrix2cd m = 0.5 * hadamard_matrix();
    CHECK_THROWS_AS(synthesize_unitary(m), std::invalid_argument);
}

TEST_CASE("pauli transform is unitary and matches hand values") {
    Matrix4cd p = pauli_transform_matrix();
    CHECK((p.adjoint() * p - Matrix4cd::Identity()).cwiseAbs().maxCoeff() <
          1e-12);

    Vector4cd mixed;
    mixed << 0.5, 0.5, 0.0, 0.0;
    Vector4cd out = pauli_transform(mixed);
    CHECK(std::abs(out(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out(1)) < 1e-12);
    CHECK(std::abs(out(2)) < 1e-12);
    CHECK(std::abs(out(3)) < 1e-12);

    Vector4cd zero;
    zero << 1, 0, 0, 0;
    out = pauli_transform(zero);
    CHECK(std::abs(out(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out(3) - 1.0 / std::sqrt(2.0)) < 1e-12);

    Vector4cd plus;
    plus << 0.5, 0.5, 0.5, 0.5;
    out = pauli_transform(plus);
    CHECK(std::abs(out(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(out(2)) < 1e-12);
    CHECK(std::abs(out(3)) < 1e-12);
}

TEST_CASE("gate circuits conserve a0 and the polarization") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> gate_pick(0, 2), pow8(1, 7), pow4(1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        CircuitSpec spec;
        spec.n_qubits = 1;
        spec.mode = CircuitMode::dm;
        int len = 1 + trial % 5;
        for (int i = 0; i < len; ++i) {
            switch (gate_pick(rng)) {
                case 0:
                    spec.ops.push_back(GateOp{GateKind::u1, 0, -1, pow8(rng)});
                    break;
                case 1:
                    spec.ops.push_back(GateOp{GateKind::u2, 0, -1, pow4(rng)});
                    break;
                default:
                    spec.ops.push_back(GateOp{GateKind::h, 0});
            }
        }
        DensityMatrix start = initial_state(1);
        start.rho = qwalk::testing::random_density_2(rng);
        DensityMatrix end = start;
        for (const auto& op : spec.ops) apply_gate(end, std::get<GateOp>(op));

        Vector4cd before = pauli_transform(vec_wire_order(Matrix2cd(start.rho)));
        Vector4cd after = pauli_transform(vec_wire_order(Matrix2cd(end.rho)));
        CHECK(std::abs(before(0) - after(0)) < 1e-10);
        double pol_before = std::norm(before(1)) + std::norm(before(2)) +
                            std::norm(before(3));
        double pol_after =
            std::norm(after(1)) + std::norm(after(2)) + std::norm(after(3));
        CHECK(pol_before == doctest::Approx(pol_after).epsilon(1e-10));
    }
}
