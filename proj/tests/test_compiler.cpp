#include "doctest.h"

#include "qwalk/compiler.hpp"

using namespace qwalk;

TEST_CASE("empty dm circuit compiles to four labeled wires") {
    auto spec = parse_circuit("qubits 1\nmode dm\n");
    ScatterGraph g = compile(spec);
    REQUIRE(g.wire_count() == 4);
    CHECK(g.wires[0].label == "0|0");
    CHECK(g.wires[1].label == "0|1");
    CHECK(g.wires[2].label == "1|0");
    CHECK(g.wires[3].label == "1|1");
    CHECK(g.drains.empty());
    CHECK(g.rescale_log.empty());
    CHECK(g.start_wire == 0);
    CHECK(g.graph.n_nodes == 4);  // one start node per wire
}

TEST_CASE("erasure compiles to three drains and a sqrt(2) rescale") {
    auto spec = parse_circuit("qubits 1\nmode dm\nchannel erase 0\n");
    ScatterGraph g = compile(spec);
    CHECK(g.drains.size() == 3);
    REQUIRE(g.rescale_log.size() == 1);
    CHECK(g.rescale_log[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // Drain count never exceeds 4 per channel.
    CHECK(g.drains.size() <= 4);
}

TEST_CASE("cnot compiles to a pure relabeling") {
    auto before = compile(parse_circuit("qubits 2\nmode dm\n"));
    auto after = compile(parse_circuit("qubits 2\nmode dm\ngate cnot 0 1\n"));
    CHECK(after.graph.n_nodes == before.graph.n_nodes);
    CHECK(after.graph.edges.size() == before.graph.edges.size());
}

TEST_CASE("dm mode always carries 2^{2n} terminal wires") {
    for (int n : {1, 2, 3}) {
        CircuitSpec spec;
        spec.n_qubits = n;
        spec.mode = CircuitMode::dm;
        ScatterGraph g = compile(spec);
        CHECK(g.wire_count() == (1 << (2 * n)));
    }
}

TEST_CASE("trace_out marks the discarded wires") {
    auto spec = parse_circuit(
        "qubits 2\nmode dm\ngate h 0\ngate cnot 0 1\ntrace_out 1\n");
    ScatterGraph g = compile(spec);
    int kept = 0;
    for (const auto& w : g.wires) kept += w.kept ? 1 : 0;
    CHECK(kept == 4);  // 4^(n-1)
    CHECK(g.traced_qubits == 1);
    for (const auto& w : g.wires) {
        bool expect_kept = ((w.ket & 1) == 0) && ((w.bra & 1) == 0);
        CHECK(w.kept == expect_kept);
    }
}

TEST_CASE("path bookkeeping stays mod-8 consistent") {
    auto spec = parse_circuit(
        "qubits 2\nmode dm\ngate h 0\ngate u1 1 pow=3\ngate cnot 0 1\n"
        "channel depol 1 p=0.3\ngate u2 0\n");
    ScatterGraph g = compile(spec);
    for (const auto& w : g.wires) {
        CHECK(((w.length - w.intended_phase - w.residual) % 8 + 8) % 8 == 0);
        CHECK(w.residual == g.nominal_length);
    }
}

TEST_CASE("resource formulas match the hand values") {
    ResourceReport r = resource_report_from_counts(1, 4, 2);
    CHECK(r.wires_formula_open == doctest::Approx(12.0));
    CHECK(r.wires_formula_purif == doctest::Approx(8.0));
    CHECK(r.ft_greater_than_n);
    CHECK(r.nodes_formula_open == doctest::Approx(4.0 * 4.0 * 1.5));

    ResourceReport r2 = resource_report_from_counts(2, 0, 0);
    CHECK(r2.wires_formula_open == doctest::Approx(16.0));
    CHECK(r2.survival_lower_bound == doctest::Approx(1.0));
    CHECK(!r2.ft_greater_than_n);

    ResourceReport r3 = resource_report_from_counts(1, 1, 1);
    CHECK(r3.survival_lower_bound == doctest::Approx(0.25));

    ResourceReport r4 = resource_report_from_counts(3, 2, 0);
    CHECK(r4.wires_formula_open == doctest::Approx(64.0));
    CHECK(r4.wires_formula_purif == doctest::Approx(8.0));

    // Repetition bound caps at 2^{2 min(fT, n)}.
    ResourceReport r5 = resource_report_from_counts(1, 8, 8);
    CHECK(1.0 / r5.survival_lower_bound == doctest::Approx(4.0));
}

TEST_CASE("actual counts land in the report") {
    auto spec = parse_circuit("qubits 1\nmode dm\nchannel erase 0\n");
    ScatterGraph g = compile(spec);
    ResourceReport r = resource_report(spec, &g);
    CHECK(r.wires_actual == 4 + 3);
    CHECK(r.nodes_actual == g.graph.n_nodes);
    CHECK(r.fT == 1);
    CHECK(r.T == 0);
}

TEST_CASE("node counts grow linearly in circuit depth") {
    auto nodes_for = [](int t) {
        CircuitSpec spec;
        spec.n_qubits = 1;
        spec.mode = CircuitMode::dm;
        for (int i = 0; i < t; ++i) {
            spec.ops.push_back(GateOp{GateKind::h, 0});
            if (i % 2 == 1)
                spec.ops.push_back(ChannelOp{ChannelKind::depolarizing, 0, 0.3,
                                             depolarizing_kraus(0.3),
                                             Matrix4cd::Zero(), ""});
        }
        return compile(spec).graph.n_nodes;
    };
    // Log-log slope over a depth doubling ladder.
    double n4 = nodes_for(4), n32 = nodes_for(32);
    double exponent = std::log(n32 / n4) / std::log(32.0 / 4.0);
    CHECK(exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dot export is deterministic and styles drains") {
    auto spec = parse_circuit("qubits 1\nmode dm\nchannel erase 0\n");
    ScatterGraph g = compile(spec);
    std::string dot = export_dot(g);
    CHECK(dot == export_dot(g));
    CHECK(dot.find("drain") != std::string::npos);
    CHECK(dot.find("color=red") != std::string::npos);

    auto empty_spec = parse_circuit("qubits 1\nmode dm\n");
    std::string dot2 = export_dot(compile(empty_spec));
    CHECK(dot2.find("0|0") != std::string::npos);
    CHECK(dot2.find("1|1") != std::string::npos);
}

TEST_CASE("scatter graph json includes the wire map") {
    auto spec = parse_circuit("qubits 1\nmode dm\nchannel erase 0\n");
    ScatterGraph g = compile(spec);
    std::string j = scatter_graph_to_json(g);
    CHECK(j.find("wire_map") != std::string::npos);
    CHECK(j.find("rescale_log") != std::string::npos);
}

TEST_CASE("oversized circuits are rejected") {
    CircuitSpec spec;
    spec.n_qubits = 5;  // above the default maximum of 4
    spec.mode = CircuitMode::dm;
    CHECK_THROWS_AS(compile(spec), std::invalid_argument);
}

TEST_CASE("node limit guards compilation") {
    auto spec = parse_circuit("qubits 2\nmode dm\ngate h 0\ngate h 1\n");
    CompileOptions opts;
    opts.max_nodes = 10;
    CHECK_THROWS_AS(compile(spec, opts), GraphTooLarge);
}
