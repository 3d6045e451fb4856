#ifndef QWALK_COMPILER_HPP
#define QWALK_COMPILER_HPP

#include <string>
#include <vector>

#include "qwalk/channel_plan.hpp"
#include "qwalk/circuit.hpp"
#include "qwalk/widget.hpp"

namespace qwalk {

struct CompileOptions {
    bool ideal_blocks = false;  // fallback for non-representable SVD unitaries
    int max_qubits = kMaxQubitsDefault;
    long long max_nodes = 2000000;
};

struct TerminalWire {
    int ket = 0;          // basis index (pure: the only index)
    int bra = 0;          // dm only
    std::string label;
    bool kept = true;     // false once discarded by a trace_out
    int out_port = -1;    // index into graph.out_ports
    int length = 0;       // accumulated path units along this wire
    int intended_phase = 0;  // gate phase units carried by the wire
    int residual = 0;        // non-gate phase units mod 8 (folded into L0)
};

struct DrainRecord {
    int out_port = -1;
    int op_index = -1;       // position of the channel in the circuit
    std::string from_wire;
};

struct ScatterGraph {
    WidgetGraph graph;
    CircuitMode mode = CircuitMode::dm;
    int n_qubits = 1;
    std::vector<TerminalWire> wires;  // indexed by wire id, row-major (i,j)
    int start_wire = 0;
    int start_port = 0;               // index into graph.in_ports
    std::vector<DrainRecord> drains;
    std::vector<double> rescale_log;
    int nominal_length = 0;           // common residual phase units (mod 8)
    int traced_qubits = 0;
    std::vector<int> traced_list;     // qubits removed by trace_out, in order
    bool abstract_blocks = false;     // true when ideal-block fallback fired
    std::string circuit_name;

    int wire_count() const { return static_cast<int>(wires.size()); }
};

struct GraphTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScatterGraph compile(const CircuitSpec& spec, const CompileOptions& opts = {});

struct ResourceReport {
    int n = 0;
    int T = 0;    // unitary gate count
    int fT = 0;   // channel count
    double f = 0.0;
    long long wires_actual = 0;
    long long nodes_actual = 0;
    double wires_formula_open = 0.0;
    double nodes_formula_open = 0.0;
    double wires_formula_purif = 0.0;
    double nodes_formula_purif = 0.0;
    double survival_lower_bound = 1.0;
    bool ft_greater_than_n = false;
};

// Formula fields from (n, T, fT); actual counts filled when a graph is given.
ResourceReport resource_report(const CircuitSpec& spec,
                               const ScatterGraph* graph = nullptr);
ResourceReport resource_report_from_counts(int n, int T, int fT);

std::string export_dot(const ScatterGraph& graph);
std::string scatter_graph_to_json(const ScatterGraph& graph);

// Row-major wire id (i * 2^n + j) and its display label.
int dm_wire_index(int ket, int bra, int n_qubits);
std::string wire_label(int ket, int bra, int n_qubits, CircuitMode mode);

}  // namespace qwalk

#endif
