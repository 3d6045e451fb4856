#ifndef QWALK_WIDGET_HPP
#define QWALK_WIDGET_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/circuit.hpp"

namespace qwalk {

// Finite tight-binding graph with semi-infinite unit-hopping leads attached
// at the port nodes. The Hamiltonian is the (weighted) adjacency matrix.
struct WidgetGraph {
    struct Edge {
        int a, b;
        double hopping;
    };

    // An ideal block bypasses internal structure: amplitudes arriving at the
    // in ports are mapped onto the out ports by the matrix, with zero length.
    struct IdealBlock {
        std::vector<int> in_nodes;
        std::vector<int> out_nodes;
        MatrixXcd map;  // out x in, isometry columns
    };

    std::string name;
    int n_nodes = 0;
    std::vector<Edge> edges;
    std::vector<int> in_ports;
    std::vector<int> out_ports;
    std::vector<IdealBlock> ideal_blocks;

    int add_node() { return n_nodes++; }
    // Zero hoppings are dropped (used by the lambda=0/1 damping junctions).
    void add_edge(int a, int b, double hopping = 1.0) {
        if (hopping != 0.0) edges.push_back({a, b, hopping});
    }

    // Checks port distinctness, index ranges, hopping values.
    std::vector<std::string> validate() const;

    std::string to_json() const;
    static WidgetGraph from_json(const std::string& text);
    std::string to_dot() const;
};

struct SMatrix {
    double k = 0.0;
    MatrixXcd r;         // in_ports x in_ports
    MatrixXcd t;         // out_ports x in_ports
    MatrixXcd internal;  // node amplitudes, n_nodes x in_ports

    // Max deviation of the stacked (r; t) columns from orthonormality.
    double unitarity_error() const;
};

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solves the lead-eliminated Schrodinger system at energy E = 2 cos k:
// (E - H - Sigma) psi = s, with Sigma = e^{ik} on every port node and
// source -2i sin(k) on one input port at a time. Expanding a row of this
// system at a port reproduces the widget Schrodinger equations node by node.
SMatrix solve_smatrix(const WidgetGraph& w, double k);

// --- catalog -------------------------------------------------------------

// Two-wire gate widget: a five-rung bridge ladder whose transmission at
// k = pi/4 is exactly e^{i pi/4} * U2 with zero reflection; the reflection
// slope also vanishes there. The phase is one path unit, accounted by the
// compiler's length bookkeeping.
WidgetGraph u2_widget();

// Bridge couplings and phase length of the gate core (shared with the
// compiler's inline core builder).
extern const double kU2BridgeCoupling[5];
extern const int kU2CorePhaseUnits;

// Plain wire of `internal_nodes` chain nodes between the two ports.
WidgetGraph wire_widget(int internal_nodes);

// Reference wire used for relative-phase checks.
WidgetGraph reference_wire();

// Path m nodes longer than the reference wire; adds e^{i m pi/4} at k=pi/4.
WidgetGraph phase_widget(int m);

// Ports relabeled by perm (out[perm[i]] fed from in[i]), one edge per wire.
WidgetGraph crossing_widget(const std::vector<int>& perm);

// Amplitude-damping Y junction: the kept and drain legs leave the input
// node with hoppings lambda and sqrt(1-lambda^2). Transmission is
// e^{ik} (lambda, sqrt(1-lambda^2))^T at every k.
WidgetGraph dlambda_widget(double lambda);

// Widget consisting only of an ideal block with the given isometry.
WidgetGraph ideal_block_widget(const MatrixXcd& map);

struct WidgetReport {
    double max_err = 0.0;          // |t - phase*target| entrywise max
    double reflection_norm = 0.0;  // max |r|
    cplx phase_offset = 1.0;       // phase aligning t to target
};

// Compares t against target up to one global phase.
WidgetReport verify_widget(const WidgetGraph& w, const MatrixXcd& target,
                           double k, double tol = 1e-10);

}  // namespace qwalk

#endif
