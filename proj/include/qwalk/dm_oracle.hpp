#ifndef QWALK_DM_ORACLE_HPP
#define QWALK_DM_ORACLE_HPP

#include <string>

#include "qwalk/circuit.hpp"
#include "qwalk/scattering.hpp"

namespace qwalk {

// Exact reference density-matrix simulator; ground truth for graph results.
struct DensityMatrix {
    int n_qubits = 1;
    MatrixXcd rho;

    int dim() const { return 1 << n_qubits; }
    double hermiticity_error() const;
    double trace_error() const;
    double min_eigenvalue() const;
};

DensityMatrix initial_state(int n_qubits);  // |0..0><0..0|

// Applies gates as U rho U^dag, channels by their Kraus sums (or the 4x4
// wire superoperator), and trace_out as a partial trace.
DensityMatrix simulate(const CircuitSpec& spec);

// Statevector reference for pure-mode circuits.
Eigen::VectorXcd simulate_pure(const CircuitSpec& spec);

double purity(const DensityMatrix& dm);
DensityMatrix partial_trace(const DensityMatrix& dm, int qubit);

// Golden-file serialization: entries as [re, im] pairs, row major.
std::string dm_to_json(const DensityMatrix& dm);
DensityMatrix dm_from_json(const std::string& text);

// In-place primitives, exposed for tests and cross-module checks.
void apply_gate(DensityMatrix& dm, const GateOp& g);
void apply_channel(DensityMatrix& dm, const ChannelOp& ch);
void apply_wire_superop(DensityMatrix& dm, int qubit, const Matrix4cd& op);

struct CompareReport {
    double max_abs_err = 0.0;
    cplx phase_used = 1.0;
    bool pass = false;
    std::string worst_wire;
};

// Entrywise comparison of phase-normalized, rescale-corrected amplitudes
// against the oracle DM. Handles circuits that end in trace_out stages by
// matching the kept wires against the reduced DM (with the 1/sqrt(2) factor
// per traced qubit). Pure-mode results compare through the outer product.
CompareReport compare(const WireAmplitudes& amps, const ScatterGraph& graph,
                      const DensityMatrix& rho, double tol = 1e-8);

}  // namespace qwalk

#endif
