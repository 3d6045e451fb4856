#ifndef QWALK_SYNTHESIS_HPP
#define QWALK_SYNTHESIS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/circuit.hpp"

namespace qwalk {

// Primitive wire operations the widget catalog can realize directly.
//   u1pow   - path m units longer on one named wire, phase e^{i m pi/4}
//   u2pow   - m two-wire gate cores on a wire pair
//   crossing - relabeling of the local wires
struct SeqItem {
    enum class Kind { u1pow, u2pow, crossing };
    Kind kind;
    int pow = 0;            // u1pow: 0..7, u2pow: 0..3
    int w0 = 0, w1 = 1;     // u1pow: w0 carries the phase; u2pow: the pair
    std::vector<int> perm;  // crossing
};

struct GateSequence {
    int n_wires = 2;
    std::vector<SeqItem> items;
    // Balanced pad applied to every wire of the span; carries the -1 factors
    // arising from u2^4 = -I under conjugation.
    int pad_units = 0;
    // Product of the emitted items (and pad) equals
    // e^{i pi/4 * global_phase_eighths} times the synthesis target.
    int global_phase_eighths = 0;

    // Ordered product of the item matrices times the pad phase.
    MatrixXcd matrix() const;
    // Phase-length of the compiled block in path units (mod 8): the realized
    // transmission at k = pi/4 is omega^{path_phase_units} * target.
    int path_phase_units() const;
};

struct NotExactlyRepresentable : std::runtime_error {
    MatrixXcd offending;
    explicit NotExactlyRepresentable(const MatrixXcd& m)
        : std::runtime_error("unitary is not exactly representable in the widget gate set"),
          offending(m) {}
};

// Exact synthesis over words in {u1, u2} (2x2), extended to 4x4 matrices
// that split into wire permutations, single-wire phases e^{i m pi/4}, and
// synthesizable 2x2 blocks. Throws NotExactlyRepresentable otherwise.
// For 2x2 inputs the emitted product equals omega^gp * M with gp recorded;
// 4x4 results always have global phase 0 (phases are pushed onto wires).
GateSequence synthesize_unitary(const Eigen::Matrix2cd& m);
GateSequence synthesize_unitary(const Eigen::Matrix4cd& m);

// Sequence implementing the entry-wise conjugate of g's product:
// u1pow(m) -> u1pow(8-m), u2pow(m) -> u2pow(4-m) with a 4-unit pad per
// conjugated core, crossing unchanged.
GateSequence conjugate_sequence(const GateSequence& g);

// Unitary change of basis from wire order (rho00, rho11, rho01, rho10) to
// Pauli components (a0, a1, a2, a3)/sqrt(2) of rho = (a0 I + a.sigma)/2.
Matrix4cd pauli_transform_matrix();
Vector4cd pauli_transform(const Vector4cd& wire_vec);

}  // namespace qwalk

#endif
