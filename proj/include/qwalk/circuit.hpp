#ifndef QWALK_CIRCUIT_HPP
#define QWALK_CIRCUIT_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

using cplx = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::Vector4cd;

inline constexpr double kDefaultMomentum = 0.78539816339744830961;  // pi/4
inline constexpr int kMaxQubitsDefault = 4;

// Gate alphabet: cnot, and the single-qubit set {u1, u2, h}.
// u1/u2 carry an integer power (u1^8 = I, u2^4 = -I).
enum class GateKind { cnot, u1, u2, h };

struct GateOp {
    GateKind kind;
    int q0 = 0;       // single-qubit target, or cnot control
    int q1 = -1;      // cnot target
    int pow = 1;      // stored mod 8 (u1) / mod 4 (u2)
};

enum class ChannelKind { depolarizing, erasure, kraus, superop };

struct ChannelOp {
    ChannelKind kind;
    int q = 0;
    double p = 0.0;                     // depolarizing probability
    std::vector<Matrix2cd> kraus;       // kraus / depolarizing / erasure
    Matrix4cd op = Matrix4cd::Zero();   // superop kind only
    std::string source_path;            // kraus file, kept for printing
};

struct TraceOutOp {
    int q = 0;
};

using CircuitOp = std::variant<GateOp, ChannelOp, TraceOutOp>;

enum class CircuitMode { pure, dm };

struct CircuitSpec {
    int n_qubits = 1;
    CircuitMode mode = CircuitMode::pure;
    std::vector<CircuitOp> ops;
    std::string name;
};

struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string message;
};

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

// Fixed gate matrices.
Matrix2cd u1_matrix();                 // diag(1, e^{i pi/4})
Matrix2cd u2_matrix();                 // [[i,1],[1,i]]/sqrt(2)
Matrix2cd hadamard_matrix();
Matrix2cd pauli_x();
Matrix2cd pauli_y();
Matrix2cd pauli_z();
Matrix2cd gate_matrix_1q(const GateOp& g);   // throws on cnot

// Wire ordering of the vectorized one-qubit DM: (rho00, rho11, rho01, rho10).
Vector4cd vec_wire_order(const Matrix2cd& rho);
Matrix2cd dm_from_wire_order(const Vector4cd& v);

// Kraus sets for the built-in channels.
std::vector<Matrix2cd> depolarizing_kraus(double p);
std::vector<Matrix2cd> erasure_kraus();

// Channel as a 4x4 matrix acting on the wire-ordered vectorized DM,
// obtained by applying the Kraus sum to the four matrix units.
// Requires sum K^dag K = I within `tol`.
Matrix4cd kraus_to_superop(const std::vector<Matrix2cd>& kraus,
                           double tol = 1e-10);
Matrix4cd channel_superop(const ChannelOp& ch);

double kraus_normalization_error(const std::vector<Matrix2cd>& kraus);
// Max |Tr(O vec(rho)) - Tr(rho)| over the matrix-unit basis.
double trace_preservation_error(const Matrix4cd& op);

// Line-oriented circuit text. See print_circuit for the canonical form.
CircuitSpec parse_circuit(const std::string& text, const std::string& name = "");
std::string print_circuit(const CircuitSpec& spec);

// Structural validation; empty result means the spec is well-formed.
std::vector<Diagnostic> validate(const CircuitSpec& spec,
                                 int max_qubits = kMaxQubitsDefault);

// Counts used by the resource formulas: unitary gates T and channels fT.
int count_gates(const CircuitSpec& spec);
int count_channels(const CircuitSpec& spec);

}  // namespace qwalk

#endif
