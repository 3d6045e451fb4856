#include "qwalk/dm_oracle.hpp"

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace qwalk {

namespace {

int bitpos(int q, int n) { return n - 1 - q; }

int insert_bit(int rest, int pos, int bit) {
    int low = rest & ((1 << pos) - 1);
    int high = rest >> pos;
    return (high << (pos + 1)) | (bit << pos) | low;
}

MatrixXcd expand_1q(const Matrix2cd& u, int qubit, int n) {
    const int dim = 1 << n;
    const int pos = bitpos(qubit, n);
    MatrixXcd full = MatrixXcd::Zero(dim, dim);
    for (int rest = 0; rest < dim / 2; ++rest) {
        int i0 = insert_bit(rest, pos, 0);
        int i1 = insert_bit(rest, pos, 1);
        full(i0, i0) = u(0, 0);
        full(i0, i1) = u(0, 1);
        full(i1, i0) = u(1, 0);
        full(i1, i1) = u(1, 1);
    }
    return full;
}

MatrixXcd cnot_full(int control, int target, int n) {
    const int dim = 1 << n;
    const int cpos = bitpos(control, n), tpos = bitpos(target, n);
    MatrixXcd full = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        int j = (i & (1 << cpos)) ? (i ^ (1 << tpos)) : i;
        full(j, i) = 1.0;
    }
    return full;
}

MatrixXcd full_gate(const GateOp& g, int n) {
    if (g.kind == GateKind::cnot) return cnot_full(g.q0, g.q1, n);
    return expand_1q(gate_matrix_1q(g), g.q0, n);
}

}  // namespace

double DensityMatrix::hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_error() const {
    return std::abs(rho.trace() - cplx(1.0));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(0.5 * (rho + rho.adjoint()));
    return eig.eigenvalues().minCoeff();
}

DensityMatrix initial_state(int n_qubits) {
    DensityMatrix dm;
    dm.n_qubits = n_qubits;
    dm.rho = MatrixXcd::Zero(dm.dim(), dm.dim());
    dm.rho(0, 0) = 1.0;
    return dm;
}

void apply_gate(DensityMatrix& dm, const GateOp& g) {
    MatrixXcd u = full_gate(g, dm.n_qubits);
    dm.rho = u * dm.rho * u.adjoint();
}

void apply_channel(DensityMatrix& dm, const ChannelOp& ch) {
    if (ch.kind == ChannelKind::superop) {
        apply_wire_superop(dm, ch.q, ch.op);
        return;
    }
    MatrixXcd next = MatrixXcd::Zero(dm.dim(), dm.dim());
    for (const auto& k : ch.kraus) {
        MatrixXcd kf = expand_1q(k, ch.q, dm.n_qubits);
        next += kf * dm.rho * kf.adjoint();
    }
    dm.rho = next;
}

void apply_wire_superop(DensityMatrix& dm, int qubit, const Matrix4cd& op) {
    const int pos = bitpos(qubit, dm.n_qubits);
    const int half = dm.dim() / 2;
    MatrixXcd next = dm.rho;
    for (int irest = 0; irest < half; ++irest) {
        int i0 = insert_bit(irest, pos, 0), i1 = insert_bit(irest, pos, 1);
        for (int jrest = 0; jrest < half; ++jrest) {
            int j0 = insert_bit(jrest, pos, 0), j1 = insert_bit(jrest, pos, 1);
            Vector4cd fiber;  // (rho00, rho11, rho01, rho10) over the qubit
            fiber << dm.rho(i0, j0), dm.rho(i1, j1), dm.rho(i0, j1), dm.rho(i1, j0);
            Vector4cd mapped = op * fiber;
            next(i0, j0) = mapped(0);
            next(i1, j1) = mapped(1);
            next(i0, j1) = mapped(2);
            next(i1, j0) = mapped(3);
        }
    }
    dm.rho = next;
}

DensityMatrix partial_trace(const DensityMatrix& dm, int qubit) {
    if (qubit < 0 || qubit >= dm.n_qubits)
        throw std::invalid_argument("qubit out of range");
    const int pos = bitpos(qubit, dm.n_qubits);
    const int half = dm.dim() / 2;
    DensityMatrix out;
    out.n_qubits = dm.n_qubits - 1;
    out.rho = MatrixXcd::Zero(half, half);
    for (int a = 0; a < half; ++a)
        for (int b = 0; b < half; ++b)
            for (int s = 0; s < 2; ++s)
                out.rho(a, b) +=
                    dm.rho(insert_bit(a, pos, s), insert_bit(b, pos, s));
    return out;
}

double purity(const DensityMatrix& dm) {
    return (dm.rho * dm.rho).trace().real();
}

std::string dm_to_json(const DensityMatrix& dm) {
    nlohmann::ordered_json j;
    j["n_qubits"] = dm.n_qubits;
    auto rows = nlohmann::ordered_json::array();
    for (int r = 0; r < dm.dim(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (int c = 0; c < dm.dim(); ++c)
            row.push_back({dm.rho(r, c).real(), dm.rho(r, c).imag()});
        rows.push_back(row);
    }
    j["rho"] = rows;
    return j.dump(2);
}

DensityMatrix dm_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DensityMatrix dm;
    dm.n_qubits = j.at("n_qubits").get<int>();
    dm.rho.resize(dm.dim(), dm.dim());
    const auto& rows = j.at("rho");
    for (int r = 0; r < dm.dim(); ++r)
        for (int c = 0; c < dm.dim(); ++c)
            dm.rho(r, c) = cplx(rows[r][c][0].get<double>(),
                                rows[r][c][1].get<double>());
    return dm;
}

DensityMatrix simulate(const CircuitSpec& spec) {
    DensityMatrix dm = initial_state(spec.n_qubits);
    // Traced qubits shift the indices of those remaining to their right.
    std::vector<int> remap(spec.n_qubits);
    for (int q = 0; q < spec.n_qubits; ++q) remap[q] = q;
    for (const auto& op : spec.ops) {
        if (const auto* g = std::get_if<GateOp>(&op)) {
            GateOp adj = *g;
            adj.q0 = remap[g->q0];
            if (g->kind == GateKind::cnot) adj.q1 = remap[g->q1];
            apply_gate(dm, adj);
        } else if (const auto* c = std::get_if<ChannelOp>(&op)) {
            ChannelOp adj = *c;
            adj.q = remap[c->q];
            apply_channel(dm, adj);
        } else if (const auto* t = std::get_if<TraceOutOp>(&op)) {
            int q = remap[t->q];
            if (q < 0) throw std::invalid_argument("qubit traced out twice");
            dm = partial_trace(dm, q);
            remap[t->q] = -1;
            for (int& m : remap)
                if (m > q) --m;
        }
    }
    return dm;
}

Eigen::VectorXcd simulate_pure(const CircuitSpec& spec) {
    const int dim = 1 << spec.n_qubits;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(0) = 1.0;
    for (const auto& op : spec.ops) {
        const auto* g = std::get_if<GateOp>(&op);
        if (!g) throw std::invalid_argument("pure-mode circuit has non-gate ops");
        psi = full_gate(*g, spec.n_qubits).eval() * psi;
    }
    return psi;
}

CompareReport compare(const WireAmplitudes& amps, const ScatterGraph& graph,
                      const DensityMatrix& rho, double tol) {
    CompareReport rep;
    rep.phase_used = amps.global_phase;

    if (graph.mode == CircuitMode::pure) {
        // Compare outer products; free of the overall phase ambiguity.
        const int dim = 1 << graph.n_qubits;
        if (rho.rho.rows() != dim) throw std::invalid_argument("dimension mismatch");
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                cplx got = amps.amps[i] * std::conj(amps.amps[j]);
                double err = std::abs(got - rho.rho(i, j));
                if (err > rep.max_abs_err) {
                    rep.max_abs_err = err;
                    rep.worst_wire = amps.labels[i] + "*" + amps.labels[j];
                }
            }
        }
        rep.pass = rep.max_abs_err < tol;
        return rep;
    }

    const int reduced_n = graph.n_qubits - graph.traced_qubits;
    if (rho.n_qubits != reduced_n) throw std::invalid_argument("dimension mismatch");
    const double trace_factor =
        std::pow(std::sqrt(2.0), graph.traced_qubits);

    std::vector<char> traced(graph.n_qubits, 0);
    for (int q : graph.traced_list) traced[q] = 1;

    // Kept wires carry the reduced DM entries divided by sqrt(2) per trace.
    int kept_seen = 0;
    for (size_t w = 0; w < amps.amps.size(); ++w) {
        if (!amps.kept[w]) continue;
        ++kept_seen;
        // Strip the traced qubits' (0,0) bits to index the reduced DM.
        int ket = graph.wires[w].ket, bra = graph.wires[w].bra;
        int rket = 0, rbra = 0;
        for (int q = 0; q < graph.n_qubits; ++q) {
            if (traced[q]) continue;
            rket = (rket << 1) | ((ket >> (graph.n_qubits - 1 - q)) & 1);
            rbra = (rbra << 1) | ((bra >> (graph.n_qubits - 1 - q)) & 1);
        }
        cplx expected = rho.rho(rket, rbra) / trace_factor;
        double err = std::abs(amps.amps[w] - expected);
        if (err > rep.max_abs_err) {
            rep.max_abs_err = err;
            rep.worst_wire = amps.labels[w];
        }
    }
    if (kept_seen != (1 << (2 * reduced_n)))
        throw std::invalid_argument("kept wire count inconsistent with trace stage");
    rep.pass = rep.max_abs_err < tol;
    return rep;
}

}  // namespace qwalk
