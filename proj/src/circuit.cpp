#include "qwalk/circuit.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qwalk {

namespace {
const cplx kI(0.0, 1.0);
}

Matrix2cd u1_matrix() {
    Matrix2cd m;
    m << 1.0, 0.0, 0.0, std::polar(1.0, M_PI / 4.0);
    return m;
}

Matrix2cd u2_matrix() {
    Matrix2cd m;
    m << kI, 1.0, 1.0, kI;
    return m / std::sqrt(2.0);
}

Matrix2cd hadamard_matrix() {
    Matrix2cd m;
    m << 1.0, 1.0, 1.0, -1.0;
    return m / std::sqrt(2.0);
}

Matrix2cd pauli_x() {
    Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix2cd pauli_y() {
    Matrix2cd m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Matrix2cd pauli_z() {
    Matrix2cd m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix2cd gate_matrix_1q(const GateOp& g) {
    switch (g.kind) {
        case GateKind::u1: {
            Matrix2cd m = Matrix2cd::Identity();
            for (int i = 0; i < ((g.pow % 8) + 8) % 8; ++i) m = u1_matrix() * m;
            return m;
        }
        case GateKind::u2: {
            Matrix2cd m = Matrix2cd::Identity();
            for (int i = 0; i < ((g.pow % 4) + 4) % 4; ++i) m = u2_matrix() * m;
            return m;
        }
        case GateKind::h:
            return hadamard_matrix();
        case GateKind::cnot:
            break;
    }
    throw std::invalid_argument("cnot has no 2x2 matrix");
}

Vector4cd vec_wire_order(const Matrix2cd& rho) {
    Vector4cd v;
    v << rho(0, 0), rho(1, 1), rho(0, 1), rho(1, 0);
    return v;
}

Matrix2cd dm_from_wire_order(const Vector4cd& v) {
    Matrix2cd rho;
    rho << v(0), v(2), v(3), v(1);
    return rho;
}

std::vector<Matrix2cd> depolarizing_kraus(double p) {
    std::vector<Matrix2cd> ks;
    ks.push_back(std::sqrt(1.0 - p) * Matrix2cd::Identity());
    ks.push_back(std::sqrt(p / 3.0) * pauli_x());
    ks.push_back(std::sqrt(p / 3.0) * pauli_y());
    ks.push_back(std::sqrt(p / 3.0) * pauli_z());
    return ks;
}

std::vector<Matrix2cd> erasure_kraus() {
    Matrix2cd k1 = Matrix2cd::Zero(), k2 = Matrix2cd::Zero();
    k1(0, 0) = 1.0;  // |0><0|
    k2(0, 1) = 1.0;  // |0><1|
    return {k1, k2};
}

double kraus_normalization_error(const std::vector<Matrix2cd>& kraus) {
    Matrix2cd s = Matrix2cd::Zero();
    for (const auto& k : kraus) s += k.adjoint() * k;
    return (s - Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

Matrix4cd kraus_to_superop(const std::vector<Matrix2cd>& kraus, double tol) {
    if (kraus.empty()) throw std::invalid_argument("empty Kraus list");
    double err = kraus_normalization_error(kraus);
    if (err > tol)
        throw std::invalid_argument("Kraus normalization violated (error " +
                                    std::to_string(err) + ")");
    // Column j is the channel applied to the j-th matrix unit in wire order.
    const Matrix2cd units[4] = {
        (Matrix2cd() << 1, 0, 0, 0).finished(),   // rho00
        (Matrix2cd() << 0, 0, 0, 1).finished(),   // rho11
        (Matrix2cd() << 0, 1, 0, 0).finished(),   // rho01
        (Matrix2cd() << 0, 0, 1, 0).finished()};  // rho10
    Matrix4cd op;
    for (int j = 0; j < 4; ++j) {
        Matrix2cd out = Matrix2cd::Zero();
        for (const auto& k : kraus) out += k * units[j] * k.adjoint();
        op.col(j) = vec_wire_order(out);
    }
    return op;
}

Matrix4cd channel_superop(const ChannelOp& ch) {
    switch (ch.kind) {
        case ChannelKind::depolarizing:
            return kraus_to_superop(depolarizing_kraus(ch.p));
        case ChannelKind::erasure:
            return kraus_to_superop(erasure_kraus());
        case ChannelKind::kraus:
            return kraus_to_superop(ch.kraus);
        case ChannelKind::superop:
            return ch.op;
    }
    throw std::logic_error("unreachable");
}

double trace_preservation_error(const Matrix4cd& op) {
    // Tr of a wire vector is the sum of its two diagonal-wire entries.
    double worst = 0.0;
    for (int j = 0; j < 4; ++j) {
        cplx tr_out = op(0, j) + op(1, j);
        cplx tr_in = (j < 2) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(tr_out - tr_in));
    }
    return worst;
}

namespace {

struct Cursor {
    int line;
    int col;
};

std::vector<Matrix2cd> load_kraus_file(const std::string& path, Cursor at) {
    std::ifstream in(path);
    if (!in) throw ParseError(at.line, at.col, "cannot open kraus file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(at.line, at.col,
                         "invalid JSON in kraus file: " + std::string(e.what()));
    }
    if (!j.is_array() || j.empty())
        throw ParseError(at.line, at.col, "kraus file must hold a list of matrices");
    std::vector<Matrix2cd> ks;
    for (const auto& m : j) {
        if (!m.is_array() || m.size() != 2)
            throw ParseError(at.line, at.col, "kraus matrix must have 2 rows");
        Matrix2cd k;
        for (int r = 0; r < 2; ++r) {
            const auto& row = m[r];
            if (!row.is_array() || row.size() != 2)
                throw ParseError(at.line, at.col, "kraus row must have 2 entries");
            for (int c = 0; c < 2; ++c) {
                const auto& e = row[c];
                if (!e.is_array() || e.size() != 2)
                    throw ParseError(at.line, at.col,
                                     "kraus entry must be an [re, im] pair");
                k(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            }
        }
        ks.push_back(k);
    }
    return ks;
}

struct LineTokens {
    std::vector<std::string> words;
    std::vector<int> cols;  // 1-based column of each word
};

LineTokens tokenize(const std::string& line) {
    LineTokens t;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        t.words.push_back(line.substr(start, i - start));
        t.cols.push_back(static_cast<int>(start) + 1);
    }
    return t;
}

int parse_int(const std::string& w, Cursor at, const std::string& what) {
    int value = 0;
    auto res = std::from_chars(w.data(), w.data() + w.size(), value);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size())
        throw ParseError(at.line, at.col, "expected integer " + what + ", got '" + w + "'");
    return value;
}

double parse_double(const std::string& w, Cursor at, const std::string& what) {
    try {
        size_t pos = 0;
        double value = std::stod(w, &pos);
        if (pos != w.size()) throw std::invalid_argument(w);
        return value;
    } catch (const std::exception&) {
        throw ParseError(at.line, at.col, "expected number " + what + ", got '" + w + "'");
    }
}

// Accepts "key=value"; returns value or throws.
std::string keyed_value(const std::string& w, const std::string& key, Cursor at) {
    auto eq = w.find('=');
    if (eq == std::string::npos || w.substr(0, eq) != key)
        throw ParseError(at.line, at.col, "expected " + key + "=<value>, got '" + w + "'");
    return w.substr(eq + 1);
}

}  // namespace

CircuitSpec parse_circuit(const std::string& text, const std::string& name) {
    CircuitSpec spec;
    spec.name = name;
    bool have_qubits = false;
    bool seen_trace_out = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        LineTokens t = tokenize(line);
        if (t.words.empty()) continue;
        Cursor at{lineno, t.cols[0]};
        auto arg_at = [&](size_t i) { return Cursor{lineno, t.cols[i]}; };
        auto need = [&](size_t n, const std::string& usage) {
            if (t.words.size() != n)
                throw ParseError(at.line, at.col, "expected: " + usage);
        };
        auto check_qubit = [&](int q, Cursor c) {
            if (!have_qubits)
                throw ParseError(c.line, c.col, "'qubits' must come first");
            if (q < 0 || q >= spec.n_qubits)
                throw ParseError(c.line, c.col, "qubit index out of range");
        };

        const std::string& head = t.words[0];
        if (head == "qubits") {
            need(2, "qubits <n>");
            spec.n_qubits = parse_int(t.words[1], arg_at(1), "qubit count");
            if (spec.n_qubits < 1)
                throw ParseError(arg_at(1).line, arg_at(1).col, "qubit count must be positive");
            have_qubits = true;
        } else if (head == "mode") {
            need(2, "mode pure|dm");
            if (t.words[1] == "pure")
                spec.mode = CircuitMode::pure;
            else if (t.words[1] == "dm")
                spec.mode = CircuitMode::dm;
            else
                throw ParseError(arg_at(1).line, arg_at(1).col,
                                 "unknown mode '" + t.words[1] + "'");
        } else if (head == "gate") {
            if (t.words.size() < 2)
                throw ParseError(at.line, at.col, "expected: gate <name> ...");
            if (seen_trace_out)
                throw ParseError(at.line, at.col, "operations after trace_out");
            const std::string& g = t.words[1];
            if (g == "cnot") {
                need(4, "gate cnot <control> <target>");
                GateOp op{GateKind::cnot};
                op.q0 = parse_int(t.words[2], arg_at(2), "control");
                op.q1 = parse_int(t.words[3], arg_at(3), "target");
                check_qubit(op.q0, arg_at(2));
                check_qubit(op.q1, arg_at(3));
                if (op.q0 == op.q1)
                    throw ParseError(arg_at(3).line, arg_at(3).col,
                                     "cnot control equals target");
                spec.ops.emplace_back(op);
            } else if (g == "u1" || g == "u2" || g == "h") {
                if (t.words.size() != 3 && t.words.size() != 4)
                    throw ParseError(at.line, at.col,
                                     "expected: gate " + g + " <q> [pow=<m>]");
                GateOp op{g == "u1" ? GateKind::u1
                                    : (g == "u2" ? GateKind::u2 : GateKind::h)};
                op.q0 = parse_int(t.words[2], arg_at(2), "qubit");
                check_qubit(op.q0, arg_at(2));
                if (t.words.size() == 4) {
                    if (g == "h")
                        throw ParseError(arg_at(3).line, arg_at(3).col,
                                         "h takes no power");
                    std::string v = keyed_value(t.words[3], "pow", arg_at(3));
                    op.pow = parse_int(v, arg_at(3), "power");
                }
                if (g == "u1") op.pow = ((op.pow % 8) + 8) % 8;
                if (g == "u2") op.pow = ((op.pow % 4) + 4) % 4;
                spec.ops.emplace_back(op);
            } else {
                throw ParseError(arg_at(1).line, arg_at(1).col, "unknown gate '" + g + "'");
            }
        } else if (head == "channel") {
            if (t.words.size() < 2)
                throw ParseError(at.line, at.col, "expected: channel <name> ...");
            if (seen_trace_out)
                throw ParseError(at.line, at.col, "operations after trace_out");
            if (spec.mode != CircuitMode::dm)
                throw ParseError(at.line, at.col, "channel in pure mode");
            const std::string& c = t.words[1];
            ChannelOp op{};
            if (c == "depol") {
                need(4, "channel depol <q> p=<float>");
                op.kind = ChannelKind::depolarizing;
                op.q = parse_int(t.words[2], arg_at(2), "qubit");
                check_qubit(op.q, arg_at(2));
                std::string v = keyed_value(t.words[3], "p", arg_at(3));
                op.p = parse_double(v, arg_at(3), "probability");
                if (op.p < 0.0 || op.p > 1.0)
                    throw ParseError(arg_at(3).line, arg_at(3).col, "p out of range");
                op.kraus = depolarizing_kraus(op.p);
            } else if (c == "erase") {
                need(3, "channel erase <q>");
                op.kind = ChannelKind::erasure;
                op.q = parse_int(t.words[2], arg_at(2), "qubit");
                check_qubit(op.q, arg_at(2));
                op.kraus = erasure_kraus();
            } else if (c == "kraus") {
                need(4, "channel kraus <q> file=<path>");
                op.kind = ChannelKind::kraus;
                op.q = parse_int(t.words[2], arg_at(2), "qubit");
                check_qubit(op.q, arg_at(2));
                op.source_path = keyed_value(t.words[3], "file", arg_at(3));
                op.kraus = load_kraus_file(op.source_path, arg_at(3));
                double err = kraus_normalization_error(op.kraus);
                if (err > 1e-10)
                    throw ParseError(arg_at(3).line, arg_at(3).col,
                                     "Kraus normalization violated");
            } else {
                throw ParseError(arg_at(1).line, arg_at(1).col,
                                 "unknown channel '" + c + "'");
            }
            spec.ops.emplace_back(op);
        } else if (head == "trace_out") {
            need(2, "trace_out <q>");
            if (spec.mode != CircuitMode::dm)
                throw ParseError(at.line, at.col, "trace_out requires dm mode");
            TraceOutOp op{};
            op.q = parse_int(t.words[1], arg_at(1), "qubit");
            check_qubit(op.q, arg_at(1));
            spec.ops.emplace_back(op);
            seen_trace_out = true;
        } else {
            throw ParseError(at.line, at.col, "unknown directive '" + head + "'");
        }
    }
    if (!have_qubits) throw ParseError(1, 1, "missing 'qubits' directive");
    return spec;
}

std::string print_circuit(const CircuitSpec& spec) {
    std::ostringstream out;
    out << "qubits " << spec.n_qubits << "\n";
    out << "mode " << (spec.mode == CircuitMode::pure ? "pure" : "dm") << "\n";
    for (const auto& op : spec.ops) {
        if (const auto* g = std::get_if<GateOp>(&op)) {
            switch (g->kind) {
                case GateKind::cnot:
                    out << "gate cnot " << g->q0 << " " << g->q1 << "\n";
                    break;
                case GateKind::u1:
                    out << "gate u1 " << g->q0;
                    if (g->pow != 1) out << " pow=" << g->pow;
                    out << "\n";
                    break;
                case GateKind::u2:
                    out << "gate u2 " << g->q0;
                    if (g->pow != 1) out << " pow=" << g->pow;
                    out << "\n";
                    break;
                case GateKind::h:
                    out << "gate h " << g->q0 << "\n";
                    break;
            }
        } else if (const auto* c = std::get_if<ChannelOp>(&op)) {
            switch (c->kind) {
                case ChannelKind::depolarizing: {
                    std::ostringstream p;
                    p.precision(17);
                    p << c->p;
                    out << "channel depol " << c->q << " p=" << p.str() << "\n";
                    break;
                }
                case ChannelKind::erasure:
                    out << "channel erase " << c->q << "\n";
                    break;
                case ChannelKind::kraus:
                    out << "channel kraus " << c->q << " file=" << c->source_path << "\n";
                    break;
                case ChannelKind::superop:
                    out << "# channel superop " << c->q << " (API-only)\n";
                    break;
            }
        } else if (const auto* tr = std::get_if<TraceOutOp>(&op)) {
            out << "trace_out " << tr->q << "\n";
        }
    }
    return out.str();
}

std::vector<Diagnostic> validate(const CircuitSpec& spec, int max_qubits) {
    std::vector<Diagnostic> diags;
    auto add = [&](const std::string& msg) { diags.push_back({0, 0, msg}); };

    if (spec.n_qubits < 1) add("qubit count must be positive");
    if (spec.n_qubits > max_qubits)
        add("qubit count exceeds maximum of " + std::to_string(max_qubits));

    bool seen_trace_out = false;
    int idx = -1;
    for (const auto& op : spec.ops) {
        ++idx;
        std::string where = "op " + std::to_string(idx) + ": ";
        auto check_q = [&](int q) {
            if (q < 0 || q >= spec.n_qubits) add(where + "qubit index out of range");
        };
        if (const auto* g = std::get_if<GateOp>(&op)) {
            check_q(g->q0);
            if (g->kind == GateKind::cnot) {
                check_q(g->q1);
                if (g->q0 == g->q1) add(where + "cnot control equals target");
            }
            if (seen_trace_out) add(where + "gate after trace_out");
        } else if (const auto* c = std::get_if<ChannelOp>(&op)) {
            check_q(c->q);
            if (spec.mode != CircuitMode::dm) add(where + "channel in pure mode");
            if (seen_trace_out) add(where + "channel after trace_out");
            if (c->kind == ChannelKind::depolarizing && (c->p < 0.0 || c->p > 1.0))
                add(where + "p out of range");
            if (c->kind == ChannelKind::kraus || c->kind == ChannelKind::erasure ||
                c->kind == ChannelKind::depolarizing) {
                if (c->kraus.empty()) {
                    add(where + "empty Kraus list");
                } else if (kraus_normalization_error(c->kraus) > 1e-10) {
                    add(where + "Kraus normalization violated");
                }
            }
            if (c->kind == ChannelKind::superop &&
                trace_preservation_error(c->op) > 1e-10)
                add(where + "superoperator is not trace preserving");
        } else if (const auto* tr = std::get_if<TraceOutOp>(&op)) {
            check_q(tr->q);
            if (spec.mode != CircuitMode::dm) add(where + "trace_out in pure mode");
            seen_trace_out = true;
        }
    }
    return diags;
}

int count_gates(const CircuitSpec& spec) {
    int n = 0;
    for (const auto& op : spec.ops)
        if (std::holds_alternative<GateOp>(op)) ++n;
    return n;
}

int count_channels(const CircuitSpec& spec) {
    int n = 0;
    for (const auto& op : spec.ops)
        if (std::holds_alternative<ChannelOp>(op)) ++n;
    return n;
}

}  // namespace qwalk
