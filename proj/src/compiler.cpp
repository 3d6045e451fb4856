#include "qwalk/compiler.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace qwalk {

namespace {

std::string bits(int value, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if (value & (1 << (n - 1 - q))) s[q] = '1';
    return s;
}

// Bit position of qubit q (qubit 0 is the leftmost / most significant).
int bitpos(int q, int n) { return n - 1 - q; }

int insert_bit(int rest, int pos, int bit) {
    int low = rest & ((1 << pos) - 1);
    int high = rest >> pos;
    return (high << (pos + 1)) | (bit << pos) | low;
}

int cnot_apply(int basis, int control_pos, int target_pos) {
    if (basis & (1 << control_pos)) basis ^= (1 << target_pos);
    return basis;
}

class GraphBuilder {
  public:
    GraphBuilder(const CircuitSpec& spec, const CompileOptions& opts)
        : spec_(spec), opts_(opts) {
        out_.mode = spec.mode;
        out_.n_qubits = spec.n_qubits;
        out_.circuit_name = spec.name;
        dim_ = 1 << spec.n_qubits;
        const int n_wires =
            spec.mode == CircuitMode::pure ? dim_ : dim_ * dim_;
        out_.wires.resize(n_wires);
        frontier_.resize(n_wires);
        for (int w = 0; w < n_wires; ++w) {
            TerminalWire& wire = out_.wires[w];
            if (spec.mode == CircuitMode::pure) {
                wire.ket = w;
                wire.bra = 0;
            } else {
                wire.ket = w / dim_;
                wire.bra = w % dim_;
            }
            wire.label = wire_label(wire.ket, wire.bra, spec.n_qubits, spec.mode);
            frontier_[w] = out_.graph.add_node();
            out_.graph.in_ports.push_back(frontier_[w]);
        }
        out_.start_wire = 0;  // |0..0> or |0..0><0..0|
        out_.start_port = 0;
    }

    ScatterGraph build() {
        int op_index = -1;
        for (const auto& op : spec_.ops) {
            ++op_index;
            if (const auto* g = std::get_if<GateOp>(&op)) {
                apply_gate(*g);
            } else if (const auto* c = std::get_if<ChannelOp>(&op)) {
                apply_channel(*c, op_index);
            } else if (const auto* t = std::get_if<TraceOutOp>(&op)) {
                apply_trace_out(*t);
            }
            if (out_.graph.n_nodes > opts_.max_nodes)
                throw GraphTooLarge("graph exceeds node limit");
        }
        finalize();
        return std::move(out_);
    }

  private:
    int wire_of(int ket, int bra) const {
        return spec_.mode == CircuitMode::pure ? ket : ket * dim_ + bra;
    }

    void pad(int w, int units) {
        units = ((units % 8) + 8) % 8;
        for (int i = 0; i < units; ++i) {
            int node = out_.graph.add_node();
            out_.graph.add_edge(frontier_[w], node);
            frontier_[w] = node;
        }
        out_.wires[w].length += units;
        out_.wires[w].residual = (out_.wires[w].residual + units) % 8;
    }

    void equalize(const std::vector<int>& fiber) {
        int target = 0;
        for (int w : fiber) target = std::max(target, out_.wires[w].residual);
        for (int w : fiber) pad(w, target - out_.wires[w].residual);
    }

    // m nodes carrying an intended phase e^{i m pi/4} (a u1-power widget).
    void phase_nodes(int w, int m) {
        m = ((m % 8) + 8) % 8;
        for (int i = 0; i < m; ++i) {
            int node = out_.graph.add_node();
            out_.graph.add_edge(frontier_[w], node);
            frontier_[w] = node;
        }
        out_.wires[w].length += m;
        out_.wires[w].intended_phase += m;
    }

    // Two-wire gate core (the u2_widget ladder); transmits
    // e^{i pi/4} * U2 on (w0, w1), one path unit.
    void pair_core(int w0, int w1) {
        int top = frontier_[w0];
        int bot = frontier_[w1];
        for (int j = 0; j < 5; ++j) {
            if (j > 0) {
                int next_top = out_.graph.add_node();
                int next_bot = out_.graph.add_node();
                out_.graph.add_edge(top, next_top);
                out_.graph.add_edge(bot, next_bot);
                top = next_top;
                bot = next_bot;
            }
            int bridge = out_.graph.add_node();
            out_.graph.add_edge(top, bridge, kU2BridgeCoupling[j]);
            out_.graph.add_edge(bot, bridge, kU2BridgeCoupling[j]);
        }
        frontier_[w0] = top;
        frontier_[w1] = bot;
        for (int w : {w0, w1}) {
            out_.wires[w].length += kU2CorePhaseUnits;
            out_.wires[w].residual =
                (out_.wires[w].residual + kU2CorePhaseUnits) % 8;
        }
    }

    void relabel(const std::vector<int>& fiber, const std::vector<int>& perm) {
        std::vector<int> new_frontier(fiber.size());
        std::vector<TerminalWire> snapshot(fiber.size());
        for (size_t i = 0; i < fiber.size(); ++i) {
            new_frontier[i] = frontier_[fiber[i]];
            snapshot[i] = out_.wires[fiber[i]];
        }
        for (size_t i = 0; i < fiber.size(); ++i) {
            int dst = fiber[perm[i]];
            frontier_[dst] = new_frontier[i];
            TerminalWire& wire = out_.wires[dst];
            TerminalWire moved = snapshot[i];
            moved.ket = wire.ket;
            moved.bra = wire.bra;
            moved.label = wire.label;
            wire = moved;
        }
    }

    void apply_sequence(const GateSequence& seq, const std::vector<int>& fiber) {
        equalize(fiber);
        for (const auto& it : seq.items) {
            switch (it.kind) {
                case SeqItem::Kind::u1pow:
                    phase_nodes(fiber[it.w0], it.pow);
                    break;
                case SeqItem::Kind::u2pow:
                    for (int i = 0; i < it.pow; ++i)
                        pair_core(fiber[it.w0], fiber[it.w1]);
                    break;
                case SeqItem::Kind::crossing:
                    relabel(fiber, it.perm);
                    break;
            }
        }
        for (int w : fiber) pad(w, seq.pad_units);
        // The sequence's recorded global phase is uniform over the fiber and
        // joins the residual length bookkeeping.
        for (int w : fiber) {
            out_.wires[w].residual =
                (out_.wires[w].residual + seq.global_phase_eighths) % 8;
        }
    }

    void apply_ideal_block(const Matrix4cd& map, const std::vector<int>& fiber) {
        equalize(fiber);
        WidgetGraph::IdealBlock blk;
        blk.map = map;
        for (int w : fiber) blk.in_nodes.push_back(frontier_[w]);
        for (int w : fiber) {
            int node = out_.graph.add_node();
            blk.out_nodes.push_back(node);
            frontier_[w] = node;
        }
        out_.graph.ideal_blocks.push_back(std::move(blk));
        out_.abstract_blocks = true;
    }

    std::vector<std::vector<int>> ket_pair_fibers(int q) const {
        std::vector<std::vector<int>> fibers;
        const int pos = bitpos(q, spec_.n_qubits);
        const int n_rest = dim_ / 2;
        const int n_bra = spec_.mode == CircuitMode::pure ? 1 : dim_;
        for (int rest = 0; rest < n_rest; ++rest) {
            int i0 = insert_bit(rest, pos, 0);
            int i1 = insert_bit(rest, pos, 1);
            for (int j = 0; j < n_bra; ++j)
                fibers.push_back({wire_of(i0, j), wire_of(i1, j)});
        }
        return fibers;
    }

    std::vector<std::vector<int>> bra_pair_fibers(int q) const {
        std::vector<std::vector<int>> fibers;
        const int pos = bitpos(q, spec_.n_qubits);
        const int n_rest = dim_ / 2;
        for (int i = 0; i < dim_; ++i) {
            for (int rest = 0; rest < n_rest; ++rest) {
                int j0 = insert_bit(rest, pos, 0);
                int j1 = insert_bit(rest, pos, 1);
                fibers.push_back({wire_of(i, j0), wire_of(i, j1)});
            }
        }
        return fibers;
    }

    // Local order (rho00, rho11, rho01, rho10) over (ket bit, bra bit) of q.
    std::vector<std::vector<int>> quartet_fibers(int q) const {
        std::vector<std::vector<int>> fibers;
        const int pos = bitpos(q, spec_.n_qubits);
        const int n_rest = dim_ / 2;
        for (int irest = 0; irest < n_rest; ++irest) {
            int i0 = insert_bit(irest, pos, 0);
            int i1 = insert_bit(irest, pos, 1);
            for (int jrest = 0; jrest < n_rest; ++jrest) {
                int j0 = insert_bit(jrest, pos, 0);
                int j1 = insert_bit(jrest, pos, 1);
                fibers.push_back({wire_of(i0, j0), wire_of(i1, j1),
                                  wire_of(i0, j1), wire_of(i1, j0)});
            }
        }
        return fibers;
    }

    void apply_gate(const GateOp& g) {
        if (g.kind == GateKind::cnot) {
            apply_cnot(g.q0, g.q1);
            return;
        }
        Matrix2cd m = gate_matrix_1q(g);
        if ((m - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14) return;
        GateSequence ket = synthesize_unitary(m);
        for (const auto& fiber : ket_pair_fibers(g.q0)) apply_sequence(ket, fiber);
        if (spec_.mode == CircuitMode::dm) {
            GateSequence bra = conjugate_sequence(ket);
            for (const auto& fiber : bra_pair_fibers(g.q0))
                apply_sequence(bra, fiber);
        }
    }

    void apply_cnot(int control, int target) {
        const int cpos = bitpos(control, spec_.n_qubits);
        const int tpos = bitpos(target, spec_.n_qubits);
        // Wire permutations compile to relabelings: no nodes added.
        std::vector<int> all(out_.wires.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        std::vector<int> perm(all.size());
        for (size_t w = 0; w < all.size(); ++w) {
            int ket = out_.wires[w].ket, bra = out_.wires[w].bra;
            int ket2 = cnot_apply(ket, cpos, tpos);
            int bra2 = spec_.mode == CircuitMode::dm ? cnot_apply(bra, cpos, tpos)
                                                     : bra;
            perm[w] = wire_of(ket2, bra2);
        }
        relabel(all, perm);
    }

    void apply_channel(const ChannelOp& ch, int op_index) {
        ChannelPlan plan = plan_channel(ch, opts_.ideal_blocks);
        for (const auto& fiber : quartet_fibers(ch.q)) {
            if (plan.synthesized)
                apply_sequence(plan.pre_unitary, fiber);
            else
                apply_ideal_block(plan.pre_matrix, fiber);

            for (int local = 0; local < 4; ++local) {
                double lambda = plan.lambdas[local];
                if (lambda > 1.0 - 1e-12) continue;  // no damping widget
                int w = fiber[local];
                int keep = out_.graph.add_node();
                int drain = out_.graph.add_node();
                out_.graph.add_edge(frontier_[w], keep, lambda);
                out_.graph.add_edge(frontier_[w], drain,
                                    std::sqrt(std::max(0.0, 1.0 - lambda * lambda)));
                frontier_[w] = keep;
                out_.wires[w].length += 1;
                out_.wires[w].residual = (out_.wires[w].residual + 1) % 8;
                drain_nodes_.push_back(drain);
                out_.drains.push_back({-1, op_index, out_.wires[w].label});
            }
            equalize(fiber);

            if (plan.synthesized)
                apply_sequence(plan.post_unitary, fiber);
            else
                apply_ideal_block(plan.post_matrix, fiber);
        }
        if (plan.rescale > 1.0 + 1e-12) out_.rescale_log.push_back(plan.rescale);
    }

    void apply_trace_out(const TraceOutOp& t) {
        GateSequence hpair = synthesize_unitary(Matrix2cd(hadamard_matrix()));
        for (const auto& fiber : quartet_fibers(t.q)) {
            apply_sequence(hpair, {fiber[0], fiber[1]});
            equalize(fiber);
            for (int local = 1; local < 4; ++local)
                out_.wires[fiber[local]].kept = false;
        }
        ++out_.traced_qubits;
        out_.traced_list.push_back(t.q);
    }

    void finalize() {
        std::vector<int> all(out_.wires.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        equalize(all);
        out_.nominal_length = out_.wires.empty() ? 0 : out_.wires[0].residual;
        for (size_t w = 0; w < out_.wires.size(); ++w) {
            out_.wires[w].out_port = static_cast<int>(out_.graph.out_ports.size());
            out_.graph.out_ports.push_back(frontier_[w]);
        }
        for (size_t d = 0; d < drain_nodes_.size(); ++d) {
            out_.drains[d].out_port = static_cast<int>(out_.graph.out_ports.size());
            out_.graph.out_ports.push_back(drain_nodes_[d]);
        }
    }

    const CircuitSpec& spec_;
    const CompileOptions& opts_;
    ScatterGraph out_;
    std::vector<int> frontier_;
    std::vector<int> drain_nodes_;
    int dim_ = 2;
};

}  // namespace

int dm_wire_index(int ket, int bra, int n_qubits) {
    return ket * (1 << n_qubits) + bra;
}

std::string wire_label(int ket, int bra, int n_qubits, CircuitMode mode) {
    if (mode == CircuitMode::pure) return bits(ket, n_qubits);
    return bits(ket, n_qubits) + "|" + bits(bra, n_qubits);
}

ScatterGraph compile(const CircuitSpec& spec, const CompileOptions& opts) {
    auto diags = validate(spec, opts.max_qubits);
    if (!diags.empty())
        throw std::invalid_argument("invalid circuit: " + diags.front().message);
    GraphBuilder builder(spec, opts);
    return builder.build();
}

ResourceReport resource_report_from_counts(int n, int T, int fT) {
    ResourceReport r;
    r.n = n;
    r.T = T;
    r.fT = fT;
    r.f = T > 0 ? static_cast<double>(fT) / T : 0.0;
    const double w_open = std::pow(2.0, 2 * n);
    const double w_purif = std::pow(2.0, n + fT);
    r.wires_formula_open = w_open * (1.0 + fT);
    r.nodes_formula_open = w_open * T * (1.0 + r.f);
    r.wires_formula_purif = w_purif;
    r.nodes_formula_purif = w_purif * T * (1.0 + r.f);
    r.survival_lower_bound = std::pow(0.25, std::min(fT, n));
    r.ft_greater_than_n = fT > n;
    return r;
}

ResourceReport resource_report(const CircuitSpec& spec, const ScatterGraph* graph) {
    ResourceReport r = resource_report_from_counts(
        spec.n_qubits, count_gates(spec), count_channels(spec));
    if (graph) {
        r.wires_actual =
            graph->wire_count() + static_cast<long long>(graph->drains.size());
        r.nodes_actual = graph->graph.n_nodes;
    }
    return r;
}

std::string export_dot(const ScatterGraph& sg) {
    std::ostringstream out;
    out << "digraph scatter {\n  rankdir=LR;\n  node [shape=point];\n";
    std::vector<std::string> port_label(sg.graph.n_nodes);
    for (const auto& w : sg.wires)
        port_label[sg.graph.out_ports[w.out_port]] =
            w.label + (w.kept ? "" : " (discarded)");
    for (const auto& d : sg.drains)
        port_label[sg.graph.out_ports[d.out_port]] =
            "drain op" + std::to_string(d.op_index);

    for (int i = 0; i < sg.graph.n_nodes; ++i) {
        out << "  n" << i;
        if (!port_label[i].empty()) {
            bool is_drain = port_label[i].rfind("drain", 0) == 0;
            out << " [shape=circle, label=\"" << port_label[i] << "\"";
            if (is_drain) out << ", style=dashed, color=red";
            out << "]";
        }
        out << ";\n";
    }
    for (const auto& e : sg.graph.edges) {
        out << "  n" << e.a << " -> n" << e.b << " [dir=none";
        if (e.hopping != 1.0) out << ", label=\"" << e.hopping << "\"";
        out << "];\n";
    }
    for (size_t b = 0; b < sg.graph.ideal_blocks.size(); ++b) {
        const auto& blk = sg.graph.ideal_blocks[b];
        for (size_t i = 0; i < blk.in_nodes.size(); ++i)
            for (size_t j = 0; j < blk.out_nodes.size(); ++j)
                out << "  n" << blk.in_nodes[i] << " -> n" << blk.out_nodes[j]
                    << " [style=dotted, label=\"B" << b << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string scatter_graph_to_json(const ScatterGraph& sg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(sg.graph.to_json());
    j["mode"] = sg.mode == CircuitMode::pure ? "pure" : "dm";
    j["n_qubits"] = sg.n_qubits;
    auto wires = nlohmann::ordered_json::array();
    for (const auto& w : sg.wires) {
        nlohmann::ordered_json wj;
        wj["label"] = w.label;
        wj["kept"] = w.kept;
        wj["out_port"] = w.out_port;
        wj["length"] = w.length;
        wj["intended_phase"] = w.intended_phase;
        wires.push_back(wj);
    }
    j["wire_map"] = wires;
    j["start_port"] = sg.start_port;
    j["rescale_log"] = sg.rescale_log;
    j["nominal_length"] = sg.nominal_length;
    auto drains = nlohmann::ordered_json::array();
    for (const auto& d : sg.drains)
        drains.push_back({{"out_port", d.out_port},
                          {"op_index", d.op_index},
                          {"from_wire", d.from_wire}});
    j["drains"] = drains;
    return j.dump(2);
}

}  // namespace qwalk
