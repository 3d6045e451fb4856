#include "qwalk/widget.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "json.hpp"

namespace qwalk {

std::vector<std::string> WidgetGraph::validate() const {
    std::vector<std::string> problems;
    std::set<int> ports;
    for (int p : in_ports) {
        if (p < 0 || p >= n_nodes) problems.push_back("in port out of range");
        if (!ports.insert(p).second) problems.push_back("duplicate port node");
    }
    for (int p : out_ports) {
        if (p < 0 || p >= n_nodes) problems.push_back("out port out of range");
        if (!ports.insert(p).second) problems.push_back("duplicate port node");
    }
    for (const auto& e : edges) {
        if (e.a < 0 || e.a >= n_nodes || e.b < 0 || e.b >= n_nodes)
            problems.push_back("edge endpoint out of range");
        if (e.hopping == 0.0) problems.push_back("zero hopping");
        if (e.a == e.b) problems.push_back("self loop");
    }
    for (const auto& blk : ideal_blocks) {
        if (blk.map.rows() != static_cast<Eigen::Index>(blk.out_nodes.size()) ||
            blk.map.cols() != static_cast<Eigen::Index>(blk.in_nodes.size()))
            problems.push_back("ideal block dimension mismatch");
        MatrixXcd gram = blk.map.adjoint() * blk.map;
        if ((gram - MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() >
            1e-9)
            problems.push_back("ideal block is not an isometry");
    }

    // Reachability from the input ports (ideal blocks conduct in -> out).
    if (!in_ports.empty() && n_nodes > 0) {
        std::vector<char> reach(n_nodes, 0);
        std::vector<int> stack(in_ports.begin(), in_ports.end());
        for (int p : in_ports) reach[p] = 1;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (const auto& e : edges) {
                int other = e.a == a ? e.b : (e.b == a ? e.a : -1);
                if (other >= 0 && !reach[other]) {
                    reach[other] = 1;
                    stack.push_back(other);
                }
            }
            for (const auto& blk : ideal_blocks)
                for (int in : blk.in_nodes)
                    if (in == a)
                        for (int out : blk.out_nodes)
                            if (!reach[out]) {
                                reach[out] = 1;
                                stack.push_back(out);
                            }
        }
        for (int p : out_ports)
            if (!reach[p]) problems.push_back("out port unreachable from inputs");
    }
    return problems;
}

double SMatrix::unitarity_error() const {
    MatrixXcd stacked(r.rows() + t.rows(), r.cols());
    stacked << r, t;
    MatrixXcd gram = stacked.adjoint() * stacked;
    return (gram - MatrixXcd::Identity(gram.rows(), gram.cols()))
        .cwiseAbs()
        .maxCoeff();
}

SMatrix solve_smatrix(const WidgetGraph& w, double k) {
    if (!(k > 0.0 && k < M_PI))
        throw std::invalid_argument("momentum must lie in (0, pi)");
    if (std::abs(std::sin(k)) < 1e-9)
        throw SingularSystem("momentum at band edge");

    const int n = w.n_nodes;
    const cplx eik = std::polar(1.0, k);
    const double energy = 2.0 * std::cos(k);
    const cplx source = cplx(0.0, -2.0 * std::sin(k));

    std::vector<Eigen::Triplet<cplx>> trip;
    Eigen::VectorXcd diag = Eigen::VectorXcd::Constant(n, energy);
    for (int p : w.in_ports) diag(p) -= eik;
    for (int p : w.out_ports) diag(p) -= eik;

    for (const auto& blk : w.ideal_blocks) {
        // In nodes absorb like an outgoing lead; out nodes re-emit the mapped
        // amplitudes, entering the row as a source term moved to the left side.
        for (int a : blk.in_nodes) diag(a) -= eik;
        for (size_t i = 0; i < blk.out_nodes.size(); ++i) {
            int b = blk.out_nodes[i];
            diag(b) -= eik;
            for (size_t j = 0; j < blk.in_nodes.size(); ++j)
                trip.emplace_back(b, blk.in_nodes[j], -source * blk.map(i, j));
        }
    }

    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag(i));
    for (const auto& e : w.edges) {
        trip.emplace_back(e.a, e.b, cplx(-e.hopping, 0.0));
        trip.emplace_back(e.b, e.a, cplx(-e.hopping, 0.0));
    }

    Eigen::SparseMatrix<cplx> sys(n, n);
    sys.setFromTriplets(trip.begin(), trip.end());
    sys.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.analyzePattern(sys);
    lu.factorize(sys);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("singular scattering system at k=" + std::to_string(k));

    const int n_in = static_cast<int>(w.in_ports.size());
    const int n_out = static_cast<int>(w.out_ports.size());
    SMatrix s;
    s.k = k;
    s.r.resize(n_in, n_in);
    s.t.resize(n_out, n_in);
    s.internal.resize(n, n_in);
    for (int col = 0; col < n_in; ++col) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
        rhs(w.in_ports[col]) = source;
        Eigen::VectorXcd psi = lu.solve(rhs);
        if (lu.info() != Eigen::Success)
            throw SingularSystem("scattering solve failed at k=" + std::to_string(k));
        s.internal.col(col) = psi;
        for (int i = 0; i < n_in; ++i)
            s.r(i, col) = psi(w.in_ports[i]) - (i == col ? 1.0 : 0.0);
        for (int o = 0; o < n_out; ++o) s.t(o, col) = psi(w.out_ports[o]);
    }
    return s;
}

// Bridge couplings of the two-wire gate core: five rungs, each rung joined
// to one bridge node from both rails. In the symmetric/antisymmetric wire
// basis the antisymmetric mode decouples into a bare chain while the
// symmetric mode sees five resonant stubs; the couplings below put both the
// reflection and its momentum slope to zero at k = pi/4, so the response
// stays flat across a wavepacket's momentum spread. The transmission there
// is exactly e^{i pi/4} * U2 (one path unit plus the gate).
const double kU2BridgeCoupling[5] = {
    0.81385439645170710, 1.3247179572441444, 1.2030291451666875,
    1.3247179572441444, 0.81385439645170710};
const int kU2CorePhaseUnits = 1;

WidgetGraph u2_widget() {
    WidgetGraph w;
    w.name = "u2";
    int top[5], bot[5];
    for (int j = 0; j < 5; ++j) {
        top[j] = w.add_node();
        bot[j] = w.add_node();
    }
    for (int j = 0; j + 1 < 5; ++j) {
        w.add_edge(top[j], top[j + 1]);
        w.add_edge(bot[j], bot[j + 1]);
    }
    for (int j = 0; j < 5; ++j) {
        int bridge = w.add_node();
        w.add_edge(top[j], bridge, kU2BridgeCoupling[j]);
        w.add_edge(bot[j], bridge, kU2BridgeCoupling[j]);
    }
    w.in_ports = {top[0], bot[0]};
    w.out_ports = {top[4], bot[4]};
    return w;
}

WidgetGraph wire_widget(int internal_nodes) {
    WidgetGraph w;
    w.name = "wire" + std::to_string(internal_nodes);
    int prev = w.add_node();
    w.in_ports = {prev};
    for (int i = 0; i < internal_nodes; ++i) {
        int next = w.add_node();
        w.add_edge(prev, next);
        prev = next;
    }
    int out = w.add_node();
    w.add_edge(prev, out);
    w.out_ports = {out};
    return w;
}

WidgetGraph reference_wire() { return wire_widget(1); }

WidgetGraph phase_widget(int m) {
    if (m < 1 || m > 7) throw std::invalid_argument("phase power must be in 1..7");
    WidgetGraph w = wire_widget(1 + m);
    w.name = "phase" + std::to_string(m);
    return w;
}

WidgetGraph crossing_widget(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<char> seen(n, 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("invalid permutation");
        seen[p] = 1;
    }
    WidgetGraph w;
    w.name = "crossing";
    w.in_ports.resize(n);
    w.out_ports.resize(n);
    for (int i = 0; i < n; ++i) w.in_ports[i] = w.add_node();
    for (int i = 0; i < n; ++i) w.out_ports[i] = w.add_node();
    for (int i = 0; i < n; ++i) w.add_edge(w.in_ports[i], w.out_ports[perm[i]]);
    return w;
}

WidgetGraph dlambda_widget(double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("lambda must lie in [0, 1]");
    WidgetGraph w;
    w.name = "dlambda";
    int c = w.add_node();
    int keep = w.add_node();
    int drain = w.add_node();
    w.add_edge(c, keep, lambda);
    w.add_edge(c, drain, std::sqrt(1.0 - lambda * lambda));
    w.in_ports = {c};
    w.out_ports = {keep, drain};
    return w;
}

WidgetGraph ideal_block_widget(const MatrixXcd& map) {
    WidgetGraph w;
    w.name = "ideal";
    WidgetGraph::IdealBlock blk;
    for (int i = 0; i < map.cols(); ++i) {
        int node = w.add_node();
        w.in_ports.push_back(node);
        blk.in_nodes.push_back(node);
    }
    for (int i = 0; i < map.rows(); ++i) {
        int node = w.add_node();
        w.out_ports.push_back(node);
        blk.out_nodes.push_back(node);
    }
    blk.map = map;
    w.ideal_blocks.push_back(blk);
    return w;
}

WidgetReport verify_widget(const WidgetGraph& w, const MatrixXcd& target,
                           double k, double) {
    SMatrix s = solve_smatrix(w, k);
    if (s.t.rows() != target.rows() || s.t.cols() != target.cols())
        throw std::invalid_argument("target dimensions do not match ports");

    // Best-fit global phase: argmin_phi ||t - e^{i phi} target||.
    cplx overlap = (target.conjugate().cwiseProduct(s.t)).sum();
    cplx phase = std::abs(overlap) > 1e-14 ? overlap / std::abs(overlap) : cplx(1.0);

    WidgetReport rep;
    rep.phase_offset = phase;
    rep.max_err = (s.t - phase * target).cwiseAbs().maxCoeff();
    rep.reflection_norm = s.r.size() > 0 ? s.r.cwiseAbs().maxCoeff() : 0.0;
    return rep;
}

std::string WidgetGraph::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["nodes"] = n_nodes;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : edges) arr.push_back({e.a, e.b, e.hopping});
    j["edges"] = arr;
    j["in_ports"] = in_ports;
    j["out_ports"] = out_ports;
    if (!ideal_blocks.empty()) {
        auto blocks = nlohmann::ordered_json::array();
        for (const auto& blk : ideal_blocks) {
            nlohmann::ordered_json b;
            b["in_nodes"] = blk.in_nodes;
            b["out_nodes"] = blk.out_nodes;
            auto rows = nlohmann::ordered_json::array();
            for (int r = 0; r < blk.map.rows(); ++r) {
                auto row = nlohmann::ordered_json::array();
                for (int c = 0; c < blk.map.cols(); ++c)
                    row.push_back({blk.map(r, c).real(), blk.map(r, c).imag()});
                rows.push_back(row);
            }
            b["map"] = rows;
            blocks.push_back(b);
        }
        j["ideal_blocks"] = blocks;
    }
    return j.dump(2);
}

WidgetGraph WidgetGraph::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    WidgetGraph w;
    w.name = j.value("name", "");
    w.n_nodes = j.at("nodes").get<int>();
    for (const auto& e : j.at("edges"))
        w.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    w.in_ports = j.at("in_ports").get<std::vector<int>>();
    w.out_ports = j.at("out_ports").get<std::vector<int>>();
    if (j.contains("ideal_blocks")) {
        for (const auto& b : j["ideal_blocks"]) {
            IdealBlock blk;
            blk.in_nodes = b.at("in_nodes").get<std::vector<int>>();
            blk.out_nodes = b.at("out_nodes").get<std::vector<int>>();
            const auto& rows = b.at("map");
            blk.map.resize(rows.size(), rows[0].size());
            for (size_t r = 0; r < rows.size(); ++r)
                for (size_t c = 0; c < rows[r].size(); ++c)
                    blk.map(r, c) = cplx(rows[r][c][0].get<double>(),
                                         rows[r][c][1].get<double>());
            w.ideal_blocks.push_back(blk);
        }
    }
    return w;
}

std::string WidgetGraph::to_dot() const {
    std::ostringstream out;
    out << "digraph widget {\n  rankdir=LR;\n";
    std::vector<char> is_in(n_nodes, 0), is_out(n_nodes, 0);
    for (int p : in_ports) is_in[p] = 1;
    for (int p : out_ports) is_out[p] = 1;
    for (int i = 0; i < n_nodes; ++i) {
        out << "  n" << i << " [shape=circle";
        if (is_in[i]) out << ", style=filled, fillcolor=lightblue";
        if (is_out[i]) out << ", style=filled, fillcolor=lightgray";
        out << "];\n";
    }
    for (const auto& e : edges) {
        out << "  n" << e.a << " -> n" << e.b << " [dir=none";
        if (e.hopping != 1.0) out << ", label=\"" << e.hopping << "\"";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace qwalk
