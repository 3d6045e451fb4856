#include "qwalk/scattering.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace qwalk {

namespace {

cplx diagonal_sum(const std::vector<cplx>& amps, const std::vector<bool>& diagonal) {
    cplx s = 0.0;
    for (size_t i = 0; i < amps.size(); ++i)
        if (diagonal[i]) s += amps[i];
    return s;
}

// Rotate amplitudes so the diagonal-wire sum (or the largest amplitude,
// when there are no diagonal wires) is real positive. Returns the phase
// divided out.
cplx normalize_phase(std::vector<cplx>& amps, const std::vector<bool>& diagonal) {
    cplx anchor = diagonal_sum(amps, diagonal);
    if (std::abs(anchor) < 1e-12) {
        size_t top = 0;
        for (size_t i = 1; i < amps.size(); ++i)
            if (std::abs(amps[i]) > std::abs(amps[top])) top = i;
        anchor = amps.empty() ? cplx(1.0) : amps[top];
    }
    if (std::abs(anchor) < 1e-14) return 1.0;
    cplx phase = anchor / std::abs(anchor);
    for (auto& a : amps) a /= phase;
    return phase;
}

}  // namespace

WireAmplitudes solve_frequency(const ScatterGraph& sg, double k) {
    Eigen::VectorXcd psi;
    {
        // One source column only; solve_smatrix would factor once but solve
        // every input port, so do the single-column solve here.
        const WidgetGraph& w = sg.graph;
        if (!(k > 0.0 && k < M_PI))
            throw std::invalid_argument("momentum must lie in (0, pi)");
        const int n = w.n_nodes;
        const cplx eik = std::polar(1.0, k);
        const double energy = 2.0 * std::cos(k);
        const cplx source = cplx(0.0, -2.0 * std::sin(k));

        std::vector<Eigen::Triplet<cplx>> trip;
        Eigen::VectorXcd diag = Eigen::VectorXcd::Constant(n, energy);
        for (int p : w.in_ports) diag(p) -= eik;
        for (int p : w.out_ports) diag(p) -= eik;
        for (const auto& blk : w.ideal_blocks) {
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
        lu.compute(sys);
        if (lu.info() != Eigen::Success)
            throw SingularSystem("singular scattering system at k=" +
                                 std::to_string(k));
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
        rhs(w.in_ports[sg.start_port]) = source;
        psi = lu.solve(rhs);
        if (lu.info() != Eigen::Success)
            throw SingularSystem("scattering solve failed");
    }

    WireAmplitudes out;
    out.k = k;
    out.rescale_applied = 1.0;
    for (double f : sg.rescale_log) out.rescale_applied *= f;

    const cplx length_phase =
        std::polar(1.0, k * static_cast<double>(sg.nominal_length));
    out.amps.reserve(sg.wires.size());
    for (const auto& wire : sg.wires) {
        cplx amp = psi(sg.graph.out_ports[wire.out_port]);
        out.amps.push_back(amp / length_phase * out.rescale_applied);
        out.labels.push_back(wire.label);
        out.kept.push_back(wire.kept);
        out.diagonal.push_back(sg.mode == CircuitMode::dm ? wire.ket == wire.bra
                                                          : false);
    }
    for (const auto& d : sg.drains)
        out.drain_total += std::norm(psi(sg.graph.out_ports[d.out_port]));

    out.start_reflection =
        std::abs(psi(sg.graph.in_ports[sg.start_port]) - 1.0);
    for (size_t p = 0; p < sg.graph.in_ports.size(); ++p) {
        if (static_cast<int>(p) == sg.start_port) continue;
        out.stray_reflection =
            std::max(out.stray_reflection, std::abs(psi(sg.graph.in_ports[p])));
    }

    cplx rotation = normalize_phase(out.amps, out.diagonal);
    out.global_phase = length_phase * rotation;
    return out;
}

double purity_from_wires(const WireAmplitudes& w) {
    double p = 0.0;
    for (size_t i = 0; i < w.amps.size(); ++i)
        if (w.kept[i]) p += std::norm(w.amps[i]);
    return p;
}

double subsystem_purity(const WireAmplitudes& w, const ScatterGraph& graph) {
    if (graph.traced_qubits <= 0)
        throw std::invalid_argument("graph has no trace_out stage");
    if (w.amps.size() != graph.wires.size())
        throw std::invalid_argument("kept set inconsistent with wire map");
    for (size_t i = 0; i < w.amps.size(); ++i)
        if (w.kept[i] != graph.wires[i].kept)
            throw std::invalid_argument("kept set inconsistent with wire map");
    // Each traced qubit leaves the kept amplitudes a factor 1/sqrt(2) short.
    double density = 0.0;
    for (size_t i = 0; i < w.amps.size(); ++i)
        if (w.kept[i]) density += std::norm(w.amps[i]);
    return std::pow(2.0, graph.traced_qubits) * density;
}

double survival_probability(const WireAmplitudes& w) {
    return 1.0 - w.drain_total;
}

// --- time domain ----------------------------------------------------------

namespace {

// Integer-order Bessel J via downward (Miller) recurrence; robust for the
// moderate arguments used by the chunked propagator.
std::vector<double> bessel_j_upto(int m_max, double x) {
    std::vector<double> j(m_max + 1, 0.0);
    if (std::abs(x) < 1e-300) {
        j[0] = 1.0;
        return j;
    }
    int start = m_max + 20 + static_cast<int>(std::ceil(std::sqrt(40.0 * m_max + x * x)));
    double jp = 0.0, jc = 1e-300;
    double norm = 0.0;
    std::vector<double> tmp(m_max + 1, 0.0);
    for (int m = start; m >= 1; --m) {
        double jm = (2.0 * m / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
            jc *= 1e-250;
            jp *= 1e-250;
            for (auto& v : tmp) v *= 1e-250;
            norm *= 1e-250;
        }
        if (m - 1 <= m_max) tmp[m - 1] = jc;
        if (((m - 1) & 1) == 0) norm += (m == 1 ? 1.0 : 2.0) * jc;
    }
    // sum_{even m} (2 - delta_m0) J_m = 1
    for (int m = 0; m <= m_max; ++m) j[m] = tmp[m] / norm;
    return j;
}

struct FiniteGraph {
    Eigen::SparseMatrix<double> hamiltonian;  // -adjacency
    int n = 0;
    std::vector<int> input_sites;                  // x = -lead_len .. 0 (port)
    std::vector<std::vector<int>> output_sites;    // per out port, y = 0 .. L
    double spectral_bound = 4.0;
};

FiniteGraph build_finite(const WidgetGraph& w, int input_port, int lead_len) {
    if (!w.ideal_blocks.empty())
        throw std::invalid_argument("time propagation does not support ideal blocks");
    FiniteGraph fg;
    std::vector<Eigen::Triplet<double>> trip;
    int next = w.n_nodes;
    auto chain = [&](int from, int len, std::vector<int>& sites) {
        sites.push_back(from);
        int prev = from;
        for (int i = 0; i < len; ++i) {
            int node = next++;
            trip.emplace_back(prev, node, -1.0);
            trip.emplace_back(node, prev, -1.0);
            sites.push_back(node);
            prev = node;
        }
    };
    for (const auto& e : w.edges) {
        trip.emplace_back(e.a, e.b, -e.hopping);
        trip.emplace_back(e.b, e.a, -e.hopping);
    }
    std::vector<int> in_sites_rev;
    chain(w.in_ports[input_port], lead_len, in_sites_rev);
    // store input sites ordered x = -lead_len..0
    fg.input_sites.assign(in_sites_rev.rbegin(), in_sites_rev.rend());
    for (size_t p = 0; p < w.in_ports.size(); ++p) {
        if (static_cast<int>(p) == input_port) continue;
        std::vector<int> stub;
        chain(w.in_ports[p], lead_len, stub);
    }
    fg.output_sites.resize(w.out_ports.size());
    for (size_t p = 0; p < w.out_ports.size(); ++p)
        chain(w.out_ports[p], lead_len, fg.output_sites[p]);
    fg.n = next;
    fg.hamiltonian.resize(fg.n, fg.n);
    fg.hamiltonian.setFromTriplets(trip.begin(), trip.end());

    double bound = 0.0;
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(fg.n);
    for (int col = 0; col < fg.hamiltonian.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(fg.hamiltonian, col); it;
             ++it)
            rowsum(it.row()) += std::abs(it.value());
    bound = rowsum.maxCoeff();
    fg.spectral_bound = std::max(1.0, bound) * 1.01;
    return fg;
}

// One Chebyshev step of exp(-iHt) with H scaled by the spectral bound.
void chebyshev_step(const Eigen::SparseMatrix<double>& h, double bound,
                    double dt, Eigen::VectorXcd& psi) {
    const double tau = bound * dt;
    int m_max = static_cast<int>(std::ceil(1.2 * tau)) + 24;
    std::vector<double> jm = bessel_j_upto(m_max, tau);

    Eigen::VectorXcd phi_prev = psi;                       // T_0
    Eigen::VectorXcd phi = (h * psi) / bound;              // T_1
    Eigen::VectorXcd acc = jm[0] * phi_prev;
    cplx coeff(0.0, -1.0);  // (-i)^m
    acc += 2.0 * jm[1] * coeff * phi;
    for (int m = 2; m <= m_max; ++m) {
        Eigen::VectorXcd phi_next = 2.0 * (h * phi) / bound - phi_prev;
        phi_prev.swap(phi);
        phi.swap(phi_next);
        coeff *= cplx(0.0, -1.0);
        acc += 2.0 * jm[m] * coeff * phi;
    }
    psi.swap(acc);
}

Eigen::VectorXcd gaussian_packet(const FiniteGraph& fg, double k, double sigma,
                                 double x0) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(fg.n);
    const int len = static_cast<int>(fg.input_sites.size());
    for (int idx = 0; idx < len; ++idx) {
        double x = static_cast<double>(idx - (len - 1));  // port at x = 0
        double envelope = std::exp(-(x - x0) * (x - x0) / (4.0 * sigma * sigma));
        psi(fg.input_sites[idx]) = envelope * std::polar(1.0, k * x);
    }
    psi /= psi.norm();
    return psi;
}

}  // namespace

TimeResult propagate_wavepacket(const WidgetGraph& w, int input_port,
                                const TimeParams& params) {
    if (params.sigma < 4.0) throw std::invalid_argument("sigma must be >= 4");
    if (params.lead_len < 8.0 * params.sigma)
        throw std::invalid_argument("lead_len must be >= 8 sigma");

    FiniteGraph fg = build_finite(w, input_port, params.lead_len);

    // Free reference chains matched to the group delay of each output port,
    // so the envelopes line up site by site on the output leads. Ports with
    // negligible transmission inherit the dominant port's delay.
    const int n_out = static_cast<int>(w.out_ports.size());
    std::vector<int> port_delay(n_out, std::max(1, params.ref_length));
    int lead_delay = std::max(1, params.ref_length);
    if (params.ref_length <= 0) {
        const double h = 1e-4;
        SMatrix sp = solve_smatrix(w, params.k + h);
        SMatrix sm = solve_smatrix(w, params.k - h);
        int best_o = 0;
        double best = 0.0;
        for (int o = 0; o < n_out; ++o)
            if (std::abs(sp.t(o, input_port)) > best) {
                best = std::abs(sp.t(o, input_port));
                best_o = o;
            }
        auto delay_of = [&](int o) {
            double d = std::arg(sp.t(o, input_port) / sm.t(o, input_port)) /
                       (2.0 * h);
            return std::max(
                1, std::min(params.lead_len / 2,
                            static_cast<int>(std::lround(d))));
        };
        lead_delay = delay_of(best_o);
        for (int o = 0; o < n_out; ++o)
            port_delay[o] = std::abs(sp.t(o, input_port)) > 1e-6 * best
                                ? delay_of(o)
                                : lead_delay;
    }
    std::map<int, FiniteGraph> refs;
    for (int d : port_delay)
        if (!refs.count(d))
            refs.emplace(d, build_finite(wire_widget(d - 1), 0, params.lead_len));
    const int ref_edges = lead_delay;

    // Center the packet mid-lead (both truncation tails equally deep) and
    // land it as far past the ports as the output leads allow, so only
    // genuinely reflected weight remains on the input lead. The group delay
    // through the graph adds to the distance.
    const double x0 = -0.5 * params.lead_len;
    const double v_g = 2.0 * std::sin(params.k);
    const double landing =
        std::min(6.0 * params.sigma, params.lead_len - 4.0 * params.sigma);
    const double travel = (std::abs(x0) + ref_edges + landing) / v_g;
    const double t_max = params.t_max > 0 ? params.t_max : 3.0 * travel;

    Eigen::VectorXcd psi = gaussian_packet(fg, params.k, params.sigma, x0);
    std::map<int, Eigen::VectorXcd> psi_refs;
    for (const auto& [d, ref] : refs)
        psi_refs.emplace(d, gaussian_packet(ref, params.k, params.sigma, x0));

    TimeResult result;
    TimeTrace& trace = result.trace;
    double t = 0.0;
    trace.times.push_back(0.0);
    trace.norms.push_back(psi.squaredNorm());
    while (t < travel) {
        double dt = std::min(params.chunk, travel - t);
        chebyshev_step(fg.hamiltonian, fg.spectral_bound, dt, psi);
        for (auto& [d, psi_ref] : psi_refs)
            chebyshev_step(refs.at(d).hamiltonian, refs.at(d).spectral_bound, dt,
                           psi_ref);
        t += dt;
        trace.times.push_back(t);
        double norm = psi.squaredNorm();
        trace.norms.push_back(norm);
        trace.norm_drift = std::max(trace.norm_drift, std::abs(norm - 1.0));
        if (t >= t_max) break;
    }

    double out_norm = 0.0;
    for (const auto& sites : fg.output_sites)
        for (int sidx : sites) out_norm += std::norm(psi(sidx));
    trace.exit_norm = out_norm;
    trace.completed = out_norm >= 0.99;
    if (!trace.completed)
        trace.status = "t_max reached before 99% of the norm exited";

    for (int sidx : fg.input_sites) trace.backscatter += std::norm(psi(sidx));

    // Overlap against the freely transmitted packet; a reference chain of d
    // edges has transmission e^{ik d}.
    result.transmission.resize(fg.output_sites.size());
    for (size_t p = 0; p < fg.output_sites.size(); ++p) {
        const int d = port_delay[p];
        const FiniteGraph& ref = refs.at(d);
        const Eigen::VectorXcd& psi_ref = psi_refs.at(d);
        const auto& ref_sites = ref.output_sites[0];
        double ref_norm = 0.0;
        for (int sidx : ref_sites) ref_norm += std::norm(psi_ref(sidx));
        cplx overlap = 0.0;
        const auto& sites = fg.output_sites[p];
        for (size_t i = 0; i < sites.size() && i < ref_sites.size(); ++i)
            overlap += std::conj(psi_ref(ref_sites[i])) * psi(sites[i]);
        result.transmission[p] =
            overlap / ref_norm * std::polar(1.0, params.k * d);
    }
    return result;
}

GraphTimeResult propagate_wavepacket(const ScatterGraph& sg,
                                     const TimeParams& params) {
    TimeResult tr = propagate_wavepacket(sg.graph, sg.start_port, params);

    GraphTimeResult out;
    out.trace = tr.trace;
    WireAmplitudes& amps = out.amps;
    amps.k = params.k;
    amps.rescale_applied = 1.0;
    for (double f : sg.rescale_log) amps.rescale_applied *= f;
    const cplx length_phase =
        std::polar(1.0, params.k * static_cast<double>(sg.nominal_length));
    for (const auto& wire : sg.wires) {
        amps.amps.push_back(tr.transmission[wire.out_port] / length_phase *
                            amps.rescale_applied);
        amps.labels.push_back(wire.label);
        amps.kept.push_back(wire.kept);
        amps.diagonal.push_back(sg.mode == CircuitMode::dm ? wire.ket == wire.bra
                                                           : false);
    }
    for (const auto& d : sg.drains)
        amps.drain_total += std::norm(tr.transmission[d.out_port]);
    amps.global_phase = length_phase * normalize_phase(amps.amps, amps.diagonal);
    return out;
}

}  // namespace qwalk
