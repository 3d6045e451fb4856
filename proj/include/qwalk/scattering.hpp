#ifndef QWALK_SCATTERING_HPP
#define QWALK_SCATTERING_HPP

#include <string>
#include <vector>

#include "qwalk/compiler.hpp"

namespace qwalk {

struct WireAmplitudes {
    double k = kDefaultMomentum;
    std::vector<cplx> amps;           // per terminal wire, wire order
    std::vector<std::string> labels;
    std::vector<bool> kept;
    std::vector<bool> diagonal;       // dm wires with ket == bra
    double drain_total = 0.0;         // raw, before rescale correction
    cplx global_phase = 1.0;          // total phase divided out
    double rescale_applied = 1.0;     // product of recorded lambda_max factors
    double start_reflection = 0.0;    // |r| at the start port
    double stray_reflection = 0.0;    // max |r| over the other input ports
};

// Exact frequency-domain solve: unit incoming amplitude on the start port,
// outgoing boundary conditions everywhere else. Amplitudes are corrected for
// the nominal length, the recorded rescalings, and rotated so the
// diagonal-wire sum is real positive (largest amplitude, in pure mode).
WireAmplitudes solve_frequency(const ScatterGraph& graph, double k);

double purity_from_wires(const WireAmplitudes& w);
// 2^t x kept-wire density, t = number of traced qubits recorded in `graph`.
double subsystem_purity(const WireAmplitudes& w, const ScatterGraph& graph);
double survival_probability(const WireAmplitudes& w);

struct TimeParams {
    double k = kDefaultMomentum;
    double sigma = 40.0;      // wavepacket width in sites (>= 4)
    int lead_len = 400;       // finite lead length (>= 8 sigma)
    double t_max = -1.0;      // auto when negative
    double chunk = 8.0;       // integrator chunk duration
    // Edges in the free reference chain; non-positive means self-calibrate
    // from the group delay of the frequency-domain solution.
    int ref_length = 0;
};

struct TimeTrace {
    std::vector<double> times;
    std::vector<double> norms;         // total norm per recorded time
    double backscatter = 0.0;          // norm left on the input lead
    double exit_norm = 0.0;            // norm past the output ports at the end
    double norm_drift = 0.0;           // max |norm - 1| over the run
    bool completed = true;             // false if t_max hit before 99% exit
    std::string status;
};

struct TimeResult {
    // Complex transmission estimate per output port (widget-level), or per
    // terminal wire after postprocessing (graph-level).
    std::vector<cplx> transmission;
    TimeTrace trace;
};

// Gaussian wavepacket exp(-(x-x0)^2/4 sigma^2) e^{ikx} sent down a finite
// input lead; evolution by Chebyshev expansion of exp(-iHt) on the closed
// graph; transmissions estimated against a free reference chain.
TimeResult propagate_wavepacket(const WidgetGraph& w, int input_port,
                                const TimeParams& params);

// Graph-level wrapper: returns wire amplitude estimates with the same
// corrections as solve_frequency, plus the propagation trace.
struct GraphTimeResult {
    WireAmplitudes amps;
    TimeTrace trace;
};
GraphTimeResult propagate_wavepacket(const ScatterGraph& graph,
                                     const TimeParams& params);

}  // namespace qwalk

#endif
