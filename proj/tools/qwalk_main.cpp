// Command-line front end: compile circuit files to scattering graphs, solve
// them, verify against the exact density-matrix reference, and report
// resource counts.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "qwalk/dm_oracle.hpp"
#include "qwalk/report.hpp"

using namespace qwalk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int thread_count() {
    if (const char* env = std::getenv("QWALK_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct SweepSpec {
    double from = 0.3;
    double to = 2.8;
    int steps = 0;
};

bool parse_sweep(const std::string& text, SweepSpec& sweep) {
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    in >> sweep.from >> c1 >> sweep.to >> c2 >> sweep.steps;
    return bool(in) && c1 == ':' && c2 == ':' && sweep.steps >= 2;
}

int cmd_run(const std::string& circuit_path, double k, const std::string& solver,
            double sigma, int lead_len, double t_max, bool verify,
            bool ideal_blocks, const std::string& out_path,
            const std::string& dot_path, bool json_to_stdout,
            const std::string& sweep_text) {
    CircuitSpec spec;
    ScatterGraph graph;
    try {
        spec = parse_circuit(read_file(circuit_path), circuit_path);
        auto diags = validate(spec);
        if (!diags.empty()) {
            for (const auto& d : diags) std::cerr << "error: " << d.message << "\n";
            return kExitInputError;
        }
        CompileOptions opts;
        opts.ideal_blocks = ideal_blocks;
        graph = compile(spec, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << circuit_path << ": " << e.what() << "\n";
        return kExitInputError;
    }

    if (!dot_path.empty()) write_file(dot_path, export_dot(graph));

    ResourceReport resources = resource_report(spec, &graph);

    if (!sweep_text.empty()) {
        SweepSpec sweep;
        if (!parse_sweep(sweep_text, sweep)) {
            std::cerr << "error: --sweep-k expects from:to:steps\n";
            return kExitInputError;
        }
        std::vector<std::string> records(sweep.steps);
        std::vector<std::string> errors(sweep.steps);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                int idx = next.fetch_add(1);
                if (idx >= sweep.steps) return;
                double kk = sweep.from +
                            (sweep.to - sweep.from) * idx / (sweep.steps - 1);
                try {
                    WireAmplitudes amps = solve_frequency(graph, kk);
                    RunOutputs out;
                    out.k = kk;
                    out.graph = &graph;
                    out.amps = &amps;
                    records[idx] = run_report_json(out);
                } catch (const std::exception& e) {
                    errors[idx] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(thread_count(), sweep.steps); ++t)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        std::ostringstream body;
        body << "[";
        for (int i = 0; i < sweep.steps; ++i) {
            if (!errors[i].empty()) {
                std::cerr << "error at sweep point " << i << ": " << errors[i] << "\n";
                return kExitInputError;
            }
            if (i) body << ",";
            body << "\n" << records[i];
        }
        body << "\n]\n";
        if (!out_path.empty()) write_file(out_path, body.str());
        if (json_to_stdout || out_path.empty()) std::cout << body.str();
        return kExitOk;
    }

    WireAmplitudes amps;
    TimeTrace trace;
    bool have_trace = false;
    try {
        if (solver == "frequency") {
            amps = solve_frequency(graph, k);
        } else {
            TimeParams params;
            params.k = k;
            params.sigma = sigma;
            params.lead_len = lead_len;
            params.t_max = t_max;
            GraphTimeResult res = propagate_wavepacket(graph, params);
            amps = res.amps;
            trace = res.trace;
            have_trace = true;
            if (solver == "both") {
                WireAmplitudes freq = solve_frequency(graph, k);
                double worst = 0.0;
                for (size_t i = 0; i < freq.amps.size(); ++i)
                    worst = std::max(worst, std::abs(freq.amps[i] - amps.amps[i]));
                std::cerr << "time vs frequency max deviation: "
                          << format_double(worst) << "\n";
                amps = freq;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: solver: " << e.what() << "\n";
        return kExitInputError;
    }

    if (amps.start_reflection > 1e-6 && std::abs(k - kDefaultMomentum) < 1e-12)
        std::cerr << "warning: model violation, start-port reflection "
                  << format_double(amps.start_reflection) << "\n";

    CompareReport verdict;
    bool verified_ok = true;
    if (verify) {
        try {
            DensityMatrix rho = simulate(spec);
            verdict = compare(amps, graph, rho);
            verified_ok = verdict.pass;
            if (!verdict.pass)
                std::cerr << "verification failed: max error "
                          << format_double(verdict.max_abs_err) << " at wire "
                          << verdict.worst_wire << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error: oracle: " << e.what() << "\n";
            return kExitInputError;
        }
    }

    RunOutputs out;
    out.k = k;
    out.graph = &graph;
    out.amps = &amps;
    out.resources = &resources;
    out.solver = solver;
    if (verify) out.verify = &verdict;
    if (have_trace) out.trace = &trace;
    std::string report = run_report_json(out) + "\n";
    if (!out_path.empty()) write_file(out_path, report);
    if (json_to_stdout || out_path.empty()) std::cout << report;

    return verified_ok ? kExitOk : kExitVerifyFailed;
}

struct WidgetRow {
    std::string name;
    double k;
    double max_err;
    double reflection;
};

int cmd_widgets(double tol) {
    std::vector<WidgetRow> rows;
    const double k0 = kDefaultMomentum;

    auto check = [&](const std::string& name, const WidgetGraph& w,
                     const MatrixXcd& target, double k) {
        WidgetReport rep = verify_widget(w, target, k);
        rows.push_back({name, k, rep.max_err, rep.reflection_norm});
    };

    check("u2", u2_widget(), u2_matrix(), k0);
    for (int m = 1; m <= 7; ++m) {
        // Relative phase against the reference wire.
        SMatrix ref = solve_smatrix(reference_wire(), k0);
        SMatrix ph = solve_smatrix(phase_widget(m), k0);
        cplx rel = ph.t(0, 0) / ref.t(0, 0);
        cplx want = std::polar(1.0, m * M_PI / 4.0);
        rows.push_back({"phase" + std::to_string(m), k0, std::abs(rel - want),
                        std::max(ref.r.cwiseAbs().maxCoeff(),
                                 ph.r.cwiseAbs().maxCoeff())});
    }
    check("crossing", crossing_widget({1, 0}),
          (MatrixXcd(2, 2) << 0, 1, 1, 0).finished(), k0);
    for (double lambda : {0.0, 0.3, 1.0 / std::sqrt(2.0), 1.0}) {
        MatrixXcd target(2, 1);
        target << lambda, std::sqrt(1.0 - lambda * lambda);
        for (double k : {0.3, k0, 2.0}) {
            std::ostringstream name;
            name << "dlambda(" << std::setprecision(3) << lambda << ")";
            check(name.str(), dlambda_widget(lambda), target, k);
        }
    }

    std::cout << std::left << std::setw(16) << "widget" << std::setw(10) << "k"
              << std::setw(14) << "maxErr" << "reflectionNorm\n";
    bool all_pass = true;
    for (const auto& row : rows) {
        bool pass = row.max_err <= tol && row.reflection <= 1e-9;
        all_pass = all_pass && pass;
        std::cout << std::left << std::setw(16) << row.name << std::setw(10)
                  << std::setprecision(4) << row.k << std::setw(14)
                  << std::scientific << std::setprecision(3) << row.max_err
                  << std::setprecision(3) << row.reflection
                  << (pass ? "" : "  FAIL") << "\n";
        std::cout.unsetf(std::ios::scientific);
    }
    return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_resources(int n, int T, double f) {
    if (n < 1 || T < 0 || f < 0.0 || f > 1.0) {
        std::cerr << "error: expected n >= 1, T >= 0, f in [0, 1]\n";
        return kExitInputError;
    }
    int fT = static_cast<int>(std::llround(f * T));
    ResourceReport r = resource_report_from_counts(n, T, fT);
    std::cout << "n=" << n << " T=" << T << " f=" << f << " fT=" << fT << "\n\n";
    std::cout << std::left << std::setw(22) << "" << std::setw(16) << "wires"
              << "nodes\n";
    std::cout << std::left << std::setw(22) << "open system walk"
              << std::setw(16) << format_double(r.wires_formula_open)
              << format_double(r.nodes_formula_open) << "\n";
    std::cout << std::left << std::setw(22) << "purification" << std::setw(16)
              << format_double(r.wires_formula_purif)
              << format_double(r.nodes_formula_purif) << "\n\n";
    std::cout << "fT > n (open model advantageous): "
              << (r.ft_greater_than_n ? "yes" : "no") << "\n";
    std::cout << "survival lower bound: " << format_double(r.survival_lower_bound)
              << "\n";
    std::cout << "repetition bound: "
              << format_double(1.0 / r.survival_lower_bound) << "\n";
    return kExitOk;
}

int cmd_export_dot(const std::string& circuit_path, const std::string& out_path,
                   bool ideal_blocks) {
    try {
        CircuitSpec spec = parse_circuit(read_file(circuit_path), circuit_path);
        CompileOptions opts;
        opts.ideal_blocks = ideal_blocks;
        ScatterGraph graph = compile(spec, opts);
        std::string dot = export_dot(graph);
        if (out_path.empty())
            std::cout << dot;
        else
            write_file(out_path, dot);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-walk scattering compiler and simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "compile and solve a circuit file");
    std::string circuit_path, out_path, dot_path, solver = "frequency",
                sweep_text;
    double k = kDefaultMomentum, sigma = 40.0, t_max = -1.0;
    int lead_len = 400;
    bool verify = false, ideal_blocks = false, json_flag = false;
    run->add_option("circuit", circuit_path, "circuit file")->required();
    run->add_option("--k", k, "momentum (default pi/4)");
    run->add_option("--solver", solver, "frequency|timedomain|both")
        ->check(CLI::IsMember({"frequency", "timedomain", "both"}));
    run->add_option("--sigma", sigma, "wavepacket width (time domain)");
    run->add_option("--lead-len", lead_len, "finite lead length (time domain)");
    run->add_option("--t-max", t_max, "time limit (time domain)");
    run->add_option("--output", out_path, "write the JSON report here");
    run->add_option("--dot", dot_path, "write a DOT rendering here");
    run->add_option("--sweep-k", sweep_text, "from:to:steps momentum sweep");
    run->add_flag("--verify", verify, "cross-check against the exact DM");
    run->add_flag("--ideal-blocks", ideal_blocks,
                  "allow ideal-block fallback for unsynthesizable unitaries");
    run->add_flag("--json", json_flag, "print the JSON report to stdout");

    // widgets
    auto* widgets = app.add_subcommand("widgets", "verify the widget catalog");
    double widget_tol = 1e-9;
    widgets->add_option("--tol", widget_tol, "max error tolerance");

    // resources
    auto* resources =
        app.add_subcommand("resources", "graph-size formulas for (n, T, f)");
    int res_n = 1, res_T = 1;
    double res_f = 0.0;
    resources->add_option("n", res_n, "qubit count")->required();
    resources->add_option("T", res_T, "unitary gate count")->required();
    resources->add_option("f", res_f, "channel fraction")->required();

    // export-dot
    auto* exp = app.add_subcommand("export-dot", "compile and export DOT");
    std::string exp_circuit, exp_out;
    bool exp_ideal = false;
    exp->add_option("circuit", exp_circuit, "circuit file")->required();
    exp->add_option("--output", exp_out, "output path (stdout if absent)");
    exp->add_flag("--ideal-blocks", exp_ideal, "allow ideal-block fallback");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(circuit_path, k, solver, sigma, lead_len, t_max, verify,
                       ideal_blocks, out_path, dot_path, json_flag, sweep_text);
    if (widgets->parsed()) return cmd_widgets(widget_tol);
    if (resources->parsed()) return cmd_resources(res_n, res_T, res_f);
    if (exp->parsed()) return cmd_export_dot(exp_circuit, exp_out, exp_ideal);
    return kExitInputError;
}
