#include "qwalk/report.hpp"

#include <cstdio>

namespace qwalk {

std::string format_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

void JsonWriter::separator() {
    if (need_comma_) out_ += ",";
    need_comma_ = false;
}

void JsonWriter::begin_object() {
    separator();
    out_ += "{";
    stack_.push_back('o');
}

void JsonWriter::end_object() {
    out_ += "}";
    stack_.pop_back();
    need_comma_ = true;
}

void JsonWriter::begin_array() {
    separator();
    out_ += "[";
    stack_.push_back('a');
}

void JsonWriter::end_array() {
    out_ += "]";
    stack_.pop_back();
    need_comma_ = true;
}

void JsonWriter::key(const std::string& name) {
    separator();
    out_ += "\"" + name + "\":";
}

void JsonWriter::value(const std::string& s) {
    separator();
    out_ += "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out_ += '\\';
        out_ += c;
    }
    out_ += "\"";
    need_comma_ = true;
}

void JsonWriter::value(double d) {
    separator();
    out_ += format_double(d);
    need_comma_ = true;
}

void JsonWriter::value(long long i) {
    separator();
    out_ += std::to_string(i);
    need_comma_ = true;
}

void JsonWriter::value(bool b) {
    separator();
    out_ += b ? "true" : "false";
    need_comma_ = true;
}

void JsonWriter::value(cplx z) {
    begin_array();
    value(z.real());
    value(z.imag());
    end_array();
}

void JsonWriter::field(const std::string& name, const std::string& s) {
    key(name);
    value(s);
}
void JsonWriter::field(const std::string& name, const char* s) {
    key(name);
    value(std::string(s));
}
void JsonWriter::field(const std::string& name, double d) {
    key(name);
    value(d);
}
void JsonWriter::field(const std::string& name, long long i) {
    key(name);
    value(i);
}
void JsonWriter::field(const std::string& name, int i) {
    key(name);
    value(static_cast<long long>(i));
}
void JsonWriter::field(const std::string& name, bool b) {
    key(name);
    value(b);
}
void JsonWriter::field(const std::string& name, cplx z) {
    key(name);
    value(z);
}

std::string run_report_json(const RunOutputs& o) {
    JsonWriter w;
    w.begin_object();
    w.field("k", o.k);
    if (o.graph) {
        w.field("circuit", o.graph->circuit_name);
        w.field("mode", o.graph->mode == CircuitMode::pure ? "pure" : "dm");
        w.field("n_qubits", o.graph->n_qubits);
    }
    w.field("solver", o.solver);
    if (o.amps) {
        w.key("wires");
        w.begin_object();
        for (size_t i = 0; i < o.amps->amps.size(); ++i)
            w.field(o.amps->labels[i], o.amps->amps[i]);
        w.end_object();
        if (o.graph && o.graph->mode == CircuitMode::dm) {
            w.field("purity", purity_from_wires(*o.amps));
            w.field("survival", survival_probability(*o.amps));
        }
        w.field("drainTotal", o.amps->drain_total);
        w.field("rescaleApplied", o.amps->rescale_applied);
        w.field("globalPhase", o.amps->global_phase);
        w.field("startReflection", o.amps->start_reflection);
        if (o.graph && o.graph->traced_qubits > 0)
            w.field("subsystemPurity", subsystem_purity(*o.amps, *o.graph));
    }
    if (o.trace) {
        w.key("timeTrace");
        w.begin_object();
        w.field("backscatter", o.trace->backscatter);
        w.field("exitNorm", o.trace->exit_norm);
        w.field("normDrift", o.trace->norm_drift);
        w.field("completed", o.trace->completed);
        if (!o.trace->status.empty()) w.field("status", o.trace->status);
        w.key("norms");
        w.begin_array();
        for (double n : o.trace->norms) w.value(n);
        w.end_array();
        w.end_object();
    }
    if (o.resources) {
        const ResourceReport& r = *o.resources;
        w.key("resources");
        w.begin_object();
        w.field("n", r.n);
        w.field("T", r.T);
        w.field("fT", r.fT);
        w.field("f", r.f);
        w.field("wiresActual", r.wires_actual);
        w.field("nodesActual", r.nodes_actual);
        w.field("wiresFormulaOpen", r.wires_formula_open);
        w.field("nodesFormulaOpen", r.nodes_formula_open);
        w.field("wiresFormulaPurif", r.wires_formula_purif);
        w.field("nodesFormulaPurif", r.nodes_formula_purif);
        w.field("survivalLowerBound", r.survival_lower_bound);
        w.field("ftGreaterThanN", r.ft_greater_than_n);
        w.end_object();
    }
    if (o.verify) {
        w.key("verify");
        w.begin_object();
        w.field("pass", o.verify->pass);
        w.field("maxAbsErr", o.verify->max_abs_err);
        w.field("phaseUsed", o.verify->phase_used);
        if (!o.verify->worst_wire.empty())
            w.field("worstWire", o.verify->worst_wire);
        w.end_object();
    }
    w.end_object();
    return w.str();
}

}  // namespace qwalk
