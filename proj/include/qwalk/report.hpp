#ifndef QWALK_REPORT_HPP
#define QWALK_REPORT_HPP

#include <optional>
#include <string>

#include "qwalk/compiler.hpp"
#include "qwalk/dm_oracle.hpp"
#include "qwalk/scattering.hpp"

namespace qwalk {

// Deterministic run report: fixed field order, floats with 17 significant
// digits, complex numbers as [re, im] pairs. Identical inputs produce
// byte-identical output.
class JsonWriter {
  public:
    std::string str() const { return out_; }

    void begin_object();
    void end_object();
    void begin_array();
    void end_array();
    void key(const std::string& name);
    void value(const std::string& s);
    void value(double d);
    void value(long long i);
    void value(int i) { value(static_cast<long long>(i)); }
    void value(bool b);
    void value(cplx z);

    void field(const std::string& name, const std::string& s);
    void field(const std::string& name, const char* s);
    void field(const std::string& name, double d);
    void field(const std::string& name, long long i);
    void field(const std::string& name, int i);
    void field(const std::string& name, bool b);
    void field(const std::string& name, cplx z);

  private:
    void separator();
    std::string out_;
    std::vector<char> stack_;
    bool need_comma_ = false;
};

std::string format_double(double d);  // %.17g

struct RunOutputs {
    double k = kDefaultMomentum;
    const ScatterGraph* graph = nullptr;
    const WireAmplitudes* amps = nullptr;
    const ResourceReport* resources = nullptr;
    const CompareReport* verify = nullptr;
    const TimeTrace* trace = nullptr;
    std::string solver = "frequency";
};

std::string run_report_json(const RunOutputs& outputs);

}  // namespace qwalk

#endif
