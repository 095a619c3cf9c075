#include "ckam/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ckam/util.hpp"

namespace ckam {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
};

using RawMap = std::map<std::string, RawValue>; // "section.key" -> value

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& source, int line,
                       const std::string& what) {
    throw config_error(source + ":" + std::to_string(line) + ": " + what);
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"hamiltonian",
         {"preset", "potential_a0", "potential_cos", "potential_sin",
          "coupling_a0", "coupling_cos", "coupling_sin", "u_shift"}},
        {"grid", {"period", "n_nodes", "m_nodes", "v_max"}},
        {"solver", {"dt", "tol_fix", "max_iter"}},
        {"measure", {"eps_ordinal", "tol_closed"}},
        {"scan", {"theta_min", "theta_max", "n_samples", "method"}},
        {"output", {"dir"}},
    };
    return keys;
}

RawMap tokenize(const std::string& text, const std::string& source) {
    RawMap raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                fail(source, line_no, "unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (schema().find(section) == schema().end())
                fail(source, line_no, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = body.find('=');
        if (eq == std::string::npos)
            fail(source, line_no, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (section.empty())
            fail(source, line_no, "key '" + key + "' outside any section");
        if (key.empty()) fail(source, line_no, "empty key");
        const auto& allowed = schema().at(section);
        if (allowed.find(key) == allowed.end())
            fail(source, line_no,
                 "unknown key '" + key + "' in section [" + section + "]");
        const std::string full = section + "." + key;
        if (raw.count(full))
            fail(source, line_no, "duplicate key '" + key + "'");
        raw[full] = {value, line_no};
    }
    return raw;
}

/// Consumes "section.key" from the raw map, if present.
class Fields {
  public:
    Fields(RawMap raw, std::string source)
        : raw_(std::move(raw)), source_(std::move(source)) {}

    bool has(const std::string& full) const { return raw_.count(full) > 0; }
    int line(const std::string& full) const { return raw_.at(full).line; }

    void get_string(const std::string& full, std::string& out) {
        const auto it = raw_.find(full);
        if (it == raw_.end()) return;
        if (it->second.text.empty())
            fail(source_, it->second.line, "empty value for '" + full + "'");
        out = it->second.text;
    }

    void get_double(const std::string& full, double& out) {
        const auto it = raw_.find(full);
        if (it == raw_.end()) return;
        if (!parse_double(it->second.text, out))
            fail(source_, it->second.line,
                 "non-numeric value '" + it->second.text + "' for '" + full +
                     "'");
    }

    void get_long(const std::string& full, long& out) {
        const auto it = raw_.find(full);
        if (it == raw_.end()) return;
        if (!parse_long(it->second.text, out))
            fail(source_, it->second.line,
                 "non-integer value '" + it->second.text + "' for '" + full +
                     "'");
    }

    void get_int(const std::string& full, int& out) {
        long v = out;
        get_long(full, v);
        out = static_cast<int>(v);
    }

    void get_double_list(const std::string& full, std::vector<double>& out) {
        const auto it = raw_.find(full);
        if (it == raw_.end()) return;
        out.clear();
        std::istringstream parts(it->second.text);
        std::string tok;
        while (parts >> tok) {
            double v = 0.0;
            if (!parse_double(tok, v))
                fail(source_, it->second.line,
                     "non-numeric entry '" + tok + "' in '" + full + "'");
            out.push_back(v);
        }
        if (out.empty())
            fail(source_, it->second.line, "empty list for '" + full + "'");
    }

    /// Constraint violation blamed on the key's own line, or on line 1 when
    /// the key was never written (a default made the combination invalid).
    [[noreturn]] void reject(const std::string& full, const std::string& why) {
        fail(source_, has(full) ? line(full) : 1, why);
    }

  private:
    RawMap raw_;
    std::string source_;
};

} // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    Fields fields(tokenize(text, source), source);
    RunConfig cfg;

    fields.get_string("hamiltonian.preset", cfg.preset);
    if (cfg.preset != "pendulum_example" && cfg.preset != "piecewise_example" &&
        cfg.preset != "mechanical")
        fields.reject("hamiltonian.preset",
                      "unknown preset '" + cfg.preset + "'");

    const bool mechanical = cfg.preset == "mechanical";
    for (const char* key :
         {"hamiltonian.potential_a0", "hamiltonian.potential_cos",
          "hamiltonian.potential_sin", "hamiltonian.coupling_a0",
          "hamiltonian.coupling_cos", "hamiltonian.coupling_sin",
          "hamiltonian.u_shift"})
        if (!mechanical && fields.has(key))
            fields.reject(key, std::string("'") + key +
                                   "' is only meaningful for the mechanical "
                                   "preset");
    fields.get_double("hamiltonian.potential_a0", cfg.potential.a0);
    fields.get_double_list("hamiltonian.potential_cos", cfg.potential.cos_coef);
    fields.get_double_list("hamiltonian.potential_sin", cfg.potential.sin_coef);
    fields.get_double("hamiltonian.coupling_a0", cfg.coupling.a0);
    fields.get_double_list("hamiltonian.coupling_cos", cfg.coupling.cos_coef);
    fields.get_double_list("hamiltonian.coupling_sin", cfg.coupling.sin_coef);
    if (fields.has("hamiltonian.u_shift")) {
        double shift = 0.0;
        fields.get_double("hamiltonian.u_shift", shift);
        cfg.u_shift = shift;
    }

    cfg.period = cfg.preset == "piecewise_example" ? 2.0 : 1.0;
    fields.get_double("grid.period", cfg.period);
    if (cfg.period <= 0.0) fields.reject("grid.period", "period must be > 0");
    if (cfg.preset == "pendulum_example" && cfg.period != 1.0)
        fields.reject("grid.period",
                      "the pendulum preset is 1-periodic; period must be 1");
    if (cfg.preset == "piecewise_example" && cfg.period != 2.0)
        fields.reject("grid.period",
                      "the piecewise preset is 2-periodic; period must be 2");
    cfg.potential.period = cfg.period;
    cfg.coupling.period = cfg.period;

    fields.get_int("grid.n_nodes", cfg.n_nodes);
    if (cfg.n_nodes < 16)
        fields.reject("grid.n_nodes", "n_nodes must be at least 16");
    fields.get_int("grid.m_nodes", cfg.m_nodes);
    if (cfg.m_nodes < 3 || cfg.m_nodes % 2 == 0)
        fields.reject("grid.m_nodes", "m_nodes must be odd and at least 3");
    fields.get_double("grid.v_max", cfg.v_max);
    if (cfg.v_max <= 0.0) fields.reject("grid.v_max", "v_max must be > 0");

    fields.get_double("solver.dt", cfg.dt);
    if (fields.has("solver.dt")) {
        if (cfg.dt <= 0.0) fields.reject("solver.dt", "dt must be > 0");
        const double h = cfg.period / cfg.n_nodes;
        if (cfg.dt * cfg.v_max < h)
            fields.reject("solver.dt",
                          "dt too small: one step must reach the neighboring "
                          "node (dt * v_max >= period / n_nodes)");
    }
    fields.get_double("solver.tol_fix", cfg.tol_fix);
    if (cfg.tol_fix <= 0.0) fields.reject("solver.tol_fix", "tol_fix must be > 0");
    fields.get_long("solver.max_iter", cfg.max_iter);
    if (cfg.max_iter < 16)
        fields.reject("solver.max_iter", "max_iter must be at least 16");

    fields.get_double("measure.eps_ordinal", cfg.eps_ordinal);
    if (cfg.eps_ordinal <= 0.0)
        fields.reject("measure.eps_ordinal", "eps_ordinal must be > 0");
    fields.get_double("measure.tol_closed", cfg.tol_closed);
    if (cfg.tol_closed <= 0.0)
        fields.reject("measure.tol_closed", "tol_closed must be > 0");

    fields.get_double("scan.theta_min", cfg.theta_min);
    fields.get_double("scan.theta_max", cfg.theta_max);
    if (!(cfg.theta_min < cfg.theta_max))
        fields.reject(fields.has("scan.theta_max") ? "scan.theta_max"
                                                   : "scan.theta_min",
                      "theta_min must be < theta_max");
    fields.get_int("scan.n_samples", cfg.n_samples);
    if (cfg.n_samples < 5)
        fields.reject("scan.n_samples", "n_samples must be at least 5");
    fields.get_string("scan.method", cfg.method);
    if (cfg.method != "lp" && cfg.method != "laxoleinik" && cfg.method != "both")
        fields.reject("scan.method",
                      "method must be lp, laxoleinik, or both");

    fields.get_string("output.dir", cfg.out_dir);

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ":0: cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

ContactHamiltonianSpec RunConfig::make_spec() const {
    if (preset == "pendulum_example")
        return ContactHamiltonianSpec::pendulum_example();
    if (preset == "piecewise_example")
        return ContactHamiltonianSpec::piecewise_example();
    UForm form;
    if (u_shift) form = UForm{UForm::Kind::affine, *u_shift};
    return ContactHamiltonianSpec::mechanical(
        period, PeriodicCurve::smooth(potential), PeriodicCurve::smooth(coupling),
        form);
}

TorusGrid1D RunConfig::x_grid() const {
    return TorusGrid1D::make(period, n_nodes);
}

VelocityGrid RunConfig::v_grid() const {
    return VelocityGrid::make(v_max, m_nodes);
}

double RunConfig::dt_or_default() const {
    return dt > 0.0 ? dt : 16.0 * (period / n_nodes) / v_max;
}

} // namespace ckam
