#pragma once

// Flat-file run configuration.
//
// Grammar: one `section.key = value` assignment per line; `#` starts a
// comment (whole-line or trailing); blank lines are ignored. Values are
// integers, reals, booleans (true/false/1/0), unsigned 64-bit seeds,
// comma-separated real lists, or bare filenames. Every key has a
// default, so the empty string is a valid config.
//
// parse_config validates everything and reports ALL violations at once,
// each tagged with its line number and the constraint it breaks.
// echo() emits the canonical form; parsing an echo reproduces the same
// config (idempotence is pinned by a test).

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/params.hpp"
#include "oldroyd/series.hpp"

namespace oldroyd {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid config:";
        for (const auto& s : v) {
            out += "\n  ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

struct RunConfig {
    // grid
    int d = 2;
    int N = 64;
    double L = 2.0 * std::numbers::pi;
    // model
    ModelParams model;
    // time stepping
    double dt = 1e-3;
    double T = 1.0;
    double cadence = 0.1;
    bool linear_only = false;
    double c_cfl = 0.5;
    // initial data
    std::uint64_t seed = 1;
    double epsilon = 1e-2;
    double sigma = 0.5;
    double epsilon0 = 0.1;
    double cutoff = 4.0;
    double rolloff = 0.25;
    // monitors
    std::vector<double> k_list = {0.0, 1.0};
    double interp_s = 1.0;
    double besov_weight = 1.0;
    // fit window for simulate-series fits
    double fit_t0 = 10.0;
    double fit_t1 = 40.0;
    // linearized decay study
    double decay_sigma = 0.5;
    double decay_epsilon0 = 0.1;
    std::vector<double> decay_k_list = {0.0, 1.0};
    double decay_cutoff = 1.0;
    double decay_tol = 1e-10;
    double decay_t_min = 0.1;
    double decay_t_max = 1000.0;
    int decay_per_decade = 12;
    double decay_fit_t0 = 10.0;
    double decay_fit_t1 = 1000.0;
    double decay_slope_tol = 0.08;
    // identity / property suites
    int inv_samples = 200;
    int inv_n1 = 32;
    int inv_n2 = 64;
    int inv_cancellation_pairs = 50;
    int inv_interpolation_fields = 1000;
    // artifact names (resolved against the output directory)
    std::string out_norms = "norms.csv";
    std::string out_verdicts = "verdicts.json";
    std::string out_decay_norms = "decay.csv";
    std::string out_checkpoint = "state.oldb";
    double checkpoint_every = 0.0;   // 0: only the final state

    InitialDataSpec initial_spec() const {
        InitialDataSpec s;
        s.seed = seed;
        s.epsilon = epsilon;
        s.sigma = sigma;
        s.epsilon0 = epsilon0;
        s.cutoff = cutoff;
        s.rolloff = rolloff;
        return s;
    }

    RecorderSpec recorder_spec() const {
        RecorderSpec r;
        r.cadence = cadence;
        r.k_list = k_list;
        r.sigma = sigma;
        r.interp_s = interp_s;
        return r;
    }
};

namespace detail {

struct KeyParser {
    std::function<bool(RunConfig&, const std::string&)> apply;  // false: type mismatch
    const char* type_name;
};

inline bool parse_real_value(const std::string& s, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline bool parse_int_value(const std::string& s, int& out) {
    std::size_t pos = 0;
    try {
        out = std::stoi(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline bool parse_u64_value(const std::string& s, std::uint64_t& out) {
    std::size_t pos = 0;
    try {
        out = std::stoull(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline bool parse_bool_value(const std::string& s, bool& out) {
    if (s == "true" || s == "1") { out = true; return true; }
    if (s == "false" || s == "0") { out = false; return true; }
    return false;
}

inline bool parse_list_value(const std::string& s, std::vector<double>& out) {
    out.clear();
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        double v;
        std::string trimmed;
        for (char c : cur)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (!parse_real_value(trimmed, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline const std::map<std::string, KeyParser>& key_table() {
    auto real_key = [](double RunConfig::* mem) {
        return KeyParser{[mem](RunConfig& c, const std::string& v) {
                             return parse_real_value(v, c.*mem);
                         },
                         "real"};
    };
    auto int_key = [](int RunConfig::* mem) {
        return KeyParser{[mem](RunConfig& c, const std::string& v) {
                             return parse_int_value(v, c.*mem);
                         },
                         "integer"};
    };
    auto list_key = [](std::vector<double> RunConfig::* mem) {
        return KeyParser{[mem](RunConfig& c, const std::string& v) {
                             return parse_list_value(v, c.*mem);
                         },
                         "comma-separated reals"};
    };
    auto string_key = [](std::string RunConfig::* mem) {
        return KeyParser{[mem](RunConfig& c, const std::string& v) {
                             if (v.empty()) return false;
                             c.*mem = v;
                             return true;
                         },
                         "name"};
    };
    auto model_key = [](double ModelParams::* mem) {
        return KeyParser{[mem](RunConfig& c, const std::string& v) {
                             return parse_real_value(v, c.model.*mem);
                         },
                         "real"};
    };

    static const std::map<std::string, KeyParser> table = {
        {"grid.d", int_key(&RunConfig::d)},
        {"grid.n", int_key(&RunConfig::N)},
        {"grid.l", real_key(&RunConfig::L)},
        {"model.mu", model_key(&ModelParams::mu)},
        {"model.mu1", model_key(&ModelParams::mu1)},
        {"model.mu2", model_key(&ModelParams::mu2)},
        {"model.a", model_key(&ModelParams::a)},
        {"model.b", model_key(&ModelParams::b)},
        {"time.dt", real_key(&RunConfig::dt)},
        {"time.t", real_key(&RunConfig::T)},
        {"time.cadence", real_key(&RunConfig::cadence)},
        {"time.linear_only", KeyParser{[](RunConfig& c, const std::string& v) {
                                           return parse_bool_value(v, c.linear_only);
                                       },
                                       "boolean"}},
        {"time.c_cfl", real_key(&RunConfig::c_cfl)},
        {"init.seed", KeyParser{[](RunConfig& c, const std::string& v) {
                                    return parse_u64_value(v, c.seed);
                                },
                                "unsigned integer"}},
        {"init.epsilon", real_key(&RunConfig::epsilon)},
        {"init.sigma", real_key(&RunConfig::sigma)},
        {"init.epsilon0", real_key(&RunConfig::epsilon0)},
        {"init.cutoff", real_key(&RunConfig::cutoff)},
        {"init.rolloff", real_key(&RunConfig::rolloff)},
        {"monitor.k_list", list_key(&RunConfig::k_list)},
        {"monitor.interp_s", real_key(&RunConfig::interp_s)},
        {"monitor.besov_weight", real_key(&RunConfig::besov_weight)},
        {"fit.t0", real_key(&RunConfig::fit_t0)},
        {"fit.t1", real_key(&RunConfig::fit_t1)},
        {"decay.sigma", real_key(&RunConfig::decay_sigma)},
        {"decay.epsilon0", real_key(&RunConfig::decay_epsilon0)},
        {"decay.k_list", list_key(&RunConfig::decay_k_list)},
        {"decay.cutoff", real_key(&RunConfig::decay_cutoff)},
        {"decay.tol", real_key(&RunConfig::decay_tol)},
        {"decay.t_min", real_key(&RunConfig::decay_t_min)},
        {"decay.t_max", real_key(&RunConfig::decay_t_max)},
        {"decay.per_decade", int_key(&RunConfig::decay_per_decade)},
        {"decay.fit_t0", real_key(&RunConfig::decay_fit_t0)},
        {"decay.fit_t1", real_key(&RunConfig::decay_fit_t1)},
        {"decay.slope_tol", real_key(&RunConfig::decay_slope_tol)},
        {"invariants.samples", int_key(&RunConfig::inv_samples)},
        {"invariants.n1", int_key(&RunConfig::inv_n1)},
        {"invariants.n2", int_key(&RunConfig::inv_n2)},
        {"invariants.cancellation_pairs", int_key(&RunConfig::inv_cancellation_pairs)},
        {"invariants.interpolation_fields", int_key(&RunConfig::inv_interpolation_fields)},
        {"output.norms", string_key(&RunConfig::out_norms)},
        {"output.verdicts", string_key(&RunConfig::out_verdicts)},
        {"output.decay_norms", string_key(&RunConfig::out_decay_norms)},
        {"output.checkpoint", string_key(&RunConfig::out_checkpoint)},
        {"output.checkpoint_every", real_key(&RunConfig::checkpoint_every)},
    };
    return table;
}

inline void validate_config(const RunConfig& c, std::vector<std::string>& errs) {
    auto fail = [&](const std::string& msg) { errs.push_back(msg); };
    if (c.d != 2 && c.d != 3) fail("grid.d: d must be 2 or 3");
    if (c.N < 8 || c.N % 2 != 0) fail("grid.n: N must be even and >= 8");
    if (!(c.L > 0.0)) fail("grid.l: L must be > 0");
    if (!(c.model.mu > 0.0)) fail("model.mu: must be > 0");
    if (!(c.model.mu1 > 0.0)) fail("model.mu1: must be > 0");
    if (!(c.model.mu2 > 0.0)) fail("model.mu2: must be > 0");
    if (!(c.model.a > 0.0)) fail("model.a: must be > 0");
    if (!(c.model.b >= -1.0 && c.model.b <= 1.0)) fail("model.b: b ∈ [-1, 1]");
    if (!(c.dt > 0.0)) fail("time.dt: must be > 0");
    if (!(c.T >= 0.0)) fail("time.t: must be >= 0");
    if (!(c.cadence > 0.0)) fail("time.cadence: must be > 0");
    if (!(c.c_cfl > 0.0)) fail("time.c_cfl: must be > 0");
    if (!(c.epsilon >= 0.0)) fail("init.epsilon: must be >= 0");
    if (!(c.sigma >= 0.0 && 2.0 * c.sigma < c.d))
        fail("init.sigma: 0 ≤ σ < d/2");
    if (!(c.epsilon0 > 0.0)) fail("init.epsilon0: must be > 0");
    if (!(c.cutoff > 0.0)) fail("init.cutoff: must be > 0");
    if (!(c.rolloff > 0.0)) fail("init.rolloff: must be > 0");
    for (double k : c.k_list)
        if (!(k >= 0.0 && k <= 16.0)) {
            fail("monitor.k_list: orders must lie in [0, 16] (resolution-limited)");
            break;
        }
    if (!(c.interp_s >= 0.0)) fail("monitor.interp_s: must be >= 0");
    if (!(c.besov_weight > 0.0)) fail("monitor.besov_weight: must be > 0");
    if (!(c.fit_t1 > c.fit_t0)) fail("fit.t1: window must satisfy t1 > t0");
    if (!(c.decay_sigma >= 0.0 && 2.0 * c.decay_sigma < c.d))
        fail("decay.sigma: 0 ≤ σ < d/2");
    if (!(c.decay_epsilon0 > 0.0)) fail("decay.epsilon0: must be > 0");
    for (double k : c.decay_k_list)
        if (!(k >= 0.0)) {
            fail("decay.k_list: orders must be >= 0");
            break;
        }
    if (!(c.decay_cutoff > 0.0)) fail("decay.cutoff: must be > 0");
    if (!(c.decay_tol > 0.0)) fail("decay.tol: must be > 0");
    if (!(c.decay_t_min > 0.0 && c.decay_t_max > c.decay_t_min))
        fail("decay.t_max: need 0 < t_min < t_max");
    if (c.decay_per_decade < 1) fail("decay.per_decade: must be >= 1");
    if (!(c.decay_fit_t1 > c.decay_fit_t0)) fail("decay.fit_t1: window must satisfy t1 > t0");
    if (!(c.decay_slope_tol > 0.0)) fail("decay.slope_tol: must be > 0");
    if (c.inv_samples < 1) fail("invariants.samples: must be >= 1");
    if (c.inv_n1 < 8 || c.inv_n1 % 2 != 0) fail("invariants.n1: must be even and >= 8");
    if (c.inv_n2 < 8 || c.inv_n2 % 2 != 0) fail("invariants.n2: must be even and >= 8");
    if (c.inv_cancellation_pairs < 1) fail("invariants.cancellation_pairs: must be >= 1");
    if (c.inv_interpolation_fields < 1) fail("invariants.interpolation_fields: must be >= 1");
    if (!(c.checkpoint_every >= 0.0)) fail("output.checkpoint_every: must be >= 0");
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> errs;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) + ": expected `section.key = value`");
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        for (char& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        auto it = detail::key_table().find(key);
        if (it == detail::key_table().end()) {
            errs.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (!it->second.apply(cfg, value))
            errs.push_back("line " + std::to_string(lineno) + ": " + key + ": expected "
                           + it->second.type_name + ", got '" + value + "'");
    }
    detail::validate_config(cfg, errs);
    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

inline std::string echo_config(const RunConfig& c) {
    auto real = [](double v) { return NormSeries::format_double(v); };
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += real(v[i]);
        }
        return s;
    };
    std::string out;
    out += "grid.d = " + std::to_string(c.d) + "\n";
    out += "grid.n = " + std::to_string(c.N) + "\n";
    out += "grid.l = " + real(c.L) + "\n";
    out += "model.mu = " + real(c.model.mu) + "\n";
    out += "model.mu1 = " + real(c.model.mu1) + "\n";
    out += "model.mu2 = " + real(c.model.mu2) + "\n";
    out += "model.a = " + real(c.model.a) + "\n";
    out += "model.b = " + real(c.model.b) + "\n";
    out += "time.dt = " + real(c.dt) + "\n";
    out += "time.t = " + real(c.T) + "\n";
    out += "time.cadence = " + real(c.cadence) + "\n";
    out += std::string("time.linear_only = ") + (c.linear_only ? "true" : "false") + "\n";
    out += "time.c_cfl = " + real(c.c_cfl) + "\n";
    out += "init.seed = " + std::to_string(c.seed) + "\n";
    out += "init.epsilon = " + real(c.epsilon) + "\n";
    out += "init.sigma = " + real(c.sigma) + "\n";
    out += "init.epsilon0 = " + real(c.epsilon0) + "\n";
    out += "init.cutoff = " + real(c.cutoff) + "\n";
    out += "init.rolloff = " + real(c.rolloff) + "\n";
    out += "monitor.k_list = " + list(c.k_list) + "\n";
    out += "monitor.interp_s = " + real(c.interp_s) + "\n";
    out += "monitor.besov_weight = " + real(c.besov_weight) + "\n";
    out += "fit.t0 = " + real(c.fit_t0) + "\n";
    out += "fit.t1 = " + real(c.fit_t1) + "\n";
    out += "decay.sigma = " + real(c.decay_sigma) + "\n";
    out += "decay.epsilon0 = " + real(c.decay_epsilon0) + "\n";
    out += "decay.k_list = " + list(c.decay_k_list) + "\n";
    out += "decay.cutoff = " + real(c.decay_cutoff) + "\n";
    out += "decay.tol = " + real(c.decay_tol) + "\n";
    out += "decay.t_min = " + real(c.decay_t_min) + "\n";
    out += "decay.t_max = " + real(c.decay_t_max) + "\n";
    out += "decay.per_decade = " + std::to_string(c.decay_per_decade) + "\n";
    out += "decay.fit_t0 = " + real(c.decay_fit_t0) + "\n";
    out += "decay.fit_t1 = " + real(c.decay_fit_t1) + "\n";
    out += "decay.slope_tol = " + real(c.decay_slope_tol) + "\n";
    out += "invariants.samples = " + std::to_string(c.inv_samples) + "\n";
    out += "invariants.n1 = " + std::to_string(c.inv_n1) + "\n";
    out += "invariants.n2 = " + std::to_string(c.inv_n2) + "\n";
    out += "invariants.cancellation_pairs = " + std::to_string(c.inv_cancellation_pairs) + "\n";
    out += "invariants.interpolation_fields = " + std::to_string(c.inv_interpolation_fields) + "\n";
    out += "output.norms = " + c.out_norms + "\n";
    out += "output.verdicts = " + c.out_verdicts + "\n";
    out += "output.decay_norms = " + c.out_decay_norms + "\n";
    out += "output.checkpoint = " + c.out_checkpoint + "\n";
    out += "output.checkpoint_every = " + real(c.checkpoint_every) + "\n";
    return out;
}

} // namespace oldroyd
