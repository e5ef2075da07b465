#include "xyflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "xyflow/csv.hpp"

namespace xyflow {
namespace {

struct Entry {
    int line;
    std::string value;
};

using Violations = std::vector<ConfigViolation>;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

bool parse_real(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && std::isfinite(v);
}

bool parse_int(const std::string& s, long long& v) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_u64(const std::string& s, std::uint64_t& v) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

// Context passed to key handlers.
struct Ctx {
    ExperimentConfig& cfg;
    Violations& out;
    int line;
    std::string key;

    void fail(const std::string& msg) const { out.push_back({line, key, msg}); }

    bool real(const std::string& s, double& v) const {
        if (!parse_real(s, v)) {
            fail("expected a real number, got '" + s + "'");
            return false;
        }
        return true;
    }
    bool integer(const std::string& s, int& v) const {
        long long x = 0;
        if (!parse_int(s, x) || x < INT32_MIN || x > INT32_MAX) {
            fail("expected an integer, got '" + s + "'");
            return false;
        }
        v = static_cast<int>(x);
        return true;
    }
    bool boolean(const std::string& s, bool& v) const {
        if (s == "true") v = true;
        else if (s == "false") v = false;
        else {
            fail("expected true or false, got '" + s + "'");
            return false;
        }
        return true;
    }
    bool real_list(const std::string& s, std::vector<double>& v) const {
        v.clear();
        if (s.find(':') != std::string::npos) {
            std::vector<std::string> parts;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ':')) parts.push_back(trim(item));
            double a = 0, b = 0, step = 0;
            if (parts.size() != 3 || !parse_real(parts[0], a) || !parse_real(parts[1], b) ||
                !parse_real(parts[2], step)) {
                fail("expected a range start:stop:step, got '" + s + "'");
                return false;
            }
            if (!(step > 0.0) || b < a) {
                fail("range needs step > 0 and stop >= start");
                return false;
            }
            const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
            if (n > 100000) {
                fail("range expands to more than 100000 values");
                return false;
            }
            for (long long i = 0; i <= n; ++i) v.push_back(a + static_cast<double>(i) * step);
            return true;
        }
        for (const auto& item : split_list(s)) {
            double x = 0;
            if (!real(item, x)) return false;
            v.push_back(x);
        }
        if (v.empty()) {
            fail("list must not be empty");
            return false;
        }
        return true;
    }
    bool int_list(const std::string& s, std::vector<int>& v) const {
        v.clear();
        for (const auto& item : split_list(s)) {
            int x = 0;
            if (!integer(item, x)) return false;
            v.push_back(x);
        }
        if (v.empty()) {
            fail("list must not be empty");
            return false;
        }
        return true;
    }
};

using Handler = std::function<void(const Ctx&, const std::string&)>;

template <class T, class Pred>
void check_all(const Ctx& c, const std::vector<T>& v, Pred ok, const std::string& constraint) {
    for (const T& x : v) {
        if (!ok(x)) {
            c.fail("constraint " + constraint + " violated");
            return;
        }
    }
}

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        {"experiment.kind",
         [](const Ctx& c, const std::string& s) {
             try {
                 c.cfg.kind = experiment_kind_from_string(s);
             } catch (const std::exception&) {
                 c.fail("unknown experiment kind '" + s +
                        "' (kernel-table, ground-state-sweep, window, mc-scan, probe, oracle-check)");
             }
         }},
        {"experiment.seed",
         [](const Ctx& c, const std::string& s) {
             if (!parse_u64(s, c.cfg.seed)) c.fail("expected an unsigned 64-bit integer, got '" + s + "'");
         }},
        {"experiment.output",
         [](const Ctx& c, const std::string& s) {
             if (s.empty()) c.fail("output path must not be empty");
             c.cfg.output = s;
         }},
        {"model.d",
         [](const Ctx& c, const std::string& s) {
             if (c.integer(s, c.cfg.d) && (c.cfg.d < 1 || c.cfg.d > 3)) c.fail("constraint d in {1, 2, 3} violated");
         }},
        {"model.J",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.J) && !(c.cfg.J >= 0)) c.fail("constraint J >= 0 violated");
         }},
        {"model.beta",
         [](const Ctx& c, const std::string& s) {
             if (c.real_list(s, c.cfg.beta)) check_all(c, c.cfg.beta, [](double b) { return b > 0; }, "beta > 0");
         }},
        {"model.h",
         [](const Ctx& c, const std::string& s) {
             if (c.real_list(s, c.cfg.h)) check_all(c, c.cfg.h, [](double h) { return h >= 0; }, "h >= 0");
         }},
        {"model.t",
         [](const Ctx& c, const std::string& s) {
             if (c.real_list(s, c.cfg.t)) check_all(c, c.cfg.t, [](double t) { return t > 0; }, "t > 0");
         }},
        {"model.L",
         [](const Ctx& c, const std::string& s) {
             if (c.int_list(s, c.cfg.L)) check_all(c, c.cfg.L, [](int L) { return L >= 2; }, "L >= 2");
         }},
        {"chain.mode",
         [](const Ctx& c, const std::string& s) {
             try {
                 c.cfg.mode = chain_mode_from_string(s);
             } catch (const std::exception&) {
                 c.fail("unknown chain mode '" + s + "' (initial, conditioned, restricted)");
             }
         }},
        {"chain.sweeps",
         [](const Ctx& c, const std::string& s) {
             if (c.integer(s, c.cfg.sweeps) && c.cfg.sweeps < 1) c.fail("constraint sweeps >= 1 violated");
         }},
        {"chain.burn_in",
         [](const Ctx& c, const std::string& s) {
             if (c.integer(s, c.cfg.burn_in) && c.cfg.burn_in < 0) c.fail("constraint burn_in >= 0 violated");
         }},
        {"chain.proposal_width",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.proposal_width) &&
                 !(c.cfg.proposal_width > 0 && c.cfg.proposal_width <= kPi)) {
                 c.fail("constraint 0 < proposal_width <= pi violated");
             }
         }},
        {"chain.start_angle", [](const Ctx& c, const std::string& s) { c.real(s, c.cfg.start_angle); }},
        {"chain.error_threshold",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.error_threshold) && !(c.cfg.error_threshold > 0)) {
                 c.fail("constraint error_threshold > 0 violated");
             }
         }},
        {"chain.write_traces", [](const Ctx& c, const std::string& s) { c.boolean(s, c.cfg.write_traces); }},
        {"kernel.tol",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.tol) && !(c.cfg.tol > 0)) c.fail("constraint tol > 0 violated");
         }},
        {"kernel.n_angles",
         [](const Ctx& c, const std::string& s) {
             if (c.integer(s, c.cfg.n_angles) && c.cfg.n_angles < 1) c.fail("constraint n_angles >= 1 violated");
         }},
        {"ground_state.full_log", [](const Ctx& c, const std::string& s) { c.boolean(s, c.cfg.full_log); }},
        {"ground_state.scan_t_min",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.scan_t_min) && !(c.cfg.scan_t_min > 0)) c.fail("constraint scan_t_min > 0 violated");
         }},
        {"ground_state.scan_t_max", [](const Ctx& c, const std::string& s) { c.real(s, c.cfg.scan_t_max); }},
        {"ground_state.scan_step",
         [](const Ctx& c, const std::string& s) {
             if (c.real(s, c.cfg.scan_step) && !(c.cfg.scan_step > 0)) c.fail("constraint scan_step > 0 violated");
         }},
        {"probe.r_in",
         [](const Ctx& c, const std::string& s) {
             if (c.int_list(s, c.cfg.r_in)) check_all(c, c.cfg.r_in, [](int r) { return r >= 1; }, "r_in >= 1");
         }},
        {"probe.annulus", [](const Ctx& c, const std::string& s) { c.boolean(s, c.cfg.annulus); }},
        {"oracle.n_bins",
         [](const Ctx& c, const std::string& s) {
             if (c.integer(s, c.cfg.n_bins) &&
                 (c.cfg.n_bins < 64 || (c.cfg.n_bins & (c.cfg.n_bins - 1)) != 0)) {
                 c.fail("constraint n_bins a power of two >= 64 violated");
             }
         }},
    };
    return table;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::kernel_table: return "kernel-table";
        case ExperimentKind::ground_state_sweep: return "ground-state-sweep";
        case ExperimentKind::window: return "window";
        case ExperimentKind::mc_scan: return "mc-scan";
        case ExperimentKind::probe: return "probe";
        case ExperimentKind::oracle_check: return "oracle-check";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::kernel_table, ExperimentKind::ground_state_sweep,
                   ExperimentKind::window, ExperimentKind::mc_scan, ExperimentKind::probe,
                   ExperimentKind::oracle_check}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

namespace {

std::string describe(const std::vector<ConfigViolation>& v) {
    std::string s = "invalid configuration:";
    for (const auto& x : v) {
        s += "\n  ";
        if (x.line > 0) s += "line " + std::to_string(x.line) + ": ";
        s += x.key + ": " + x.message;
    }
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    Violations out;
    std::map<std::string, int> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                out.push_back({line_no, line, "malformed section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            out.push_back({line_no, line, "expected 'key = value'"});
            continue;
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& table = handlers();
        const auto it = table.find(key);
        if (it == table.end()) {
            out.push_back({line_no, key, "unknown key"});
            continue;
        }
        if (auto prev = seen.find(key); prev != seen.end()) {
            out.push_back({line_no, key, "duplicate key (first set on line " +
                                             std::to_string(prev->second) + ")"});
            continue;
        }
        seen[key] = line_no;
        it->second(Ctx{cfg, out, line_no, key}, value);
    }

    auto line_of = [&](const std::string& key) {
        const auto it = seen.find(key);
        return it == seen.end() ? 0 : it->second;
    };
    if (!seen.count("experiment.kind")) out.push_back({0, "experiment.kind", "missing required key"});
    if (!seen.count("experiment.seed")) {
        out.push_back({0, "experiment.seed", "missing required key (no wall-clock seeding)"});
    }
    if (cfg.burn_in >= cfg.sweeps) {
        out.push_back({line_of("chain.burn_in"), "chain.burn_in", "constraint burn_in < sweeps violated"});
    }
    if (!(cfg.scan_t_max > cfg.scan_t_min)) {
        out.push_back({line_of("ground_state.scan_t_max"), "ground_state.scan_t_max",
                       "constraint scan_t_max > scan_t_min violated"});
    }
    if (!cfg.full_log && cfg.scan_t_min < kExpansionTMin &&
        (cfg.kind == ExperimentKind::window)) {
        out.push_back({line_of("ground_state.scan_t_min"), "ground_state.scan_t_min",
                       "constraint scan_t_min >= 1 (three-term expansion) violated"});
    }
    const bool needs_expansion =
        (cfg.kind == ExperimentKind::mc_scan && cfg.mode == ChainMode::restricted) ||
        (cfg.kind == ExperimentKind::ground_state_sweep && !cfg.full_log);
    if (needs_expansion) {
        for (double t : cfg.t) {
            if (t < kExpansionTMin) {
                out.push_back({line_of("model.t"), "model.t",
                               "constraint t >= 1 violated (three-term expansion requires t >= t_min)"});
                break;
            }
        }
    }
    if (cfg.kind == ExperimentKind::ground_state_sweep && cfg.full_log) {
        for (double t : cfg.t) {
            if (t < kFourierCrossover) {
                out.push_back({line_of("model.t"), "model.t", "constraint t >= 0.3 violated (full-log potential)"});
                break;
            }
        }
    }
    if (cfg.kind == ExperimentKind::mc_scan && cfg.mode == ChainMode::initial) {
        out.push_back({line_of("chain.mode"), "chain.mode",
                       "mc-scan needs mode conditioned or restricted"});
    }
    if (cfg.kind == ExperimentKind::window) {
        for (double h : cfg.h) {
            if (!(h > 0)) {
                out.push_back({line_of("model.h"), "model.h", "constraint h > 0 violated (window)"});
                break;
            }
        }
    }
    if (cfg.kind == ExperimentKind::oracle_check && cfg.d != 1) {
        out.push_back({line_of("model.d"), "model.d", "oracle-check requires d = 1"});
    }
    if (!out.empty()) {
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return (a.line == 0 ? INT32_MAX : a.line) < (b.line == 0 ? INT32_MAX : b.line);
        });
        throw ConfigError(std::move(out));
    }
    return cfg;
}

std::string to_canonical(const ExperimentConfig& c) {
    std::ostringstream s;
    s << "[experiment]\n"
      << "kind = " << to_string(c.kind) << "\n"
      << "seed = " << c.seed << "\n"
      << "output = " << c.output << "\n\n"
      << "[model]\n"
      << "d = " << c.d << "\n"
      << "J = " << format_double(c.J) << "\n"
      << "beta = " << join(c.beta) << "\n"
      << "h = " << join(c.h) << "\n"
      << "t = " << join(c.t) << "\n"
      << "L = " << join(c.L) << "\n\n"
      << "[chain]\n"
      << "mode = " << to_string(c.mode) << "\n"
      << "sweeps = " << c.sweeps << "\n"
      << "burn_in = " << c.burn_in << "\n"
      << "proposal_width = " << format_double(c.proposal_width) << "\n"
      << "start_angle = " << format_double(c.start_angle) << "\n"
      << "error_threshold = " << format_double(c.error_threshold) << "\n"
      << "write_traces = " << (c.write_traces ? "true" : "false") << "\n\n"
      << "[kernel]\n"
      << "tol = " << format_double(c.tol) << "\n"
      << "n_angles = " << c.n_angles << "\n\n"
      << "[ground_state]\n"
      << "full_log = " << (c.full_log ? "true" : "false") << "\n"
      << "scan_t_min = " << format_double(c.scan_t_min) << "\n"
      << "scan_t_max = " << format_double(c.scan_t_max) << "\n"
      << "scan_step = " << format_double(c.scan_step) << "\n\n"
      << "[probe]\n"
      << "r_in = " << join(c.r_in) << "\n"
      << "annulus = " << (c.annulus ? "true" : "false") << "\n\n"
      << "[oracle]\n"
      << "n_bins = " << c.n_bins << "\n";
    return s.str();
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_canonical(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace xyflow
