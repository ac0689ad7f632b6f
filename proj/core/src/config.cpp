#include "bellsim/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "bellsim/errors.hpp"

namespace bellsim {
namespace {

struct RawValue {
    std::string text;
    int line = 0;
    bool used = false;
};

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const RawValue& raw, const std::string& key) {
    const std::string& s = raw.text;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || trim(end)[0] != '\0' || errno == ERANGE) {
        fail(raw.line, "key '" + key + "': expected a number, got '" + s + "'");
    }
    return v;
}

// Angles accept a trailing `deg` unit; bare numbers are radians.
double parse_angle(const RawValue& raw, const std::string& key) {
    const std::string& s = raw.text;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || errno == ERANGE) {
        fail(raw.line, "key '" + key + "': expected an angle, got '" + s + "'");
    }
    std::string rest = trim(end);
    if (rest == "deg") return v * (kPi / 180.0);
    if (!rest.empty()) {
        fail(raw.line, "key '" + key + "': trailing text '" + rest + "'");
    }
    return v;
}

std::uint64_t parse_u64(const RawValue& raw, const std::string& key) {
    const std::string& s = raw.text;
    if (!s.empty() && s[0] == '-') {
        fail(raw.line, "key '" + key + "': expected a nonnegative integer, got '" + s + "'");
    }
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || trim(end)[0] != '\0' || errno == ERANGE) {
        fail(raw.line, "key '" + key + "': expected a nonnegative integer, got '" + s + "'");
    }
    return v;
}

int parse_int(const RawValue& raw, const std::string& key) {
    auto v = parse_u64(raw, key);
    if (v > 1000000) fail(raw.line, "key '" + key + "': value out of range");
    return static_cast<int>(v);
}

bool parse_bool(const RawValue& raw, const std::string& key) {
    const std::string& s = raw.text;
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    fail(raw.line, "key '" + key + "': expected true/false, got '" + s + "'");
}

std::vector<double> parse_double_list(const RawValue& raw, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(raw.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(raw.line, "key '" + key + "': empty list element");
        out.push_back(parse_double(RawValue{item, raw.line}, key));
    }
    if (out.empty()) fail(raw.line, "key '" + key + "': empty list");
    return out;
}

ExperimentKind parse_experiment(const RawValue& raw) {
    const std::string& s = raw.text;
    if (s == "photon_I") return ExperimentKind::PhotonI;
    if (s == "photon_II") return ExperimentKind::PhotonII;
    if (s == "photon_III") return ExperimentKind::PhotonIII;
    if (s == "neutron") return ExperimentKind::Neutron;
    if (s == "neutron_random_chi") return ExperimentKind::NeutronRandomChi;
    fail(raw.line, "unknown experiment '" + s + "'");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_domain(const RunConfig& cfg) {
    if (!(cfg.tau > 0.0)) throw ConfigError("domain: tau must be positive");
    if (!(cfg.T0 > cfg.tau)) throw ConfigError("domain: T0 must exceed tau");
    for (double W : cfg.W) {
        if (!(W >= cfg.tau)) throw ConfigError("domain: every W must be at least tau");
    }
    if (cfg.n_pairs == 0) throw ConfigError("domain: n_pairs must be at least 1");
    if (cfg.n_per_setting == 0) throw ConfigError("domain: n_per_setting must be at least 1");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
        throw ConfigError("domain: gamma must lie in (0,1)");
    }
    if (!(cfg.R > 0.0 && cfg.R < 1.0)) throw ConfigError("domain: R must lie in (0,1)");
    if (cfg.phi_points < 2) throw ConfigError("domain: phi_points must be at least 2");
    if (cfg.grid_points < 2) throw ConfigError("domain: grid_points must be at least 2");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    std::map<std::string, RawValue> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (value.empty()) fail(lineno, "key '" + key + "': empty value");
        if (!kv.emplace(key, RawValue{value, lineno}).second) {
            fail(lineno, "duplicate key '" + key + "'");
        }
    }

    auto take = [&kv](const char* key) -> RawValue* {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };

    RunConfig cfg;
    if (RawValue* raw = take("experiment")) {
        cfg.experiment = parse_experiment(*raw);
    } else {
        throw ConfigError("config: missing required key 'experiment'");
    }
    if (RawValue* raw = take("seed")) cfg.seed = parse_u64(*raw, "seed");
    if (RawValue* raw = take("out_dir")) cfg.out_dir = raw->text;
    if (RawValue* raw = take("run_name")) cfg.run_name = raw->text;
    if (RawValue* raw = take("n_pairs")) cfg.n_pairs = parse_u64(*raw, "n_pairs");
    if (RawValue* raw = take("T0")) cfg.T0 = parse_double(*raw, "T0");
    if (RawValue* raw = take("tau")) cfg.tau = parse_double(*raw, "tau");
    if (RawValue* raw = take("W")) cfg.W = parse_double_list(*raw, "W");
    if (RawValue* raw = take("phi_points")) cfg.phi_points = parse_int(*raw, "phi_points");
    if (RawValue* raw = take("a1")) cfg.a1 = parse_angle(*raw, "a1");
    if (RawValue* raw = take("a1_prime")) cfg.a1_prime = parse_angle(*raw, "a1_prime");
    if (RawValue* raw = take("a2")) cfg.a2 = parse_angle(*raw, "a2");
    if (RawValue* raw = take("a2_prime")) cfg.a2_prime = parse_angle(*raw, "a2_prime");
    if (RawValue* raw = take("xi")) cfg.xi = parse_angle(*raw, "xi");
    if (RawValue* raw = take("eta1")) cfg.eta1 = parse_angle(*raw, "eta1");
    if (RawValue* raw = take("eta2")) cfg.eta2 = parse_angle(*raw, "eta2");
    if (RawValue* raw = take("gamma")) cfg.gamma = parse_double(*raw, "gamma");
    if (RawValue* raw = take("R")) cfg.R = parse_double(*raw, "R");
    if (RawValue* raw = take("n_per_setting")) {
        cfg.n_per_setting = parse_u64(*raw, "n_per_setting");
    }
    if (RawValue* raw = take("warmup")) cfg.warmup = parse_u64(*raw, "warmup");
    if (RawValue* raw = take("grid_points")) cfg.grid_points = parse_int(*raw, "grid_points");
    if (RawValue* raw = take("alpha")) cfg.alpha = parse_angle(*raw, "alpha");
    if (RawValue* raw = take("chi0")) cfg.chi0 = parse_angle(*raw, "chi0");
    if (RawValue* raw = take("chi1")) cfg.chi1 = parse_angle(*raw, "chi1");
    if (RawValue* raw = take("flipper_on")) cfg.flipper_on = parse_bool(*raw, "flipper_on");

    for (const auto& [key, raw] : kv) {
        if (!raw.used) fail(raw.line, "unknown key '" + key + "'");
    }
    check_domain(cfg);
    return cfg;
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "experiment = " << experiment_name(cfg.experiment) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "out_dir = " << cfg.out_dir << "\n";
    if (!cfg.run_name.empty()) os << "run_name = " << cfg.run_name << "\n";
    os << "n_pairs = " << cfg.n_pairs << "\n";
    os << "T0 = " << fmt_double(cfg.T0) << "\n";
    os << "tau = " << fmt_double(cfg.tau) << "\n";
    os << "W = ";
    for (std::size_t i = 0; i < cfg.W.size(); ++i) {
        if (i) os << ",";
        os << fmt_double(cfg.W[i]);
    }
    os << "\n";
    os << "phi_points = " << cfg.phi_points << "\n";
    os << "a1 = " << fmt_double(cfg.a1) << "\n";
    os << "a1_prime = " << fmt_double(cfg.a1_prime) << "\n";
    os << "a2 = " << fmt_double(cfg.a2) << "\n";
    os << "a2_prime = " << fmt_double(cfg.a2_prime) << "\n";
    os << "xi = " << fmt_double(cfg.xi) << "\n";
    os << "eta1 = " << fmt_double(cfg.eta1) << "\n";
    os << "eta2 = " << fmt_double(cfg.eta2) << "\n";
    os << "gamma = " << fmt_double(cfg.gamma) << "\n";
    os << "R = " << fmt_double(cfg.R) << "\n";
    os << "n_per_setting = " << cfg.n_per_setting << "\n";
    os << "warmup = " << cfg.warmup << "\n";
    os << "grid_points = " << cfg.grid_points << "\n";
    os << "alpha = " << fmt_double(cfg.alpha) << "\n";
    os << "chi0 = " << fmt_double(cfg.chi0) << "\n";
    os << "chi1 = " << fmt_double(cfg.chi1) << "\n";
    os << "flipper_on = " << (cfg.flipper_on ? "true" : "false") << "\n";
    return os.str();
}

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::PhotonI: return "photon_I";
        case ExperimentKind::PhotonII: return "photon_II";
        case ExperimentKind::PhotonIII: return "photon_III";
        case ExperimentKind::Neutron: return "neutron";
        case ExperimentKind::NeutronRandomChi: return "neutron_random_chi";
    }
    return "unknown";
}

} // namespace bellsim
