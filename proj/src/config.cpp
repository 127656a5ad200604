#include "mcfh/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mcfh {

double TomlValue::as_number() const {
    if (auto* d = std::get_if<double>(&v)) return *d;
    if (auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    throw error("config value is not a number");
}

bool TomlValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw error("config value is not a boolean");
}

const std::string& TomlValue::as_string() const {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    throw error("config value is not a string");
}

const std::vector<double>& TomlValue::as_array() const {
    if (auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    throw error("config value is not a numeric array");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"') in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

TomlValue parse_scalar(const std::string& tok, int lineno) {
    TomlValue val;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        val.v = tok.substr(1, tok.size() - 2);
        return val;
    }
    if (tok == "true") {
        val.v = true;
        return val;
    }
    if (tok == "false") {
        val.v = false;
        return val;
    }
    char* end = nullptr;
    double d = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
        std::ostringstream os;
        os << "config line " << lineno << ": cannot parse value '" << tok << "'";
        throw error(os.str());
    }
    val.v = d;
    return val;
}

TomlValue parse_value(const std::string& raw, int lineno) {
    std::string tok = trim(raw);
    if (tok.empty()) throw error("config: empty value");
    if (tok.front() != '[') return parse_scalar(tok, lineno);
    if (tok.back() != ']') throw error("config: unterminated array");
    std::string inner = tok.substr(1, tok.size() - 2);
    std::vector<std::string> parts;
    std::string cur;
    bool in_str = false;
    for (char c : inner) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) parts.push_back(cur);
    TomlValue val;
    bool strings = false;
    for (const auto& p : parts)
        if (!trim(p).empty() && trim(p).front() == '"') strings = true;
    if (strings) {
        std::vector<std::string> out;
        for (const auto& p : parts) out.push_back(parse_scalar(trim(p), lineno).as_string());
        val.v = out;
    } else {
        std::vector<double> out;
        for (const auto& p : parts) out.push_back(parse_scalar(trim(p), lineno).as_number());
        val.v = out;
    }
    return val;
}

}  // namespace

Toml Toml::parse(const std::string& text) {
    Toml t;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream os;
                os << "config line " << lineno << ": malformed section header";
                throw error(os.str());
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << lineno << ": expected key = value";
            throw error(os.str());
        }
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw error("config: empty key");
        std::string full = section.empty() ? key : section + "." + key;
        t.values_[full] = parse_value(line.substr(eq + 1), lineno);
    }
    return t;
}

Toml Toml::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

double Toml::number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw error("missing config key '" + key + "'");
    return it->second.as_number();
}

double Toml::number_or(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.as_number();
}

long long Toml::integer(const std::string& key) const {
    double d = number(key);
    auto n = static_cast<long long>(std::llround(d));
    if (std::abs(d - n) > 1e-9) throw error("config key '" + key + "' is not an integer");
    return n;
}

long long Toml::integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool Toml::boolean_or(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.as_bool();
}

std::string Toml::str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw error("missing config key '" + key + "'");
    return it->second.as_string();
}

std::string Toml::str_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.as_string();
}

std::vector<double> Toml::array(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw error("missing config key '" + key + "'");
    return it->second.as_array();
}

std::vector<double> Toml::array_or(const std::string& key,
                                   std::vector<double> fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.as_array();
}

Scenario parse_scenario(const std::string& name) {
    if (name == "simulate") return Scenario::simulate;
    if (name == "obstacle") return Scenario::obstacle;
    if (name == "speeds") return Scenario::speeds;
    if (name == "sweep") return Scenario::sweep;
    if (name == "finger") return Scenario::finger;
    if (name == "laminar") return Scenario::laminar;
    if (name == "discrepancy") return Scenario::discrepancy;
    if (name == "lcp") return Scenario::lcp;
    throw error("unknown scenario '" + name +
                "' (expected simulate, obstacle, speeds, sweep, finger, laminar, "
                "discrepancy, or lcp)");
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::simulate: return "simulate";
        case Scenario::obstacle: return "obstacle";
        case Scenario::speeds: return "speeds";
        case Scenario::sweep: return "sweep";
        case Scenario::finger: return "finger";
        case Scenario::laminar: return "laminar";
        case Scenario::discrepancy: return "discrepancy";
        case Scenario::lcp: return "lcp";
    }
    return "?";
}

RunConfig RunConfig::load(const std::string& path, const std::string& out_override,
                          int workers_override) {
    RunConfig cfg;
    cfg.toml = Toml::parse_file(path);
    cfg.scenario = parse_scenario(cfg.toml.str("run.scenario"));
    cfg.out_dir = out_override.empty() ? cfg.toml.str_or("run.out_dir", ".") : out_override;
    cfg.seed = static_cast<std::uint64_t>(cfg.toml.integer_or("run.seed", 1));
    if (workers_override > 0) {
        cfg.workers = workers_override;
    } else if (const char* env = std::getenv("MCFHOMOG_WORKERS")) {
        char* end = nullptr;
        long w = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || w < 1)
            throw error("MCFHOMOG_WORKERS must be a positive integer");
        cfg.workers = static_cast<int>(w);
    } else {
        cfg.workers = static_cast<int>(cfg.toml.integer_or("run.workers", 1));
    }
    if (cfg.workers < 1) throw error("workers must be >= 1");
    return cfg;
}

ForcingField forcing_from_config(const Toml& t, int dim) {
    std::string kind = t.str_or("forcing.kind", "constant");
    if (kind == "constant") return make_constant_forcing(dim, t.number_or("forcing.value", 1.0));
    if (kind == "sinusoidal")
        return make_sinusoidal_forcing(dim, t.number_or("forcing.base", 2.0),
                                       t.number_or("forcing.amplitude", 0.5));
    if (kind == "csv") {
        std::string path = t.str("forcing.path");
        std::ifstream in(path);
        if (!in) throw error("cannot open forcing sample file " + path);
        std::vector<double> samples;
        double v;
        while (in >> v) {
            samples.push_back(v);
            if (in.peek() == ',') in.get();
        }
        auto sh = t.array("forcing.shape");
        std::vector<int> shape;
        for (double s : sh) shape.push_back(static_cast<int>(std::llround(s)));
        return make_grid_sampled_forcing(dim, samples, shape);
    }
    if (kind == "corollary") {
        auto cf = corollary_from_config(t);
        if (!cf) throw error("corollary forcing requested but [corollary] is incomplete");
        return make_laminar(cf->gprime);
    }
    throw error("unknown forcing kind '" + kind +
                "' (expected constant, sinusoidal, csv, or corollary)");
}

std::optional<CorollaryForcing> corollary_from_config(const Toml& t) {
    CorollaryParams p = reference_corollary_params();
    p.n = static_cast<int>(t.integer_or("corollary.n", p.n));
    p.r1 = t.number_or("corollary.r1", p.r1);
    p.r2 = t.number_or("corollary.r2", p.r2);
    p.R = t.number_or("corollary.R", p.R);
    p.sigma = t.number_or("corollary.sigma", p.sigma);
    p.g_high = t.number_or("corollary.g_high", p.g_high);
    p.g_low = t.number_or("corollary.g_low", p.g_low);
    if (t.has("corollary.y1")) {
        auto a = t.array("corollary.y1");
        for (size_t i = 0; i < a.size() && i < 3; ++i) p.y1[i] = a[i];
    }
    if (t.has("corollary.y2")) {
        auto a = t.array("corollary.y2");
        for (size_t i = 0; i < a.size() && i < 3; ++i) p.y2[i] = a[i];
    }
    return make_corollary_forcing(p);
}

}  // namespace mcfh
