#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mcfh/forcing.hpp"
#include "mcfh/levelset.hpp"

namespace mcfh {

// Minimal TOML reader covering the subset used by run configs: [section]
// headers, key = value with string/number/boolean/array values, and #
// comments. Keys are stored flattened as "section.key".
struct TomlValue {
    std::variant<double, bool, std::string, std::vector<double>,
                 std::vector<std::string>> v;
    double as_number() const;
    bool as_bool() const;
    const std::string& as_string() const;
    const std::vector<double>& as_array() const;
};

class Toml {
  public:
    static Toml parse_file(const std::string& path);
    static Toml parse(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long long integer(const std::string& key) const;
    long long integer_or(const std::string& key, long long fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> array(const std::string& key) const;
    std::vector<double> array_or(const std::string& key, std::vector<double> fallback) const;
    const std::map<std::string, TomlValue>& items() const { return values_; }

  private:
    std::map<std::string, TomlValue> values_;
};

enum class Scenario { simulate, obstacle, speeds, sweep, finger, laminar, discrepancy, lcp };

struct RunConfig {
    Scenario scenario = Scenario::simulate;
    Toml toml;               // full parsed config for scenario-specific keys
    std::string out_dir = ".";
    int workers = 1;
    std::uint64_t seed = 1;

    static RunConfig load(const std::string& path, const std::string& out_override,
                          int workers_override);
};

Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario s);

// Builds the forcing field described by the [forcing] table (kind = constant,
// sinusoidal, csv, or corollary).
ForcingField forcing_from_config(const Toml& t, int dim);
std::optional<CorollaryForcing> corollary_from_config(const Toml& t);

}  // namespace mcfh
