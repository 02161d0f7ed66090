#pragma once

// Command-line front end. Subcommands:
//
//   error-curve      FP8 dot-product error vs length per summation strategy
//   overflow-prob    CLT overflow probability next to a Monte Carlo estimate
//   markov-validate  Markov-chain overflow-free length vs direct simulation
//   skip-census      count of FP8 operand pairs below the subnormal cutoff
//   mlp-infer        quantized MLP inference under integer strategies
//   dump-table       the 256 E4M3 patterns and their values
//   gen-mlp          write the seeded synthetic MLP used by mlp-infer
//
// Settings come from a key=value file (--config) overridden by flags.
// Failures print one line "error: command=<name> kind=<kind> message=<text>"
// to stderr and exit with 2 (usage or config) or 1 (runtime).

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgs::cli {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flat key=value settings. '#' starts a comment; blank lines are ignored.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Throws ConfigError naming the first key outside `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated integers; "a:b" expands to a..b inclusive.
    std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& fallback) const;

private:
    std::map<std::string, std::string> values_;
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgs::cli
