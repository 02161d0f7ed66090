#include "mgs/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mgs/experiments.hpp"
#include "mgs/tensor_file.hpp"

namespace mgs::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

void Config::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(key, it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& text = it->second;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& v = it->second;
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key,
                                               const std::vector<std::int64_t>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& part : split(it->second, ',')) {
        if (const auto colon = part.find(':'); colon != std::string::npos) {
            const auto a = parse_int(key, trim(part.substr(0, colon)));
            const auto b = parse_int(key, trim(part.substr(colon + 1)));
            if (b < a || b - a > 100000) throw ConfigError(key + ": bad range '" + part + "'");
            for (auto v = a; v <= b; ++v) out.push_back(v);
        } else {
            out.push_back(parse_int(key, part));
        }
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto out = split(it->second, ',');
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::int64_t> trials;
    std::string strategies;
    std::string narrow_bits;
    std::optional<int> wide_bits;
    std::optional<bool> skipping;
    std::string weights;
    std::string inputs;
    std::string labels;
    std::string dir;
    std::optional<std::int64_t> samples;
};

Config merged(const Flags& f) {
    Config c = f.config.empty() ? Config{} : Config::load(f.config);
    if (f.seed) c.set("seed", std::to_string(*f.seed));
    if (!f.out.empty()) c.set("out", f.out);
    if (f.trials) c.set("trials", std::to_string(*f.trials));
    if (!f.strategies.empty()) c.set("strategies", f.strategies);
    if (!f.narrow_bits.empty()) c.set("narrow_bits", f.narrow_bits);
    if (f.wide_bits) c.set("wide_bits", std::to_string(*f.wide_bits));
    if (f.skipping) c.set("skipping", *f.skipping ? "true" : "false");
    if (!f.weights.empty()) c.set("weights", f.weights);
    if (!f.inputs.empty()) c.set("inputs", f.inputs);
    if (!f.labels.empty()) c.set("labels", f.labels);
    if (!f.dir.empty()) c.set("dir", f.dir);
    if (f.samples) c.set("samples", std::to_string(*f.samples));
    return c;
}

std::vector<int> to_ints(const std::vector<std::int64_t>& v, const char* key) {
    std::vector<int> out;
    for (const auto x : v) {
        if (x < -1'000'000 || x > 1'000'000) throw ConfigError(std::string(key) + ": value out of range");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::uint64_t get_seed(const Config& c) {
    const auto s = c.get_int("seed", 1);
    if (s < 0) throw ConfigError("seed: must be nonnegative");
    return static_cast<std::uint64_t>(s);
}

void emit(const Config& c, const std::string& csv, std::ostream& out) {
    const std::string path = c.get_string("out", "-");
    if (path == "-") {
        out << csv;
        return;
    }
    const std::filesystem::path p(path);
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f << csv;
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, p);
}

const std::vector<std::string> kCommon = {"seed", "out", "trials"};

std::vector<std::string> with_common(std::vector<std::string> keys) {
    keys.insert(keys.end(), kCommon.begin(), kCommon.end());
    return keys;
}

std::string cmd_error_curve(const Config& c) {
    c.require_known(with_common({"lengths", "sigma", "strategies", "skipping"}));
    experiments::ErrorCurveConfig cfg;
    cfg.lengths = c.get_int_list("lengths", cfg.lengths);
    cfg.trials = c.get_int("trials", cfg.trials);
    cfg.sigma = c.get_double("sigma", cfg.sigma);
    cfg.seed = get_seed(c);
    cfg.skipping = c.get_bool("skipping", cfg.skipping);
    cfg.strategies = c.get_string_list("strategies", cfg.strategies);
    for (const auto& s : cfg.strategies) {
        if (std::find(experiments::kErrorCurveStrategies.begin(), experiments::kErrorCurveStrategies.end(), s) ==
            experiments::kErrorCurveStrategies.end()) {
            throw ConfigError("strategies: unknown strategy '" + s + "'");
        }
    }
    if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
    return experiments::error_curve_csv(experiments::run_error_curve(cfg));
}

std::string cmd_overflow_prob(const Config& c) {
    c.require_known(with_common({"k", "acc_bits", "sigma_w", "sigma_x", "w_bits", "x_bits"}));
    experiments::OverflowProbConfig cfg;
    cfg.ks = c.get_int_list("k", cfg.ks);
    std::vector<std::int64_t> bits(cfg.acc_bits.begin(), cfg.acc_bits.end());
    cfg.acc_bits = to_ints(c.get_int_list("acc_bits", bits), "acc_bits");
    cfg.sigma_w = c.get_double("sigma_w", cfg.sigma_w);
    cfg.sigma_x = c.get_double("sigma_x", cfg.sigma_x);
    cfg.w_bits = static_cast<int>(c.get_int("w_bits", cfg.w_bits));
    cfg.x_bits = static_cast<int>(c.get_int("x_bits", cfg.x_bits));
    cfg.trials = c.get_int("trials", cfg.trials);
    cfg.seed = get_seed(c);
    if (!(cfg.sigma_w > 0) || !(cfg.sigma_x > 0)) throw ConfigError("sigma_w, sigma_x: must be positive");
    if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
    return experiments::overflow_prob_csv(experiments::run_overflow_prob(cfg));
}

std::string cmd_markov_validate(const Config& c) {
    c.require_known(with_common({"acc_bits", "sigma_w", "sigma_x", "w_bits", "x_bits", "pmf_samples"}));
    experiments::MarkovValidateConfig cfg;
    std::vector<std::int64_t> bits(cfg.acc_bits.begin(), cfg.acc_bits.end());
    cfg.acc_bits = to_ints(c.get_int_list("acc_bits", bits), "acc_bits");
    cfg.sigma_w = c.get_double("sigma_w", cfg.sigma_w);
    cfg.sigma_x = c.get_double("sigma_x", cfg.sigma_x);
    cfg.w_bits = static_cast<int>(c.get_int("w_bits", cfg.w_bits));
    cfg.x_bits = static_cast<int>(c.get_int("x_bits", cfg.x_bits));
    cfg.pmf_samples = c.get_int("pmf_samples", cfg.pmf_samples);
    cfg.trials = c.get_int("trials", cfg.trials);
    cfg.seed = get_seed(c);
    if (!(cfg.sigma_w > 0) || !(cfg.sigma_x > 0)) throw ConfigError("sigma_w, sigma_x: must be positive");
    if (cfg.trials < 1 || cfg.pmf_samples < 1) throw ConfigError("trials, pmf_samples: must be >= 1");
    return experiments::markov_validate_csv(experiments::run_markov_validate(cfg));
}

std::string cmd_mlp_infer(const Config& c) {
    c.require_known(
        with_common({"weights", "inputs", "labels", "strategies", "narrow_bits", "wide_bits", "w_bits", "x_bits"}));
    experiments::MlpInferConfig cfg;
    const auto weights = c.get_string_list("weights", {});
    if (weights.size() != 2) throw ConfigError("weights: expected two comma-separated TensorFile paths");
    cfg.files.w1 = weights[0];
    cfg.files.w2 = weights[1];
    cfg.files.inputs = c.get_string("inputs", "");
    cfg.files.labels = c.get_string("labels", "");
    if (cfg.files.inputs.empty() || cfg.files.labels.empty()) throw ConfigError("inputs, labels: required");
    cfg.strategies = c.get_string_list("strategies", cfg.strategies);
    std::vector<std::int64_t> nb(cfg.narrow_bits.begin(), cfg.narrow_bits.end());
    cfg.narrow_bits = to_ints(c.get_int_list("narrow_bits", nb), "narrow_bits");
    cfg.wide_bits = static_cast<int>(c.get_int("wide_bits", cfg.wide_bits));
    cfg.w_bits = static_cast<int>(c.get_int("w_bits", cfg.w_bits));
    cfg.x_bits = static_cast<int>(c.get_int("x_bits", cfg.x_bits));
    for (const auto& s : cfg.strategies) accum::IntStrategy::parse(s, 32);
    for (const int b : cfg.narrow_bits) {
        if (b < 2 || b > 64) throw ConfigError("narrow_bits: must be in [2, 64]");
    }
    if (cfg.wide_bits < 2 || cfg.wide_bits > 64) throw ConfigError("wide_bits: must be in [2, 64]");
    if (cfg.w_bits < 2 || cfg.w_bits > 8 || cfg.x_bits < 2 || cfg.x_bits > 8) {
        throw ConfigError("w_bits, x_bits: must be in [2, 8]");
    }
    return experiments::mlp_infer_csv(experiments::run_mlp_infer(cfg));
}

std::string cmd_gen_mlp(const Config& c) {
    c.require_known({"seed", "dir", "samples"});
    const std::string dir = c.get_string("dir", "");
    if (dir.empty()) throw ConfigError("dir: required");
    const auto samples = c.get_int("samples", 200);
    if (samples < 1) throw ConfigError("samples: must be >= 1");
    const auto files = experiments::generate_mlp(dir, samples, get_seed(c));
    return "file\n" + files.w1.string() + "\n" + files.w2.string() + "\n" + files.inputs.string() + "\n" +
           files.labels.string() + "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Markov greedy summation experiments", "mgs"};
    app.require_subcommand(1);
    Flags flags;

    const auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--config", flags.config, "key=value settings file");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--out", flags.out, "output CSV path ('-' for stdout)");
    };
    const auto add_trials = [&flags](CLI::App* sub) {
        sub->add_option("--trials", flags.trials, "trials per grid point")->check(CLI::PositiveNumber);
    };

    auto* ec = app.add_subcommand("error-curve", "FP8 dot-product error vs length");
    add_common(ec);
    add_trials(ec);
    ec->add_option("--strategies", flags.strategies, "comma list: sequential,pairwise,kahan,mgs_narrow,mgs_full");
    ec->add_option("--skipping", flags.skipping, "skip subnormal-cutoff products in mgs_full");

    auto* op = app.add_subcommand("overflow-prob", "CLT overflow probability and Monte Carlo check");
    add_common(op);
    add_trials(op);

    auto* mv = app.add_subcommand("markov-validate", "Markov chain overflow-free length vs simulation");
    add_common(mv);
    add_trials(mv);

    auto* sc = app.add_subcommand("skip-census", "FP8 operand pairs below the subnormal cutoff");
    add_common(sc);

    auto* mi = app.add_subcommand("mlp-infer", "quantized MLP inference under integer strategies");
    add_common(mi);
    mi->add_option("--weights", flags.weights, "two comma-separated TensorFile paths (layer 1, layer 2)");
    mi->add_option("--inputs", flags.inputs, "f32 TensorFile [samples, features]");
    mi->add_option("--labels", flags.labels, "CSV with header index,label");
    mi->add_option("--strategies", flags.strategies, "comma list: wide,clip,wrap,pairwise,sorted,ags,mgs");
    mi->add_option("--narrow-bits", flags.narrow_bits, "narrow accumulator widths, e.g. 10,12 or 10:14");
    mi->add_option("--wide-bits", flags.wide_bits, "wide accumulator width");

    auto* dt = app.add_subcommand("dump-table", "the 256 E4M3 patterns");
    add_common(dt);

    auto* gm = app.add_subcommand("gen-mlp", "write the seeded synthetic MLP and inputs");
    gm->add_option("--config", flags.config, "key=value settings file");
    gm->add_option("--seed", flags.seed, "master seed");
    gm->add_option("--dir", flags.dir, "output directory");
    gm->add_option("--samples", flags.samples, "number of input samples")->check(CLI::PositiveNumber);

    std::string command = argc > 1 ? argv[1] : "";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: command=" << (command.empty() ? "-" : command) << " kind=usage message=" << one_line(e.what())
            << '\n';
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    command = sub->get_name();
    try {
        const Config c = merged(flags);
        std::string csv;
        if (sub == ec) {
            csv = cmd_error_curve(c);
        } else if (sub == op) {
            csv = cmd_overflow_prob(c);
        } else if (sub == mv) {
            csv = cmd_markov_validate(c);
        } else if (sub == sc) {
            c.require_known({"seed", "out"});
            csv = experiments::skip_census_csv();
        } else if (sub == mi) {
            csv = cmd_mlp_infer(c);
        } else if (sub == dt) {
            c.require_known({"seed", "out"});
            csv = experiments::dump_table_csv();
        } else {
            csv = cmd_gen_mlp(c);
            out << csv;
            return 0;
        }
        emit(c, csv, out);
        return 0;
    } catch (const ConfigError& e) {
        err << "error: command=" << command << " kind=config message=" << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: command=" << command << " kind=config message=" << one_line(e.what()) << '\n';
        return 2;
    } catch (const tensor_file::FormatError& e) {
        err << "error: command=" << command << " kind=input message=" << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: command=" << command << " kind=runtime message=" << one_line(e.what()) << '\n';
        return 1;
    }
}

}  // namespace mgs::cli
