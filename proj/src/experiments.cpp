#include "mgs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "mgs/overflow_model.hpp"
#include "mgs/quant.hpp"
#include "mgs/rng.hpp"
#include "mgs/tensor_file.hpp"

namespace mgs::experiments {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::size_t strategy_index(const std::string& name) {
    const auto it = std::find(kErrorCurveStrategies.begin(), kErrorCurveStrategies.end(), name);
    if (it == kErrorCurveStrategies.end()) {
        throw std::invalid_argument("unknown error-curve strategy '" + name + "'");
    }
    return static_cast<std::size_t>(it - kErrorCurveStrategies.begin());
}

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

double ErrorCurvePoint::mean() const {
    if (errors.empty()) return 0.0;
    double s = 0.0;
    for (const double e : errors) s += e;
    return s / static_cast<double>(errors.size());
}

double ErrorCurvePoint::median() const {
    if (errors.empty()) return 0.0;
    std::vector<double> v = errors;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void gaussian_fp8_pair(std::int64_t length, std::int64_t trial, double sigma, std::uint64_t seed,
                       std::vector<fp8::Fp8Value>& w, std::vector<fp8::Fp8Value>& x) {
    auto eng = rng::make_stream(seed, (static_cast<std::uint64_t>(length) << 32) ^ static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> normal(0.0, sigma);
    w.resize(static_cast<std::size_t>(length));
    x.resize(static_cast<std::size_t>(length));
    for (auto& v : w) v = fp8::encode_e4m3(normal(eng));
    for (auto& v : x) v = fp8::encode_e4m3(normal(eng));
}

std::vector<ErrorCurvePoint> run_error_curve(const ErrorCurveConfig& cfg, int threads) {
    if (cfg.lengths.empty() || cfg.strategies.empty()) {
        throw std::invalid_argument("error-curve: lengths and strategies must be nonempty");
    }
    if (cfg.trials < 1) throw std::invalid_argument("error-curve: trials must be >= 1");
    if (!(cfg.sigma > 0.0)) throw std::invalid_argument("error-curve: sigma must be positive");
    for (const auto n : cfg.lengths) {
        if (n < 1 || n > (1 << 20)) throw std::invalid_argument("error-curve: lengths must be in [1, 2^20]");
    }
    for (const auto& s : cfg.strategies) strategy_index(s);

    const std::size_t ns = kErrorCurveStrategies.size();
    const std::size_t nl = cfg.lengths.size();
    const auto nt = static_cast<std::size_t>(cfg.trials);
    // errors[(strategy * nl + length) * nt + trial]
    std::vector<double> errors(ns * nl * nt, 0.0);
    std::vector<char> fallback(nl * nt, 0);
    std::vector<char> mismatch(nl * nt, 0);

    rng::parallel_chunks(
        nl * nt,
        [&](std::size_t job) {
            const std::size_t li = job / nt;
            const std::size_t t = job % nt;
            std::vector<fp8::Fp8Value> w;
            std::vector<fp8::Fp8Value> x;
            gaussian_fp8_pair(cfg.lengths[li], static_cast<std::int64_t>(t), cfg.sigma, cfg.seed, w, x);

            double exact = 0.0;  // products of E4M3 values and their sums are exact in double here
            for (std::size_t i = 0; i < w.size(); ++i) exact += fp8::decode_e4m3(w[i]) * fp8::decode_e4m3(x[i]);
            const auto terms = accum::product_terms(w, x);
            std::vector<double> values(terms.size());
            std::int64_t oracle = 0;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                values[i] = terms[i].value();
                oracle += terms[i].is_zero ? 0 : terms[i].fixed_point();
            }

            double results[5];
            results[0] = accum::sum_sequential_fp8(terms).value;
            results[1] = accum::sum_pairwise_fp8(terms).value;
            results[2] = accum::sum_kahan(values, 4);
            accum::Fp8DotOptions narrow_only;
            narrow_only.narrow_only = true;
            results[3] = accum::mgs_fp8_dot(w, x, narrow_only).value;
            accum::Fp8DotOptions full_opts;
            full_opts.skipping = cfg.skipping;
            const auto full = accum::mgs_fp8_dot(w, x, full_opts);
            results[4] = full.value;
            mismatch[job] = full.exact_fixed_point != oracle ? 1 : 0;

            for (std::size_t s = 0; s < ns; ++s) {
                const auto err = accum::relative_error(results[s], exact);
                errors[(s * nl + li) * nt + t] = err.percent;
                if (err.absolute_fallback) fallback[job] = 1;
            }
        },
        threads);

    std::vector<ErrorCurvePoint> points;
    for (const auto& name : cfg.strategies) {
        const std::size_t s = strategy_index(name);
        for (std::size_t li = 0; li < nl; ++li) {
            ErrorCurvePoint p;
            p.strategy = name;
            p.length = cfg.lengths[li];
            const auto first = errors.begin() + static_cast<std::ptrdiff_t>((s * nl + li) * nt);
            p.errors.assign(first, first + static_cast<std::ptrdiff_t>(nt));
            for (std::size_t t = 0; t < nt; ++t) {
                p.absolute_fallbacks += fallback[li * nt + t];
                if (name == "mgs_full") p.oracle_mismatches += mismatch[li * nt + t];
            }
            points.push_back(std::move(p));
        }
    }
    std::sort(points.begin(), points.end(), [](const ErrorCurvePoint& a, const ErrorCurvePoint& b) {
        return std::tie(a.strategy, a.length) < std::tie(b.strategy, b.length);
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const ErrorCurvePoint& a, const ErrorCurvePoint& b) {
                                 return a.strategy == b.strategy && a.length == b.length;
                             }),
                 points.end());
    return points;
}

std::string error_curve_csv(const std::vector<ErrorCurvePoint>& points) {
    std::ostringstream out;
    out << "strategy,length,trials,mean_error_pct,median_error_pct,absolute_fallbacks,oracle_mismatches\n";
    for (const auto& p : points) {
        out << p.strategy << ',' << p.length << ',' << p.errors.size() << ',' << fmt(p.mean()) << ','
            << fmt(p.median()) << ',' << p.absolute_fallbacks << ',';
        if (p.strategy == "mgs_full") out << p.oracle_mismatches;
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::vector<OverflowProbRow> run_overflow_prob(const OverflowProbConfig& cfg, int threads) {
    if (cfg.ks.empty() || cfg.acc_bits.empty()) throw std::invalid_argument("overflow-prob: empty grid");
    if (cfg.trials < 1) throw std::invalid_argument("overflow-prob: trials must be >= 1");
    for (const auto k : cfg.ks) {
        if (k < 1) throw std::invalid_argument("overflow-prob: k must be >= 1");
    }
    for (const int a : cfg.acc_bits) {
        if (a < 2 || a > 62) throw std::invalid_argument("overflow-prob: acc_bits must be in [2, 62]");
    }
    if (cfg.w_bits < 2 || cfg.w_bits > 16 || cfg.x_bits < 2 || cfg.x_bits > 16) {
        throw std::invalid_argument("overflow-prob: w_bits and x_bits must be in [2, 16]");
    }
    const auto wd = overflow_model::IntDistribution::signed_normal(cfg.w_bits, cfg.sigma_w);
    const auto xd = overflow_model::IntDistribution::signed_normal(cfg.x_bits, cfg.sigma_x);
    wd.validate();
    xd.validate();

    std::vector<OverflowProbRow> rows;
    for (const auto k : cfg.ks) {
        for (const int a : cfg.acc_bits) {
            OverflowProbRow r;
            r.k = k;
            r.acc_bits = a;
            r.clt = overflow_model::clt_overflow_prob({cfg.sigma_w, cfg.sigma_x, k, a});
            const std::uint64_t stream = static_cast<std::uint64_t>(k) << 8 | static_cast<std::uint64_t>(a);
            r.monte_carlo = overflow_model::simulate_overflow_prob(wd, xd, k, a, cfg.trials,
                                                                   rng::stream_seed(cfg.seed, stream), threads);
            rows.push_back(r);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const OverflowProbRow& a, const OverflowProbRow& b) {
        return std::tie(a.k, a.acc_bits) < std::tie(b.k, b.acc_bits);
    });
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const OverflowProbRow& a, const OverflowProbRow& b) {
                               return a.k == b.k && a.acc_bits == b.acc_bits;
                           }),
               rows.end());
    return rows;
}

std::string overflow_prob_csv(const std::vector<OverflowProbRow>& rows) {
    std::ostringstream out;
    out << "k,acc_bits,clt,monte_carlo\n";
    for (const auto& r : rows) out << r.k << ',' << r.acc_bits << ',' << fmt(r.clt) << ',' << fmt(r.monte_carlo) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------

std::vector<MarkovValidateRow> run_markov_validate(const MarkovValidateConfig& cfg, int threads) {
    if (cfg.acc_bits.empty()) throw std::invalid_argument("markov-validate: empty acc_bits");
    for (const int a : cfg.acc_bits) {
        if (a < 2 || a > 16) throw std::invalid_argument("markov-validate: acc_bits must be in [2, 16]");
    }
    if (cfg.pmf_samples < 1 || cfg.trials < 1) {
        throw std::invalid_argument("markov-validate: pmf_samples and trials must be >= 1");
    }
    if (cfg.w_bits < 2 || cfg.w_bits > 16 || cfg.x_bits < 1 || cfg.x_bits > 16) {
        throw std::invalid_argument("markov-validate: bad operand widths");
    }
    using overflow_model::IntDistribution;
    const auto wd = IntDistribution::signed_normal(cfg.w_bits, cfg.sigma_w);
    const auto xd = IntDistribution::unsigned_half_normal(cfg.x_bits, cfg.sigma_x);
    wd.validate();
    xd.validate();

    auto weng = rng::make_stream(cfg.seed, 0);
    auto xeng = rng::make_stream(cfg.seed, 1);
    const auto ws = overflow_model::draw(wd, static_cast<std::size_t>(cfg.pmf_samples), weng);
    const auto xs = overflow_model::draw(xd, static_cast<std::size_t>(cfg.pmf_samples), xeng);
    const auto step = overflow_model::product_pmf(overflow_model::empirical_pmf(ws, wd.lo, wd.hi),
                                                  overflow_model::empirical_pmf(xs, xd.lo, xd.hi));

    std::vector<int> widths = cfg.acc_bits;
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    std::vector<MarkovValidateRow> rows;
    for (const int a : widths) {
        const auto range = accum::AccRange::twos_complement(a);
        MarkovValidateRow r;
        r.acc_bits = a;
        r.chain_length = overflow_model::expected_steps_to_overflow(
            overflow_model::build_transition_matrix(step, range.lo, range.hi), 0);
        r.simulated_length = overflow_model::simulate_overflow_free_length(
            wd, xd, range.lo, range.hi, cfg.trials, rng::stream_seed(cfg.seed, 100 + static_cast<std::uint64_t>(a)),
            threads);
        r.relative_difference = std::fabs(r.chain_length - r.simulated_length) / r.simulated_length;
        r.naive_bound_bits =
            cfg.w_bits + cfg.x_bits + static_cast<int>(std::ceil(std::log2(std::max(1.0, r.chain_length))));
        rows.push_back(r);
    }
    return rows;
}

std::string markov_validate_csv(const std::vector<MarkovValidateRow>& rows) {
    std::ostringstream out;
    out << "acc_bits,chain_expected_length,simulated_length,relative_difference,naive_bound_bits\n";
    for (const auto& r : rows) {
        out << r.acc_bits << ',' << fmt(r.chain_length) << ',' << fmt(r.simulated_length) << ','
            << fmt(r.relative_difference) << ',' << r.naive_bound_bits << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::string skip_census_csv() {
    const auto c = fp8::skip_census();
    const std::int64_t ref = fp8::SkipCensus::kReferenceCount;
    std::ostringstream out;
    const auto row = [&out](const std::string& metric, std::int64_t value, const std::string& note) {
        out << metric << ',' << value << ',' << csv_field(note) << '\n';
    };
    out << "metric,value,note\n";
    row("patterns", c.patterns, "all 256 E4M3 bit patterns, NaN and both zeros included");
    row("nan_patterns", c.nan_patterns, "S.1111.111; a pair with a NaN operand is never skippable");
    row("unordered_pairs", c.unordered_pairs, "C(256,2): unordered pairs of distinct bit patterns");
    row("skippable", c.skippable,
        "pairs with |a*b| < 2^-9 under the unordered distinct-pattern convention; +0 and -0 are distinct "
        "patterns and any pair containing a zero is skippable");
    row("reference_count", ref, "commonly quoted count of skippable pairs");
    row("deviation", c.skippable - ref, "skippable - reference_count");
    row("skippable_with_self_pairs", c.skippable_with_self_pairs, "unordered pairs including a == b");
    row("skippable_nonzero_operands", c.skippable_nonzero_operands, "unordered distinct pairs, both operands nonzero");
    row("ordered_skippable", c.ordered_skippable, "ordered pairs (a, b) over all 256 x 256");
    row("exponent_sum_ordered", c.exponent_sum_ordered,
        "ordered pairs whose biased exponent fields sum to <= 3, significands ignored; half of this count "
        "matches reference_count, its likely origin");
    return out.str();
}

std::string dump_table_csv() {
    std::ostringstream out;
    out << "pattern,sign,biased_exp,mantissa,value,class\n";
    for (int b = 0; b < 256; ++b) {
        const fp8::Fp8Value v(static_cast<std::uint8_t>(b));
        char hex[8];
        std::snprintf(hex, sizeof hex, "0x%02X", b);
        const double d = fp8::decode_e4m3(v);
        std::string value = fmt(d);
        if (d == 0.0 && std::signbit(d)) value = "-0";
        out << hex << ',' << (v.negative() ? 1 : 0) << ',' << v.exponent_field() << ',' << v.mantissa_field() << ','
            << value << ',' << fp8::to_string(fp8::classify(v)) << '\n';
    }
    return out.str();
}

}  // namespace mgs::experiments
