#include "mgs/overflow_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace mgs::overflow_model {

namespace {

constexpr double kStochasticTolerance = 1e-12;
constexpr double kSingularTolerance = 1e-12;
constexpr std::size_t kChunks = 64;

std::int64_t chunk_trials(std::int64_t trials, std::size_t chunk) {
    const auto n = static_cast<std::int64_t>(kChunks);
    return trials / n + (static_cast<std::int64_t>(chunk) < trials % n ? 1 : 0);
}

void require_range(std::int64_t lo, std::int64_t hi, const char* op) {
    if (lo > hi) {
        throw std::invalid_argument(std::string(op) + ": empty accumulator range");
    }
}

}  // namespace

void CltParams::validate() const {
    if (!(sigma_w > 0.0) || !(sigma_x > 0.0) || k < 1 || acc_bits < 2) {
        throw std::invalid_argument("CltParams: sigmas and k must be positive, acc_bits >= 2");
    }
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double clt_overflow_prob(const CltParams& p) {
    p.validate();
    const double threshold = std::ldexp(1.0, p.acc_bits - 1);
    const double sd = p.sigma_w * p.sigma_x * std::sqrt(static_cast<double>(p.k));
    return 2.0 * standard_normal_cdf(-threshold / sd);
}

// ---------------------------------------------------------------------------

double Pmf::at(std::int64_t v) const {
    if (v < lo || v > hi()) return 0.0;
    return probs[static_cast<std::size_t>(v - lo)];
}

double Pmf::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += probs[i] * static_cast<double>(lo + static_cast<std::int64_t>(i));
    return m;
}

void Pmf::validate() const {
    if (probs.empty()) {
        throw std::invalid_argument("Pmf: empty support");
    }
    double total = 0.0;
    for (const double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("Pmf: probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::fabs(total - 1.0) > kStochasticTolerance) {
        throw std::invalid_argument("Pmf: probabilities do not sum to 1");
    }
}

Pmf Pmf::uniform(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
        throw std::invalid_argument("Pmf::uniform: empty support");
    }
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    return {lo, std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Pmf Pmf::point_mass(std::int64_t v) { return {v, {1.0}}; }

Pmf empirical_pmf(std::span<const std::int64_t> samples, std::int64_t lo, std::int64_t hi) {
    if (samples.empty()) {
        throw std::invalid_argument("empirical_pmf: no samples");
    }
    if (lo > hi) {
        throw std::invalid_argument("empirical_pmf: empty support");
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto s : samples) {
        if (s < lo || s > hi) {
            throw std::invalid_argument("empirical_pmf: sample " + std::to_string(s) + " outside support");
        }
        ++counts[static_cast<std::size_t>(s - lo)];
    }
    Pmf pmf{lo, std::vector<double>(counts.size())};
    const auto n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < counts.size(); ++i) pmf.probs[i] = static_cast<double>(counts[i]) / n;
    return pmf;
}

Pmf product_pmf(const Pmf& pw, const Pmf& px) {
    pw.validate();
    px.validate();
    const std::int64_t corners[] = {pw.lo * px.lo, pw.lo * px.hi(), pw.hi() * px.lo, pw.hi() * px.hi()};
    const std::int64_t lo = *std::min_element(std::begin(corners), std::end(corners));
    const std::int64_t hi = *std::max_element(std::begin(corners), std::end(corners));
    Pmf out{lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0)};
    for (std::size_t i = 0; i < pw.probs.size(); ++i) {
        if (pw.probs[i] == 0.0) continue;
        const std::int64_t w = pw.lo + static_cast<std::int64_t>(i);
        for (std::size_t j = 0; j < px.probs.size(); ++j) {
            const std::int64_t x = px.lo + static_cast<std::int64_t>(j);
            out.probs[static_cast<std::size_t>(w * x - lo)] += pw.probs[i] * px.probs[j];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t TransitionMatrix::index_of(std::int64_t state) const {
    if (state < lo || state > hi) return overflow_index();
    return static_cast<std::size_t>(state - lo);
}

void TransitionMatrix::write_csv(std::ostream& out) const {
    char buf[40];
    out << "from";
    for (std::int64_t s = lo; s <= hi; ++s) out << ',' << s;
    out << ",overflow\n";
    for (Eigen::Index r = 0; r < P.rows(); ++r) {
        if (static_cast<std::size_t>(r) == overflow_index()) {
            out << "overflow";
        } else {
            out << lo + r;
        }
        for (Eigen::Index c = 0; c < P.cols(); ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", P(r, c));
            out << buf;
        }
        out << '\n';
    }
}

TransitionMatrix build_transition_matrix(const Pmf& step, std::int64_t lo, std::int64_t hi) {
    step.validate();
    require_range(lo, hi, "build_transition_matrix");
    TransitionMatrix t;
    t.lo = lo;
    t.hi = hi;
    const auto n = static_cast<Eigen::Index>(t.transient_states());
    t.P = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::int64_t s = lo + r;
        double escape = 0.0;
        for (std::size_t i = 0; i < step.probs.size(); ++i) {
            const std::int64_t next = s + step.lo + static_cast<std::int64_t>(i);
            if (next < lo || next > hi) {
                escape += step.probs[i];
            } else {
                t.P(r, next - lo) += step.probs[i];
            }
        }
        t.P(r, n) = escape;
    }
    t.P(n, n) = 1.0;
    return t;
}

AbsorptionStats absorption_stats(const TransitionMatrix& t) {
    const auto n = static_cast<Eigen::Index>(t.transient_states());
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - t.P.topLeftCorner(n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() >= kSingularTolerance)) {
        throw UnreachableOverflowError();
    }
    const Eigen::VectorXd steps = lu.solve(Eigen::VectorXd::Ones(n));
    AbsorptionStats stats;
    stats.expected_steps.assign(steps.data(), steps.data() + n);
    stats.expected_steps.push_back(0.0);
    stats.fundamental_row_sums = stats.expected_steps;
    return stats;
}

double expected_steps_to_overflow(const TransitionMatrix& t, std::int64_t start_state) {
    const std::size_t idx = t.index_of(start_state);
    if (idx == t.overflow_index()) return 0.0;
    return absorption_stats(t).expected_steps[idx];
}

double monte_carlo_absorption(const Pmf& step, std::int64_t lo, std::int64_t hi, std::int64_t trials,
                              std::uint64_t seed, std::int64_t start, int threads, std::int64_t max_steps) {
    step.validate();
    require_range(lo, hi, "monte_carlo_absorption");
    if (trials < 1) {
        throw std::invalid_argument("monte_carlo_absorption: trials must be >= 1");
    }
    if (start < lo || start > hi) return 0.0;
    std::vector<std::int64_t> totals(kChunks, 0);
    rng::parallel_chunks(
        kChunks,
        [&](std::size_t c) {
            auto eng = rng::make_stream(seed, c);
            std::discrete_distribution<std::size_t> dist(step.probs.begin(), step.probs.end());
            std::int64_t total = 0;
            for (std::int64_t trial = chunk_trials(trials, c); trial > 0; --trial) {
                std::int64_t s = start;
                std::int64_t n = 0;
                do {
                    if (++n > max_steps) {
                        throw UnreachableOverflowError();
                    }
                    s += step.lo + static_cast<std::int64_t>(dist(eng));
                } while (s >= lo && s <= hi);
                total += n;
            }
            totals[c] = total;
        },
        threads);
    const std::int64_t sum = std::accumulate(totals.begin(), totals.end(), std::int64_t{0});
    return static_cast<double>(sum) / static_cast<double>(trials);
}

// ---------------------------------------------------------------------------

void IntDistribution::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("IntDistribution: sigma must be positive");
    }
    if (lo > hi) {
        throw std::invalid_argument("IntDistribution: empty range");
    }
    if (kind == Kind::half_normal && hi < 0) {
        throw std::invalid_argument("IntDistribution: half-normal range must include nonnegative values");
    }
}

std::int64_t IntDistribution::sample(rng::Engine& eng) const {
    std::normal_distribution<double> normal(0.0, sigma);
    // Accept on the rounded value so every integer in [lo, hi] keeps its full bin.
    const double lo_edge = static_cast<double>(lo) - 0.5;
    const double hi_edge = static_cast<double>(hi) + 0.5;
    for (;;) {
        double v = normal(eng);
        if (kind == Kind::half_normal) v = std::fabs(v);
        if (v >= lo_edge && v < hi_edge) {
            return std::clamp(static_cast<std::int64_t>(std::nearbyint(v)), lo, hi);
        }
    }
}

IntDistribution IntDistribution::signed_normal(int bits, double sigma) {
    const std::int64_t m = (std::int64_t{1} << (bits - 1)) - 1;
    return {Kind::normal, sigma, -m, m};
}

IntDistribution IntDistribution::unsigned_half_normal(int bits, double sigma) {
    return {Kind::half_normal, sigma, 0, (std::int64_t{1} << bits) - 1};
}

std::vector<std::int64_t> draw(const IntDistribution& d, std::size_t n, rng::Engine& eng) {
    d.validate();
    std::vector<std::int64_t> out(n);
    for (auto& v : out) v = d.sample(eng);
    return out;
}

double simulate_overflow_free_length(const IntDistribution& w, const IntDistribution& x, std::int64_t lo,
                                     std::int64_t hi, std::int64_t trials, std::uint64_t seed, int threads) {
    w.validate();
    x.validate();
    require_range(lo, hi, "simulate_overflow_free_length");
    if (trials < 1) {
        throw std::invalid_argument("simulate_overflow_free_length: trials must be >= 1");
    }
    if (lo > 0 || hi < 0) return 0.0;
    std::vector<std::int64_t> totals(kChunks, 0);
    rng::parallel_chunks(
        kChunks,
        [&](std::size_t c) {
            auto eng = rng::make_stream(seed, c);
            std::int64_t total = 0;
            for (std::int64_t trial = chunk_trials(trials, c); trial > 0; --trial) {
                std::int64_t s = 0;
                std::int64_t n = 0;
                do {
                    if (++n > 100'000'000) {
                        throw UnreachableOverflowError();
                    }
                    s += w.sample(eng) * x.sample(eng);
                } while (s >= lo && s <= hi);
                total += n;
            }
            totals[c] = total;
        },
        threads);
    const std::int64_t sum = std::accumulate(totals.begin(), totals.end(), std::int64_t{0});
    return static_cast<double>(sum) / static_cast<double>(trials);
}

double simulate_overflow_prob(const IntDistribution& w, const IntDistribution& x, std::int64_t k, int acc_bits,
                              std::int64_t trials, std::uint64_t seed, int threads) {
    w.validate();
    x.validate();
    if (k < 1 || trials < 1 || acc_bits < 2 || acc_bits > 62) {
        throw std::invalid_argument("simulate_overflow_prob: k, trials >= 1 and acc_bits in [2, 62]");
    }
    const std::int64_t threshold = std::int64_t{1} << (acc_bits - 1);
    std::vector<std::int64_t> hits(kChunks, 0);
    rng::parallel_chunks(
        kChunks,
        [&](std::size_t c) {
            auto eng = rng::make_stream(seed, c);
            std::int64_t count = 0;
            for (std::int64_t trial = chunk_trials(trials, c); trial > 0; --trial) {
                std::int64_t s = 0;
                for (std::int64_t i = 0; i < k; ++i) s += w.sample(eng) * x.sample(eng);
                if (s > threshold || s < -threshold) ++count;
            }
            hits[c] = count;
        },
        threads);
    const std::int64_t sum = std::accumulate(hits.begin(), hits.end(), std::int64_t{0});
    return static_cast<double>(sum) / static_cast<double>(trials);
}

}  // namespace mgs::overflow_model
