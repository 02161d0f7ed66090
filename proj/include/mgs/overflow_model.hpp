#pragma once

// Overflow models for narrow integer accumulators.
//
// clt_overflow_prob treats a length-k dot product as Gaussian:
//   Pr(|Z| > 2^(a-1)) ~= 2 * Phi(-2^(a-1) / (sigma_w * sigma_x * sqrt(k)))
//
// The Markov model walks the running sum over the accumulator states
// [lo, hi] with i.i.d. integer steps; leaving the range is absorbing. With Q
// the transient block of P, the expected number of steps until overflow from
// each state is t = (I - Q)^-1 * 1, computed by a pivoted linear solve.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mgs/rng.hpp"

namespace mgs::overflow_model {

/// Raised when some transient state can never reach the overflow state.
class UnreachableOverflowError : public std::runtime_error {
public:
    UnreachableOverflowError() : std::runtime_error("overflow unreachable") {}
};

struct CltParams {
    double sigma_w = 1.0;
    double sigma_x = 1.0;
    std::int64_t k = 1;
    int acc_bits = 8;

    void validate() const;
};

double standard_normal_cdf(double z);
double clt_overflow_prob(const CltParams& p);

/// Probability mass function over the integers lo, lo+1, ..., lo+probs.size()-1.
struct Pmf {
    std::int64_t lo = 0;
    std::vector<double> probs;

    std::int64_t hi() const { return lo + static_cast<std::int64_t>(probs.size()) - 1; }
    double at(std::int64_t v) const;
    double mean() const;

    /// Throws unless probs is nonempty, nonnegative and sums to 1 within 1e-12.
    void validate() const;

    static Pmf uniform(std::int64_t lo, std::int64_t hi);
    static Pmf point_mass(std::int64_t v);
};

/// Normalized histogram of samples over [lo, hi].
Pmf empirical_pmf(std::span<const std::int64_t> samples, std::int64_t lo, std::int64_t hi);

/// Distribution of w * x for independent w ~ pw, x ~ px (enumerates all pairs).
Pmf product_pmf(const Pmf& pw, const Pmf& px);

struct TransitionMatrix {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    // States lo..hi in order, then the absorbing overflow state last.
    Eigen::MatrixXd P;

    std::size_t transient_states() const { return static_cast<std::size_t>(hi - lo + 1); }
    std::size_t overflow_index() const { return transient_states(); }
    std::size_t index_of(std::int64_t state) const;

    /// Row-major CSV with a header naming the states ("from", lo..hi, "overflow").
    void write_csv(std::ostream& out) const;
};

TransitionMatrix build_transition_matrix(const Pmf& step, std::int64_t lo, std::int64_t hi);

struct AbsorptionStats {
    // Indexed like TransitionMatrix::P rows; the overflow entry is 0.
    std::vector<double> expected_steps;
    // Row sums of N = (I - Q)^-1; equal to expected_steps on transient states.
    std::vector<double> fundamental_row_sums;
};

/// Throws UnreachableOverflowError when (I - Q) is singular (reciprocal
/// condition estimate below 1e-12).
AbsorptionStats absorption_stats(const TransitionMatrix& t);

/// Expected draws until the running sum leaves [lo, hi], counting the draw
/// that overflows. A start state outside [lo, hi] is already absorbed (0).
double expected_steps_to_overflow(const TransitionMatrix& t, std::int64_t start_state);

/// Seeded simulation of the same walk. Trials are split into fixed chunks so
/// the mean does not depend on `threads`. Walks longer than max_steps throw.
double monte_carlo_absorption(const Pmf& step, std::int64_t lo, std::int64_t hi, std::int64_t trials,
                              std::uint64_t seed, std::int64_t start = 0, int threads = 0,
                              std::int64_t max_steps = 100'000'000);

// ---------------------------------------------------------------------------
// Integer operand distributions

struct IntDistribution {
    enum class Kind { normal, half_normal };
    Kind kind = Kind::normal;
    double sigma = 1.0;
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    /// Rejection-samples the (half-)normal into [lo, hi] before rounding.
    std::int64_t sample(rng::Engine& eng) const;
    void validate() const;

    static IntDistribution signed_normal(int bits, double sigma);
    static IntDistribution unsigned_half_normal(int bits, double sigma);
};

std::vector<std::int64_t> draw(const IntDistribution& d, std::size_t n, rng::Engine& eng);

/// Mean number of products w_i * x_i, with fresh draws each step, until the
/// running sum leaves [lo, hi] (counting the overflowing product).
double simulate_overflow_free_length(const IntDistribution& w, const IntDistribution& x, std::int64_t lo,
                                     std::int64_t hi, std::int64_t trials, std::uint64_t seed, int threads = 0);

/// Fraction of length-k dot products of fresh draws with |sum| > 2^(acc_bits-1).
double simulate_overflow_prob(const IntDistribution& w, const IntDistribution& x, std::int64_t k, int acc_bits,
                              std::int64_t trials, std::uint64_t seed, int threads = 0);

}  // namespace mgs::overflow_model
