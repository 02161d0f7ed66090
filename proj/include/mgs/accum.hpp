#pragma once

// Summation strategies over integer partial products and FP8 product terms.
//
// Every strategy returns a SumResult carrying its EventLog. The MGS
// strategies (mgs_int_sum, mgs_fp8_dot) are exact: a narrow register absorbs
// terms until an add would overflow, at which point the narrow value is
// flushed into a wide register and the incoming term restarts the narrow one.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgs/event_log.hpp"
#include "mgs/fp8.hpp"

namespace mgs::accum {

/// Raised when the wide register of a dual accumulator would overflow.
class WideOverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Closed integer interval an accumulator can hold.
struct AccRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    /// [-2^(bits-1), 2^(bits-1) - 1]
    static AccRange twos_complement(int bits);
    /// [-(2^(bits-1) - 1), 2^(bits-1) - 1], e.g. [-15, 15] for 5 bits.
    static AccRange symmetric(int bits);

    bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
    std::int64_t clamp(std::int64_t v) const { return v < lo ? lo : (v > hi ? hi : v); }
    std::int64_t wrap(std::int64_t v) const;
};

enum class OverflowPolicy { clip, wraparound };

struct TraceOptions {
    // Record the output of every adder operation (before clipping) so an
    // external auditor can check it against the accumulator range.
    bool record_partials = false;
    // Record the minimal signed width of the running sum after each term.
    bool record_bit_trace = false;
};

struct SumResult {
    double value = 0.0;
    // Exact integer sum, or the FP8 sum in units of 2^-9.
    std::int64_t exact_fixed_point = 0;
    dmac::EventLog events;
    std::int64_t clipped_count = 0;
    bool persistent_overflow = false;
    std::vector<std::int64_t> partials;
};

// ---------------------------------------------------------------------------
// Integer baselines

SumResult sum_sequential(std::span<const std::int64_t> terms, AccRange range, OverflowPolicy policy,
                         TraceOptions trace = {});
SumResult sum_sequential(std::span<const std::int64_t> terms, int acc_bits, OverflowPolicy policy,
                         TraceOptions trace = {});

/// Balanced binary-tree reduction; each internal add applies `policy`.
SumResult sum_pairwise(std::span<const std::int64_t> terms, AccRange range, OverflowPolicy policy,
                       TraceOptions trace = {});
SumResult sum_pairwise(std::span<const std::int64_t> terms, int acc_bits, OverflowPolicy policy,
                       TraceOptions trace = {});

/// Sort, pair the largest positive with the most negative value, and recurse
/// on the pair sums until one value remains. Once only one sign is left the
/// values are summed in ascending magnitude. If the final sum does not fit,
/// the result is clipped and persistent_overflow is set.
SumResult sum_sorted_pairing(std::span<const std::int64_t> terms, AccRange range, TraceOptions trace = {});
SumResult sum_sorted_pairing(std::span<const std::int64_t> terms, int acc_bits, TraceOptions trace = {});

/// Streaming AGS: a term whose add would overflow waits in a per-sign FIFO
/// until an opposite-sign add makes room. At end of stream the lists are
/// alternated by running-sum sign. Persistent overflow clips.
class AgsAccumulator {
public:
    explicit AgsAccumulator(AccRange range, TraceOptions trace = {});

    void push(std::int64_t term);
    SumResult finish() &&;

    std::int64_t acc() const { return acc_; }
    std::size_t buffered() const { return pos_.size() + neg_.size() - pos_head_ - neg_head_; }
    const std::vector<std::int64_t>& partials() const { return result_.partials; }
    void clear_partials() { result_.partials.clear(); }

    // Equality over algorithm state only (ignores recorded partials and counters).
    bool same_state(const AgsAccumulator& other) const;
    std::size_t state_hash() const;

private:
    void add(std::int64_t term, bool allow_clip);
    void drain_positive();
    void drain_negative();
    void compact();

    AccRange range_;
    TraceOptions trace_;
    std::int64_t acc_ = 0;
    std::vector<std::int64_t> pos_;
    std::vector<std::int64_t> neg_;
    std::size_t pos_head_ = 0;
    std::size_t neg_head_ = 0;
    SumResult result_;
};

SumResult sum_ags(std::span<const std::int64_t> terms, AccRange range, TraceOptions trace = {});
SumResult sum_ags(std::span<const std::int64_t> terms, int acc_bits, TraceOptions trace = {});

/// Exact int64 accumulation charged as one wide add per term.
SumResult sum_wide(std::span<const std::int64_t> terms);

// ---------------------------------------------------------------------------
// Integer MGS

/// Narrow/wide register pair of the integer dMAC.
///
/// Invariant: narrow() + wide() equals the exact sum of all consumed terms.
class DualAccumulator {
public:
    DualAccumulator(int narrow_bits, int wide_bits = 32, TraceOptions trace = {});
    DualAccumulator(AccRange narrow_range, int wide_bits = 32, TraceOptions trace = {});

    void add(std::int64_t term);
    SumResult finish() &&;

    std::int64_t narrow() const { return narrow_; }
    std::int64_t wide() const { return wide_; }
    std::int64_t running_sum() const { return narrow_ + wide_; }
    const dmac::EventLog& events() const { return result_.events; }
    AccRange narrow_range() const { return narrow_range_; }

private:
    void add_wide(std::int64_t v);

    AccRange narrow_range_;
    AccRange wide_range_;
    TraceOptions trace_;
    std::int64_t narrow_ = 0;
    std::int64_t wide_ = 0;
    SumResult result_;
};

/// Greedy dual-accumulator sum. Exact; throws WideOverflowError if the wide
/// register cannot hold the sum, std::invalid_argument if a term does not fit
/// the narrow register.
SumResult mgs_int_sum(std::span<const std::int64_t> terms, int narrow_bits, int wide_bits = 32,
                      TraceOptions trace = {});
SumResult mgs_int_sum(std::span<const std::int64_t> terms, AccRange narrow_range, int wide_bits = 32,
                      TraceOptions trace = {});

// ---------------------------------------------------------------------------
// FP8 MGS

struct Fp8DotOptions {
    bool skipping = false;
    // Buckets clip on overflow and no wide register is used.
    bool narrow_only = false;
    int wide_bits = 32;
    TraceOptions trace;
};

/// 16 five-bit bucket registers indexed by biased exponent plus a wide
/// register in units of 2^-9.
///
/// Invariant (full mode): wide * 2^-9 + sum_e bucket[e] * 2^(max(e,1) - 10)
/// equals the exact sum of the consumed terms.
class Fp8BucketAccumulator {
public:
    static constexpr int kBucketMin = -16;
    static constexpr int kBucketMax = 15;

    explicit Fp8BucketAccumulator(Fp8DotOptions opts = {});

    void add(const fp8::ProductTerm& term);
    void skip();
    SumResult finish() &&;

    int bucket(int exponent) const { return buckets_.at(static_cast<std::size_t>(exponent)); }
    std::int64_t wide() const { return wide_; }
    /// wide + all buckets, in units of 2^-9.
    std::int64_t exact_fixed_point() const;
    const dmac::EventLog& events() const { return result_.events; }

private:
    void flush(int exponent);
    void add_wide(std::int64_t v);

    Fp8DotOptions opts_;
    AccRange wide_range_;
    std::array<int, fp8::kBuckets> buckets_{};
    std::int64_t wide_ = 0;
    SumResult result_;
};

/// Dot product of E4M3 vectors through the bucketed dual accumulator.
/// value = wide * 2^-9 after the final 16-bucket merge.
SumResult mgs_fp8_dot(std::span<const fp8::Fp8Value> w, std::span<const fp8::Fp8Value> x,
                      Fp8DotOptions opts = {});

/// Products of w and x rounded to terms. Throws on length mismatch or NaN.
std::vector<fp8::ProductTerm> product_terms(std::span<const fp8::Fp8Value> w,
                                            std::span<const fp8::Fp8Value> x);

// ---------------------------------------------------------------------------
// Narrow floating-point baselines over product terms

/// Left-to-right accumulation in the 4-bit significand term format
/// (fp8::swamping_add). Clips at +-480.
SumResult sum_sequential_fp8(std::span<const fp8::ProductTerm> terms);

/// Balanced tree of fp8::swamping_add.
SumResult sum_pairwise_fp8(std::span<const fp8::ProductTerm> terms);

/// Conventional FP8 MAC: every term is aligned and added into an exact wide
/// register (one shift and one wide add per term).
SumResult sum_wide_fp8(std::span<const fp8::ProductTerm> terms);

/// Rounds x to `significand_bits` significant bits, nearest-even, with an
/// unbounded exponent.
double round_to_significand(double x, int significand_bits);

/// Compensated (Kahan-Babuska) summation where every floating operation is
/// rounded to `significand_bits`. Throws on non-finite input.
double sum_kahan(std::span<const double> terms, int significand_bits = 4);

/// Plain left-to-right summation rounded to `significand_bits` per add.
double sum_rounded(std::span<const double> terms, int significand_bits = 4);

// ---------------------------------------------------------------------------

struct RelativeError {
    double percent = 0.0;
    // Set when reference == 0; percent then holds the absolute error.
    bool absolute_fallback = false;
};

RelativeError relative_error(double result, double reference);

// ---------------------------------------------------------------------------
// Strategy handle for integer dot products

enum class IntStrategyKind { wide, sequential, pairwise, sorted_pairing, ags, mgs };

struct IntStrategy {
    IntStrategyKind kind = IntStrategyKind::wide;
    int acc_bits = 32;  // narrow width for every kind except wide
    int wide_bits = 32;
    OverflowPolicy policy = OverflowPolicy::clip;

    static IntStrategy wide_baseline() { return {}; }
    static IntStrategy mgs(int narrow_bits, int wide_bits = 32) {
        return {IntStrategyKind::mgs, narrow_bits, wide_bits, OverflowPolicy::clip};
    }
    static IntStrategy sequential(int acc_bits, OverflowPolicy p = OverflowPolicy::clip) {
        return {IntStrategyKind::sequential, acc_bits, 32, p};
    }

    /// Names: wide, clip, wrap, pairwise, sorted, ags, mgs.
    static IntStrategy parse(std::string_view name, int acc_bits, int wide_bits = 32);
    std::string name() const;
};

SumResult sum_int(std::span<const std::int64_t> terms, const IntStrategy& strategy, TraceOptions trace = {});

}  // namespace mgs::accum
