#include "mgs/accum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

namespace mgs::accum {

namespace {

using Wide = __int128;

void check_bits(int bits, int max_bits, const char* what) {
    if (bits < 2 || bits > max_bits) {
        throw std::invalid_argument(std::string(what) + ": bitwidth out of range");
    }
}

void require_in_range(std::span<const std::int64_t> terms, AccRange range, const char* op) {
    for (const auto t : terms) {
        if (!range.contains(t)) {
            throw std::invalid_argument(std::string(op) + ": term " + std::to_string(t) +
                                        " outside accumulator range");
        }
    }
}

bool fits(Wide v, AccRange r) { return v >= r.lo && v <= r.hi; }

std::int64_t saturate_to_int64(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
    if (v < std::numeric_limits<std::int64_t>::min()) return std::numeric_limits<std::int64_t>::min();
    return static_cast<std::int64_t>(v);
}

Wide exact_total(std::span<const std::int64_t> terms) {
    Wide s = 0;
    for (const auto t : terms) s += t;
    return s;
}

// One adder operation on a single accumulator register.
struct PolicyAdder {
    AccRange range;
    OverflowPolicy policy;
    TraceOptions trace;
    SumResult& out;

    std::int64_t operator()(std::int64_t a, std::int64_t b) {
        const Wide s = static_cast<Wide>(a) + b;
        ++out.events.narrow_adds;
        if (trace.record_partials) out.partials.push_back(saturate_to_int64(s));
        if (fits(s, range)) return static_cast<std::int64_t>(s);
        ++out.clipped_count;
        ++out.events.clip_events;
        if (policy == OverflowPolicy::clip) {
            return s < range.lo ? range.lo : range.hi;
        }
        const Wide width = static_cast<Wide>(range.hi) - range.lo + 1;
        Wide m = (s - range.lo) % width;
        if (m < 0) m += width;
        return static_cast<std::int64_t>(range.lo + m);
    }
};

std::int64_t pairwise_rec(std::span<const std::int64_t> terms, PolicyAdder& add) {
    if (terms.empty()) return 0;
    if (terms.size() == 1) return terms.front();
    const std::size_t half = terms.size() / 2;
    const std::int64_t left = pairwise_rec(terms.first(half), add);
    const std::int64_t right = pairwise_rec(terms.subspan(half), add);
    return add(left, right);
}

void finalize_int(SumResult& r, std::int64_t acc, std::span<const std::int64_t> terms, AccRange range) {
    r.exact_fixed_point = acc;
    r.value = static_cast<double>(acc);
    r.events.terms = static_cast<std::int64_t>(terms.size());
    r.persistent_overflow = !fits(exact_total(terms), range);
}

}  // namespace

AccRange AccRange::twos_complement(int bits) {
    check_bits(bits, 64, "AccRange::twos_complement");
    if (bits == 64) {
        return {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max()};
    }
    const std::int64_t half = std::int64_t{1} << (bits - 1);
    return {-half, half - 1};
}

AccRange AccRange::symmetric(int bits) {
    check_bits(bits, 63, "AccRange::symmetric");
    const std::int64_t half = std::int64_t{1} << (bits - 1);
    return {-(half - 1), half - 1};
}

std::int64_t AccRange::wrap(std::int64_t v) const {
    const Wide width = static_cast<Wide>(hi) - lo + 1;
    Wide m = (static_cast<Wide>(v) - lo) % width;
    if (m < 0) m += width;
    return static_cast<std::int64_t>(lo + m);
}

// ---------------------------------------------------------------------------

SumResult sum_sequential(std::span<const std::int64_t> terms, AccRange range, OverflowPolicy policy,
                         TraceOptions trace) {
    require_in_range(terms, range, "sum_sequential");
    SumResult r;
    PolicyAdder add{range, policy, trace, r};
    if (trace.record_bit_trace) r.events.partial_sum_bit_trace.emplace();
    std::int64_t acc = 0;
    for (const auto t : terms) {
        acc = add(acc, t);
        if (trace.record_bit_trace) r.events.partial_sum_bit_trace->push_back(dmac::signed_bitwidth(acc));
    }
    finalize_int(r, acc, terms, range);
    return r;
}

SumResult sum_sequential(std::span<const std::int64_t> terms, int acc_bits, OverflowPolicy policy,
                         TraceOptions trace) {
    return sum_sequential(terms, AccRange::twos_complement(acc_bits), policy, trace);
}

SumResult sum_pairwise(std::span<const std::int64_t> terms, AccRange range, OverflowPolicy policy,
                       TraceOptions trace) {
    require_in_range(terms, range, "sum_pairwise");
    SumResult r;
    PolicyAdder add{range, policy, trace, r};
    const std::int64_t acc = pairwise_rec(terms, add);
    finalize_int(r, acc, terms, range);
    return r;
}

SumResult sum_pairwise(std::span<const std::int64_t> terms, int acc_bits, OverflowPolicy policy,
                       TraceOptions trace) {
    return sum_pairwise(terms, AccRange::twos_complement(acc_bits), policy, trace);
}

SumResult sum_sorted_pairing(std::span<const std::int64_t> terms, AccRange range, TraceOptions trace) {
    require_in_range(terms, range, "sum_sorted_pairing");
    SumResult r;
    PolicyAdder add{range, OverflowPolicy::clip, trace, r};

    std::vector<std::int64_t> values;
    values.reserve(terms.size());
    for (const auto t : terms) {
        if (t != 0) values.push_back(t);
    }

    std::int64_t acc = 0;
    std::vector<std::int64_t> pos;
    std::vector<std::int64_t> neg;
    while (!values.empty()) {
        pos.clear();
        neg.clear();
        for (const auto v : values) (v > 0 ? pos : neg).push_back(v);
        if (pos.empty() || neg.empty()) {
            // One sign left: the running sum grows monotonically toward the total.
            auto& rest = pos.empty() ? neg : pos;
            std::sort(rest.begin(), rest.end(),
                      [](std::int64_t a, std::int64_t b) { return std::abs(a) < std::abs(b); });
            acc = rest.front();
            for (std::size_t i = 1; i < rest.size(); ++i) acc = add(acc, rest[i]);
            break;
        }
        std::sort(pos.begin(), pos.end(), std::greater<>());
        std::sort(neg.begin(), neg.end());
        const std::size_t pairs = std::min(pos.size(), neg.size());
        values.clear();
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::int64_t s = add(pos[i], neg[i]);
            if (s != 0) values.push_back(s);
        }
        values.insert(values.end(), pos.begin() + static_cast<std::ptrdiff_t>(pairs), pos.end());
        values.insert(values.end(), neg.begin() + static_cast<std::ptrdiff_t>(pairs), neg.end());
    }
    finalize_int(r, acc, terms, range);
    return r;
}

SumResult sum_sorted_pairing(std::span<const std::int64_t> terms, int acc_bits, TraceOptions trace) {
    return sum_sorted_pairing(terms, AccRange::twos_complement(acc_bits), trace);
}

// ---------------------------------------------------------------------------

AgsAccumulator::AgsAccumulator(AccRange range, TraceOptions trace) : range_(range), trace_(trace) {
    if (range_.lo > 0 || range_.hi < 0) {
        throw std::invalid_argument("AgsAccumulator: range must contain 0");
    }
}

void AgsAccumulator::add(std::int64_t term, bool allow_clip) {
    const Wide s = static_cast<Wide>(acc_) + term;
    ++result_.events.narrow_adds;
    if (trace_.record_partials) result_.partials.push_back(saturate_to_int64(s));
    if (fits(s, range_)) {
        acc_ = static_cast<std::int64_t>(s);
        return;
    }
    if (!allow_clip) {
        throw std::logic_error("AgsAccumulator: unexpected transient overflow");
    }
    ++result_.clipped_count;
    ++result_.events.clip_events;
    acc_ = s < range_.lo ? range_.lo : range_.hi;
}

void AgsAccumulator::drain_positive() {
    while (pos_head_ < pos_.size() && fits(static_cast<Wide>(acc_) + pos_[pos_head_], range_)) {
        add(pos_[pos_head_++], false);
    }
    compact();
}

void AgsAccumulator::drain_negative() {
    while (neg_head_ < neg_.size() && fits(static_cast<Wide>(acc_) + neg_[neg_head_], range_)) {
        add(neg_[neg_head_++], false);
    }
    compact();
}

void AgsAccumulator::compact() {
    if (pos_head_ == pos_.size()) {
        pos_.clear();
        pos_head_ = 0;
    }
    if (neg_head_ == neg_.size()) {
        neg_.clear();
        neg_head_ = 0;
    }
}

void AgsAccumulator::push(std::int64_t term) {
    if (!range_.contains(term)) {
        throw std::invalid_argument("sum_ags: term outside accumulator range");
    }
    ++result_.events.terms;
    result_.exact_fixed_point += term;  // running exact total, replaced in finish()
    if (fits(static_cast<Wide>(acc_) + term, range_)) {
        add(term, false);
        if (term < 0) drain_positive();
        if (term > 0) drain_negative();
    } else {
        (term > 0 ? pos_ : neg_).push_back(term);
        result_.events.buffer_watermark =
            std::max<std::int64_t>(result_.events.buffer_watermark, static_cast<std::int64_t>(buffered()));
    }
    if (trace_.record_bit_trace) {
        if (!result_.events.partial_sum_bit_trace) result_.events.partial_sum_bit_trace.emplace();
        result_.events.partial_sum_bit_trace->push_back(dmac::signed_bitwidth(acc_));
    }
}

SumResult AgsAccumulator::finish() && {
    const std::int64_t total = result_.exact_fixed_point;
    // Alternating by running-sum sign cannot overflow while both lists have terms.
    while (pos_head_ < pos_.size() && neg_head_ < neg_.size()) {
        if (acc_ >= 0) {
            add(neg_[neg_head_++], false);
        } else {
            add(pos_[pos_head_++], false);
        }
    }
    while (pos_head_ < pos_.size()) add(pos_[pos_head_++], true);
    while (neg_head_ < neg_.size()) add(neg_[neg_head_++], true);
    pos_.clear();
    neg_.clear();
    pos_head_ = neg_head_ = 0;

    SumResult r = std::move(result_);
    r.persistent_overflow = !range_.contains(total);
    r.exact_fixed_point = acc_;
    r.value = static_cast<double>(acc_);
    return r;
}

bool AgsAccumulator::same_state(const AgsAccumulator& other) const {
    return acc_ == other.acc_ && range_.lo == other.range_.lo && range_.hi == other.range_.hi &&
           std::equal(pos_.begin() + static_cast<std::ptrdiff_t>(pos_head_), pos_.end(),
                      other.pos_.begin() + static_cast<std::ptrdiff_t>(other.pos_head_), other.pos_.end()) &&
           std::equal(neg_.begin() + static_cast<std::ptrdiff_t>(neg_head_), neg_.end(),
                      other.neg_.begin() + static_cast<std::ptrdiff_t>(other.neg_head_), other.neg_.end());
}

std::size_t AgsAccumulator::state_hash() const {
    std::size_t h = std::hash<std::int64_t>{}(acc_);
    const auto mix = [&h](std::int64_t v) { h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (std::size_t i = pos_head_; i < pos_.size(); ++i) mix(pos_[i]);
    mix(std::numeric_limits<std::int64_t>::min());
    for (std::size_t i = neg_head_; i < neg_.size(); ++i) mix(neg_[i]);
    return h;
}

SumResult sum_ags(std::span<const std::int64_t> terms, AccRange range, TraceOptions trace) {
    AgsAccumulator ags(range, trace);
    for (const auto t : terms) ags.push(t);
    return std::move(ags).finish();
}

SumResult sum_ags(std::span<const std::int64_t> terms, int acc_bits, TraceOptions trace) {
    return sum_ags(terms, AccRange::twos_complement(acc_bits), trace);
}

SumResult sum_wide(std::span<const std::int64_t> terms) {
    SumResult r;
    const Wide total = exact_total(terms);
    if (total > std::numeric_limits<std::int64_t>::max() || total < std::numeric_limits<std::int64_t>::min()) {
        throw WideOverflowError("sum_wide: sum exceeds 64 bits");
    }
    r.exact_fixed_point = static_cast<std::int64_t>(total);
    r.value = static_cast<double>(r.exact_fixed_point);
    r.events.terms = static_cast<std::int64_t>(terms.size());
    r.events.wide_adds = r.events.terms;
    return r;
}

// ---------------------------------------------------------------------------

DualAccumulator::DualAccumulator(int narrow_bits, int wide_bits, TraceOptions trace)
    : DualAccumulator(AccRange::twos_complement(narrow_bits), wide_bits, trace) {}

DualAccumulator::DualAccumulator(AccRange narrow_range, int wide_bits, TraceOptions trace)
    : narrow_range_(narrow_range), wide_range_(AccRange::twos_complement(wide_bits)), trace_(trace) {
    if (narrow_range_.lo > 0 || narrow_range_.hi < 0) {
        throw std::invalid_argument("DualAccumulator: narrow range must contain 0");
    }
    // The wide register must be at least 8 bits wider than the narrow one.
    const int narrow_bits = std::bit_width(static_cast<std::uint64_t>(narrow_range_.hi)) + 1;
    if (wide_bits < narrow_bits + 8) {
        throw std::invalid_argument("DualAccumulator: wide_bits must be >= narrow_bits + 8");
    }
    if (trace_.record_bit_trace) result_.events.partial_sum_bit_trace.emplace();
}

void DualAccumulator::add_wide(std::int64_t v) {
    const Wide s = static_cast<Wide>(wide_) + v;
    if (!fits(s, wide_range_)) {
        throw WideOverflowError("mgs: wide accumulator overflow");
    }
    wide_ = static_cast<std::int64_t>(s);
    ++result_.events.wide_adds;
}

void DualAccumulator::add(std::int64_t term) {
    if (!narrow_range_.contains(term)) {
        throw std::invalid_argument("mgs_int_sum: term " + std::to_string(term) + " outside narrow range");
    }
    ++result_.events.terms;
    ++result_.events.narrow_adds;
    const std::int64_t s = narrow_ + term;
    if (trace_.record_partials) result_.partials.push_back(s);
    if (narrow_range_.contains(s)) {
        narrow_ = s;
    } else {
        // Overflow: flush the narrow register, then restart it with the term.
        add_wide(narrow_);
        ++result_.events.flushes;
        narrow_ = term;
    }
    if (trace_.record_bit_trace) {
        result_.events.partial_sum_bit_trace->push_back(dmac::signed_bitwidth(narrow_ + wide_));
    }
}

SumResult DualAccumulator::finish() && {
    if (result_.events.terms > 0) {
        add_wide(narrow_);
        ++result_.events.final_merges;
        narrow_ = 0;
    }
    SumResult r = std::move(result_);
    r.exact_fixed_point = wide_;
    r.value = static_cast<double>(wide_);
    return r;
}

SumResult mgs_int_sum(std::span<const std::int64_t> terms, AccRange narrow_range, int wide_bits,
                      TraceOptions trace) {
    DualAccumulator acc(narrow_range, wide_bits, trace);
    for (const auto t : terms) acc.add(t);
    return std::move(acc).finish();
}

SumResult mgs_int_sum(std::span<const std::int64_t> terms, int narrow_bits, int wide_bits, TraceOptions trace) {
    return mgs_int_sum(terms, AccRange::twos_complement(narrow_bits), wide_bits, trace);
}

// ---------------------------------------------------------------------------

Fp8BucketAccumulator::Fp8BucketAccumulator(Fp8DotOptions opts)
    : opts_(opts), wide_range_(AccRange::twos_complement(opts.wide_bits)) {
    if (opts_.wide_bits < 13) {
        throw std::invalid_argument("Fp8BucketAccumulator: wide_bits must be >= 13");
    }
    if (opts_.trace.record_bit_trace) result_.events.partial_sum_bit_trace.emplace();
}

std::int64_t Fp8BucketAccumulator::exact_fixed_point() const {
    std::int64_t total = wide_;
    for (int e = 0; e < fp8::kBuckets; ++e) {
        total += static_cast<std::int64_t>(buckets_[static_cast<std::size_t>(e)]) << (std::max(e, 1) - 1);
    }
    return total;
}

void Fp8BucketAccumulator::add_wide(std::int64_t v) {
    const Wide s = static_cast<Wide>(wide_) + v;
    if (!fits(s, wide_range_)) {
        throw WideOverflowError("mgs_fp8_dot: wide accumulator overflow");
    }
    wide_ = static_cast<std::int64_t>(s);
    ++result_.events.wide_adds;
    ++result_.events.shifts;
}

void Fp8BucketAccumulator::flush(int exponent) {
    auto& b = buckets_[static_cast<std::size_t>(exponent)];
    add_wide(static_cast<std::int64_t>(b) << (std::max(exponent, 1) - 1));
    b = 0;
}

void Fp8BucketAccumulator::add(const fp8::ProductTerm& term) {
    ++result_.events.terms;
    ++result_.events.narrow_adds;
    const int e = term.biased_exp;
    auto& b = buckets_[static_cast<std::size_t>(e)];
    const int s = b + term.signed_significand();
    if (opts_.trace.record_partials) result_.partials.push_back(s);
    if (s >= kBucketMin && s <= kBucketMax) {
        b = s;
    } else if (opts_.narrow_only) {
        b = std::clamp(s, kBucketMin, kBucketMax);
        ++result_.clipped_count;
        ++result_.events.clip_events;
    } else {
        flush(e);
        ++result_.events.flushes;
        b = term.signed_significand();
    }
    if (opts_.trace.record_bit_trace) {
        result_.events.partial_sum_bit_trace->push_back(dmac::signed_bitwidth(exact_fixed_point()));
    }
}

void Fp8BucketAccumulator::skip() {
    ++result_.events.terms;
    ++result_.events.skips;
}

SumResult Fp8BucketAccumulator::finish() && {
    // One shift+add per bucket, once per dot product.
    for (int e = 0; e < fp8::kBuckets; ++e) {
        flush(e);
        ++result_.events.final_merges;
    }
    SumResult r = std::move(result_);
    r.exact_fixed_point = wide_;
    r.value = std::ldexp(static_cast<double>(wide_), -9);
    return r;
}

std::vector<fp8::ProductTerm> product_terms(std::span<const fp8::Fp8Value> w, std::span<const fp8::Fp8Value> x) {
    if (w.size() != x.size()) {
        throw std::invalid_argument("product_terms: length mismatch");
    }
    std::vector<fp8::ProductTerm> out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back(fp8::multiply_to_product_term(w[i], x[i]));
    return out;
}

SumResult mgs_fp8_dot(std::span<const fp8::Fp8Value> w, std::span<const fp8::Fp8Value> x, Fp8DotOptions opts) {
    if (w.size() != x.size()) {
        throw std::invalid_argument("mgs_fp8_dot: length mismatch");
    }
    Fp8BucketAccumulator acc(opts);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].is_nan() || x[i].is_nan()) {
            throw std::invalid_argument("mgs_fp8_dot: NaN input");
        }
        if (opts.skipping && fp8::is_skippable(w[i], x[i])) {
            acc.skip();
            continue;
        }
        acc.add(fp8::multiply_to_product_term(w[i], x[i]));
    }
    SumResult r = std::move(acc).finish();
    if (opts.skipping) r.events.skip_checks = r.events.terms;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kTermLimitFixed = 15 << 14;  // 480 in units of 2^-9

void finalize_fp8(SumResult& r, const fp8::ProductTerm& acc, std::span<const fp8::ProductTerm> terms) {
    r.value = acc.value();
    r.exact_fixed_point = acc.is_zero ? 0 : acc.fixed_point();
    r.events.terms = static_cast<std::int64_t>(terms.size());
    std::int64_t total = 0;
    for (const auto& t : terms) total += t.is_zero ? 0 : t.fixed_point();
    r.persistent_overflow = total > kTermLimitFixed || total < -kTermLimitFixed;
}

fp8::ProductTerm pairwise_fp8_rec(std::span<const fp8::ProductTerm> terms, SumResult& r) {
    if (terms.empty()) return {};
    if (terms.size() == 1) return terms.front();
    const std::size_t half = terms.size() / 2;
    const auto left = pairwise_fp8_rec(terms.first(half), r);
    const auto right = pairwise_fp8_rec(terms.subspan(half), r);
    bool clipped = false;
    const auto s = fp8::swamping_add(left, right, clipped);
    ++r.events.narrow_adds;
    if (clipped) {
        ++r.clipped_count;
        ++r.events.clip_events;
    }
    return s;
}

}  // namespace

SumResult sum_sequential_fp8(std::span<const fp8::ProductTerm> terms) {
    SumResult r;
    fp8::ProductTerm acc;
    for (const auto& t : terms) {
        bool clipped = false;
        acc = fp8::swamping_add(acc, t, clipped);
        ++r.events.narrow_adds;
        if (clipped) {
            ++r.clipped_count;
            ++r.events.clip_events;
        }
    }
    finalize_fp8(r, acc, terms);
    return r;
}

SumResult sum_pairwise_fp8(std::span<const fp8::ProductTerm> terms) {
    SumResult r;
    const auto acc = pairwise_fp8_rec(terms, r);
    finalize_fp8(r, acc, terms);
    return r;
}

SumResult sum_wide_fp8(std::span<const fp8::ProductTerm> terms) {
    SumResult r;
    std::int64_t total = 0;
    for (const auto& t : terms) total += t.is_zero ? 0 : t.fixed_point();
    r.exact_fixed_point = total;
    r.value = std::ldexp(static_cast<double>(total), -9);
    r.events.terms = static_cast<std::int64_t>(terms.size());
    r.events.wide_adds = r.events.terms;
    r.events.shifts = r.events.terms;
    return r;
}

double round_to_significand(double x, int significand_bits) {
    if (significand_bits < 1 || significand_bits > 53) {
        throw std::invalid_argument("round_to_significand: significand_bits out of range");
    }
    if (x == 0.0 || !std::isfinite(x)) return x;
    int e = 0;
    std::frexp(x, &e);
    const int quantum = e - significand_bits;
    return std::ldexp(std::nearbyint(std::ldexp(x, -quantum)), quantum);
}

double sum_kahan(std::span<const double> terms, int significand_bits) {
    const auto rnd = [significand_bits](double v) { return round_to_significand(v, significand_bits); };
    double sum = 0.0;
    double comp = 0.0;
    for (const double t : terms) {
        if (!std::isfinite(t)) {
            throw std::invalid_argument("sum_kahan: non-finite input");
        }
        const double next = rnd(sum + t);
        if (std::fabs(sum) >= std::fabs(t)) {
            comp = rnd(comp + rnd(rnd(sum - next) + t));
        } else {
            comp = rnd(comp + rnd(rnd(t - next) + sum));
        }
        sum = next;
    }
    return rnd(sum + comp);
}

double sum_rounded(std::span<const double> terms, int significand_bits) {
    double sum = 0.0;
    for (const double t : terms) sum = round_to_significand(sum + t, significand_bits);
    return sum;
}

RelativeError relative_error(double result, double reference) {
    if (reference == 0.0) {
        return {std::fabs(result), true};
    }
    return {100.0 * std::fabs(result - reference) / std::fabs(reference), false};
}

// ---------------------------------------------------------------------------

IntStrategy IntStrategy::parse(std::string_view name, int acc_bits, int wide_bits) {
    IntStrategy s;
    s.acc_bits = acc_bits;
    s.wide_bits = wide_bits;
    if (name == "wide") {
        s.kind = IntStrategyKind::wide;
    } else if (name == "clip") {
        s.kind = IntStrategyKind::sequential;
    } else if (name == "wrap") {
        s.kind = IntStrategyKind::sequential;
        s.policy = OverflowPolicy::wraparound;
    } else if (name == "pairwise") {
        s.kind = IntStrategyKind::pairwise;
    } else if (name == "sorted") {
        s.kind = IntStrategyKind::sorted_pairing;
    } else if (name == "ags") {
        s.kind = IntStrategyKind::ags;
    } else if (name == "mgs") {
        s.kind = IntStrategyKind::mgs;
    } else {
        throw std::invalid_argument("unknown integer strategy '" + std::string(name) + "'");
    }
    return s;
}

std::string IntStrategy::name() const {
    switch (kind) {
        case IntStrategyKind::wide: return "wide";
        case IntStrategyKind::sequential: return policy == OverflowPolicy::clip ? "clip" : "wrap";
        case IntStrategyKind::pairwise: return "pairwise";
        case IntStrategyKind::sorted_pairing: return "sorted";
        case IntStrategyKind::ags: return "ags";
        case IntStrategyKind::mgs: return "mgs";
    }
    return "?";
}

SumResult sum_int(std::span<const std::int64_t> terms, const IntStrategy& s, TraceOptions trace) {
    switch (s.kind) {
        case IntStrategyKind::wide: return sum_wide(terms);
        case IntStrategyKind::sequential: return sum_sequential(terms, s.acc_bits, s.policy, trace);
        case IntStrategyKind::pairwise: return sum_pairwise(terms, s.acc_bits, s.policy, trace);
        case IntStrategyKind::sorted_pairing: return sum_sorted_pairing(terms, s.acc_bits, trace);
        case IntStrategyKind::ags: return sum_ags(terms, s.acc_bits, trace);
        case IntStrategyKind::mgs: return mgs_int_sum(terms, s.acc_bits, s.wide_bits, trace);
    }
    throw std::invalid_argument("sum_int: unknown strategy");
}

}  // namespace mgs::accum
