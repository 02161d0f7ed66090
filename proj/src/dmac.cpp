#include "mgs/dmac.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mgs::dmac {

int signed_bitwidth(std::int64_t v) {
    const std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
    return std::bit_width(mag) + 1;
}

EventLog& EventLog::operator+=(const EventLog& other) {
    terms += other.terms;
    narrow_adds += other.narrow_adds;
    wide_adds += other.wide_adds;
    flushes += other.flushes;
    skips += other.skips;
    skip_checks += other.skip_checks;
    final_merges += other.final_merges;
    shifts += other.shifts;
    clip_events += other.clip_events;
    buffer_watermark = std::max(buffer_watermark, other.buffer_watermark);
    return *this;
}

void CostModel::validate() const {
    for (const double v : {narrow_add, wide_add, flush_shift, multiply, skip_check}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("CostModel: weights must be finite and nonnegative");
        }
    }
}

accum::SumResult simulate_int_dmac(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                                   accum::AccRange narrow_range, int wide_bits) {
    if (w.size() != x.size()) {
        throw std::invalid_argument("simulate_int_dmac: length mismatch");
    }
    std::vector<std::int64_t> products(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) products[i] = static_cast<std::int64_t>(w[i]) * x[i];
    return accum::mgs_int_sum(products, narrow_range, wide_bits, {.record_bit_trace = true});
}

accum::SumResult simulate_int_dmac(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                                   int narrow_bits, int wide_bits) {
    return simulate_int_dmac(w, x, accum::AccRange::twos_complement(narrow_bits), wide_bits);
}

accum::SumResult simulate_fp8_dmac(std::span<const fp8::Fp8Value> w, std::span<const fp8::Fp8Value> x,
                                   bool skipping, int wide_bits) {
    accum::Fp8DotOptions opts;
    opts.skipping = skipping;
    opts.wide_bits = wide_bits;
    opts.trace.record_bit_trace = true;
    return accum::mgs_fp8_dot(w, x, opts);
}

double average_bitwidth(const EventLog& log) {
    if (!log.partial_sum_bit_trace) {
        throw std::invalid_argument("average_bitwidth: no partial-sum trace recorded");
    }
    const auto& trace = *log.partial_sum_bit_trace;
    if (trace.empty()) return 1.0;
    const double total = std::accumulate(trace.begin(), trace.end(), 0.0);
    return total / static_cast<double>(trace.size());
}

double energy_proxy(const EventLog& log, const CostModel& model) {
    model.validate();
    return model.narrow_add * static_cast<double>(log.narrow_adds) +
           model.wide_add * static_cast<double>(log.wide_adds) +
           model.flush_shift * static_cast<double>(log.shifts) +
           model.multiply * static_cast<double>(log.multiplies()) +
           model.skip_check * static_cast<double>(log.skip_checks);
}

std::string csv_row(const EventLog& log, const CostModel& model) {
    char avg[32] = "";
    if (log.partial_sum_bit_trace) std::snprintf(avg, sizeof avg, "%.17g", average_bitwidth(log));
    char buf[256];
    std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%lld,%lld,%lld,%lld,%s,%.17g",
                  static_cast<long long>(log.terms), static_cast<long long>(log.narrow_adds),
                  static_cast<long long>(log.wide_adds), static_cast<long long>(log.flushes),
                  static_cast<long long>(log.skips), static_cast<long long>(log.final_merges),
                  static_cast<long long>(log.clip_events), avg, energy_proxy(log, model));
    return buf;
}

}  // namespace mgs::dmac
