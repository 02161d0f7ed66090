#pragma once

// Event-level model of the dual-accumulator MAC (dMAC).
//
// The simulators wrap the accum strategies and always record the bit trace,
// so every returned log supports average_bitwidth().

#include <cstdint>
#include <span>
#include <string>

#include "mgs/accum.hpp"
#include "mgs/event_log.hpp"
#include "mgs/fp8.hpp"

namespace mgs::dmac {

/// Per-event energy weights in arbitrary units. Only relative comparisons
/// under a single model are meaningful.
struct CostModel {
    double narrow_add = 1.0;
    double wide_add = 4.0;
    double flush_shift = 1.0;
    double multiply = 2.0;
    double skip_check = 0.1;

    void validate() const;
};

/// Multiplies pairwise and feeds the products to mgs_int_sum.
accum::SumResult simulate_int_dmac(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                                   int narrow_bits, int wide_bits = 32);
accum::SumResult simulate_int_dmac(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                                   accum::AccRange narrow_range, int wide_bits = 32);

accum::SumResult simulate_fp8_dmac(std::span<const fp8::Fp8Value> w, std::span<const fp8::Fp8Value> x,
                                   bool skipping, int wide_bits = 32);

/// Mean of the recorded partial-sum bitwidths. Throws std::invalid_argument
/// if no trace was recorded; an empty trace averages to 1 (sign bit only).
double average_bitwidth(const EventLog& log);

double energy_proxy(const EventLog& log, const CostModel& model);

inline constexpr const char* kCsvHeader =
    "terms,narrow_adds,wide_adds,flushes,skips,final_merges,clip_events,avg_bitwidth,proxy";

/// One CSV row matching kCsvHeader. avg_bitwidth is empty when no trace exists.
std::string csv_row(const EventLog& log, const CostModel& model);

}  // namespace mgs::dmac
