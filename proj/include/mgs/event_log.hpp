#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace mgs::dmac {

/// Hardware-relevant event counts for one dot product.
///
/// For the MGS strategies every consumed term is either a narrow add or a
/// skip, and every wide add is either a flush or a final merge. Always-wide
/// baselines charge one wide add per term and leave the narrow counters at 0.
struct EventLog {
    std::int64_t terms = 0;
    std::int64_t narrow_adds = 0;
    std::int64_t wide_adds = 0;
    std::int64_t flushes = 0;
    std::int64_t skips = 0;
    std::int64_t skip_checks = 0;
    std::int64_t final_merges = 0;
    // Alignment shifts ahead of a wide add (FP8 flush/merge, or every term in
    // a conventional FP8 MAC).
    std::int64_t shifts = 0;
    std::int64_t clip_events = 0;
    std::int64_t buffer_watermark = 0;
    // Minimal signed bitwidth of the running partial sum after each step.
    std::optional<std::vector<int>> partial_sum_bit_trace;

    std::int64_t multiplies() const { return terms - skips; }

    EventLog& operator+=(const EventLog& other);
};

/// Minimal signed width for v: ceil(log2(|v| + 1)) + 1.
int signed_bitwidth(std::int64_t v);

}  // namespace mgs::dmac
