#pragma once

// Per-tensor uniform integer quantization.
//
//   scale  = R / (2^b - 1)
//   offset = -2^(b-1) - round(min / scale)          (0 when symmetric)
//   q      = clamp(round(x / scale) + offset)        round = half-to-even
//   x*     = scale * (q - offset)
//
// R = max - min of the value range extended to include zero, or 2*max|v|
// for symmetric tensors.

#include <cstdint>
#include <span>
#include <vector>

#include "mgs/accum.hpp"

namespace mgs::quant {

inline constexpr int kMinBits = 2;
inline constexpr int kMaxBits = 16;

struct QuantParams {
    double scale = 1.0;
    std::int64_t offset = 0;
    int bits = 8;
    bool symmetric = true;
    // Set when the input had zero range; scale is then 1.
    bool degenerate = false;

    std::int64_t qmin() const { return -(std::int64_t{1} << (bits - 1)); }
    std::int64_t qmax() const { return (std::int64_t{1} << (bits - 1)) - 1; }

    /// Throws std::invalid_argument unless scale > 0, bits in [2,16] and
    /// offset == 0 for symmetric params.
    void validate() const;
};

QuantParams derive_params(std::span<const double> values, int bits, bool symmetric);

std::int64_t quantize(double x, const QuantParams& params);
double dequantize(std::int64_t q, const QuantParams& params);

class QuantTensor {
public:
    QuantTensor(std::vector<std::int32_t> data, QuantParams params, std::vector<std::size_t> shape);

    static QuantTensor quantize_values(std::span<const double> values, const QuantParams& params,
                                       std::vector<std::size_t> shape);

    const std::vector<std::int32_t>& data() const { return data_; }
    const QuantParams& params() const { return params_; }
    const std::vector<std::size_t>& shape() const { return shape_; }

    /// Row `i` of a rank-2 tensor (or the whole tensor for rank 1).
    std::span<const std::int32_t> row(std::size_t i) const;
    std::size_t rows() const;
    std::size_t cols() const;

private:
    std::vector<std::int32_t> data_;
    QuantParams params_;
    std::vector<std::size_t> shape_;
};

/// sum_i w_i * x_i through the given accumulation strategy.
accum::SumResult quantized_dot(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                               const accum::IntStrategy& strategy, accum::TraceOptions trace = {});

}  // namespace mgs::quant
