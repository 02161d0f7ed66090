#include "mgs/quant.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mgs::quant {

void QuantParams::validate() const {
    if (bits < kMinBits || bits > kMaxBits) {
        throw std::invalid_argument("QuantParams: bits must be in [2, 16], got " + std::to_string(bits));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("QuantParams: scale must be positive and finite");
    }
    if (symmetric && offset != 0) {
        throw std::invalid_argument("QuantParams: symmetric params require offset 0");
    }
    if (offset < qmin() || offset > qmax()) {
        throw std::invalid_argument("QuantParams: offset outside the integer range");
    }
}

QuantParams derive_params(std::span<const double> values, int bits, bool symmetric) {
    if (values.empty()) {
        throw std::invalid_argument("derive_params: empty input");
    }
    if (bits < kMinBits || bits > kMaxBits) {
        throw std::invalid_argument("derive_params: bits must be in [2, 16], got " + std::to_string(bits));
    }
    double lo = 0.0;
    double hi = 0.0;
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("derive_params: non-finite value");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    QuantParams p;
    p.bits = bits;
    p.symmetric = symmetric;
    const double levels = std::ldexp(1.0, bits) - 1.0;
    const double range = symmetric ? 2.0 * std::max(-lo, hi) : hi - lo;
    if (range == 0.0) {
        p.scale = 1.0;
        p.offset = 0;
        p.degenerate = true;
        return p;
    }
    p.scale = range / levels;
    if (!symmetric) {
        p.offset = p.qmin() - static_cast<std::int64_t>(std::nearbyint(lo / p.scale));
        p.offset = std::clamp(p.offset, p.qmin(), p.qmax());
    }
    return p;
}

std::int64_t quantize(double x, const QuantParams& params) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("quantize: non-finite input");
    }
    const double steps = std::nearbyint(x / params.scale);
    const double lo = static_cast<double>(params.qmin() - params.offset);
    const double hi = static_cast<double>(params.qmax() - params.offset);
    return static_cast<std::int64_t>(std::clamp(steps, lo, hi)) + params.offset;
}

double dequantize(std::int64_t q, const QuantParams& params) {
    if (q < params.qmin() || q > params.qmax()) {
        throw std::invalid_argument("dequantize: " + std::to_string(q) + " outside the " +
                                    std::to_string(params.bits) + "-bit range");
    }
    return params.scale * static_cast<double>(q - params.offset);
}

QuantTensor::QuantTensor(std::vector<std::int32_t> data, QuantParams params, std::vector<std::size_t> shape)
    : data_(std::move(data)), params_(params), shape_(std::move(shape)) {
    params_.validate();
    if (shape_.empty()) {
        throw std::invalid_argument("QuantTensor: empty shape");
    }
    if (std::find(shape_.begin(), shape_.end(), std::size_t{0}) != shape_.end()) {
        throw std::invalid_argument("QuantTensor: dimensions must be positive");
    }
    const std::size_t count = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (count != data_.size()) {
        throw std::invalid_argument("QuantTensor: shape does not match data length");
    }
    for (const auto q : data_) {
        if (q < params_.qmin() || q > params_.qmax()) {
            throw std::invalid_argument("QuantTensor: element outside the bitwidth range");
        }
    }
}

QuantTensor QuantTensor::quantize_values(std::span<const double> values, const QuantParams& params,
                                         std::vector<std::size_t> shape) {
    params.validate();
    std::vector<std::int32_t> data;
    data.reserve(values.size());
    for (const double v : values) data.push_back(static_cast<std::int32_t>(quantize(v, params)));
    return QuantTensor(std::move(data), params, std::move(shape));
}

std::size_t QuantTensor::rows() const { return shape_.size() == 1 ? 1 : shape_[0]; }

std::size_t QuantTensor::cols() const { return shape_.size() == 1 ? shape_[0] : data_.size() / shape_[0]; }

std::span<const std::int32_t> QuantTensor::row(std::size_t i) const {
    if (shape_.size() > 2) {
        throw std::invalid_argument("QuantTensor::row: rank must be 1 or 2");
    }
    if (i >= rows()) {
        throw std::out_of_range("QuantTensor::row: index out of range");
    }
    return std::span<const std::int32_t>(data_).subspan(i * cols(), cols());
}

accum::SumResult quantized_dot(std::span<const std::int32_t> w, std::span<const std::int32_t> x,
                               const accum::IntStrategy& strategy, accum::TraceOptions trace) {
    if (w.size() != x.size()) {
        throw std::invalid_argument("quantized_dot: length mismatch (" + std::to_string(w.size()) + " vs " +
                                    std::to_string(x.size()) + ")");
    }
    std::vector<std::int64_t> products(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        products[i] = static_cast<std::int64_t>(w[i]) * x[i];
    }
    return accum::sum_int(products, strategy, trace);
}

}  // namespace mgs::quant
