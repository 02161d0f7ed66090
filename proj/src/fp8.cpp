#include "mgs/fp8.hpp"

#include <bit>
#include <string>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgs::fp8 {

namespace {

constexpr double kMinNormal = 1.0 / 64.0;  // 2^-6

void require_not_nan(Fp8Value a, Fp8Value b, const char* op) {
    if (a.is_nan() || b.is_nan()) {
        throw std::invalid_argument(std::string(op) + ": NaN operand");
    }
}

// Round-half-even right shift of a nonnegative integer. Negative shifts are exact.
std::uint64_t shift_round_even(std::uint64_t mag, int shift) {
    if (shift <= 0) {
        return mag << -shift;
    }
    if (shift >= 64) {
        return 0;
    }
    const std::uint64_t q = mag >> shift;
    const std::uint64_t rem = mag & ((std::uint64_t{1} << shift) - 1);
    const std::uint64_t half = std::uint64_t{1} << (shift - 1);
    if (rem > half || (rem == half && (q & 1U) != 0)) {
        return q + 1;
    }
    return q;
}

}  // namespace

ValueClass classify(Fp8Value v) {
    if (v.is_nan()) return ValueClass::nan;
    if (v.is_zero()) return ValueClass::zero;
    if (v.exponent_field() == 0) return ValueClass::subnormal;
    return ValueClass::normal;
}

std::string_view to_string(ValueClass c) {
    switch (c) {
        case ValueClass::zero: return "zero";
        case ValueClass::subnormal: return "subnormal";
        case ValueClass::normal: return "normal";
        case ValueClass::nan: return "nan";
    }
    return "?";
}

Fp8Value encode_e4m3(double x, OverflowMode mode) {
    const bool negative = std::signbit(x);
    if (std::isnan(x)) {
        return Fp8Value(static_cast<std::uint8_t>(negative ? 0xFF : 0x7F));
    }
    const double a = std::fabs(x);
    if (a == 0.0) {
        return Fp8Value::from_fields(negative, 0, 0);
    }
    const auto overflow = [&] {
        return mode == OverflowMode::saturate
                   ? Fp8Value::from_fields(negative, 15, 6)
                   : Fp8Value(static_cast<std::uint8_t>(negative ? 0xFF : 0x7F));
    };
    if (std::isinf(a)) {
        return overflow();
    }

    int e2 = 0;
    std::frexp(a, &e2);  // a in [2^(e2-1), 2^e2)
    const int unbiased = e2 - 1;
    const int quantum_exp = unbiased < -6 ? -9 : unbiased - 3;
    const double steps = std::nearbyint(std::ldexp(a, -quantum_exp));
    const double rounded = std::ldexp(steps, quantum_exp);
    if (rounded > kMaxFinite) {
        return overflow();
    }
    if (rounded == 0.0) {
        return Fp8Value::from_fields(negative, 0, 0);
    }
    if (rounded < kMinNormal) {
        return Fp8Value::from_fields(negative, 0, static_cast<int>(steps));
    }
    int r2 = 0;
    const double frac = std::frexp(rounded, &r2);  // rounded = frac * 2^r2, frac in [0.5, 1)
    const int exponent = r2 - 1 + kExponentBias;
    const int mantissa = static_cast<int>(frac * 16.0) - 8;
    return Fp8Value::from_fields(negative, exponent, mantissa);
}

double decode_e4m3(Fp8Value v) {
    if (v.is_nan()) {
        return v.negative() ? -std::numeric_limits<double>::quiet_NaN()
                            : std::numeric_limits<double>::quiet_NaN();
    }
    const double mag = std::ldexp(static_cast<double>(v.significand()), v.effective_exponent() - 10);
    return v.negative() ? -mag : mag;
}

double ProductTerm::value() const {
    if (is_zero) return 0.0;
    return std::ldexp(static_cast<double>(signed_significand()), effective_exponent() - 10);
}

ProductTerm round_to_term(bool negative, std::uint64_t magnitude, int exp2) {
    ProductTerm t;
    t.sign = negative ? -1 : 1;
    if (magnitude == 0) {
        return t;
    }
    const int msb = std::bit_width(magnitude) - 1;
    // Below 2^-9 the product cannot be represented and is dropped.
    if (msb + exp2 < -9) {
        return t;
    }
    const int unbiased = msb + exp2;
    if (unbiased >= -6) {
        int biased = unbiased + kExponentBias;
        std::uint64_t sig = shift_round_even(magnitude, msb - 3);
        if (sig == 16) {
            sig = 8;
            ++biased;
        }
        if (biased > 15) {
            t.biased_exp = 15;
            t.significand = 15;
            t.was_saturated = true;
        } else {
            t.biased_exp = biased;
            t.significand = static_cast<int>(sig);
        }
    } else {
        // Subnormal grid: units of 2^-9.
        const std::uint64_t sig = shift_round_even(magnitude, -9 - exp2);
        t.biased_exp = sig >= 8 ? 1 : 0;
        t.significand = static_cast<int>(sig);
    }
    t.is_zero = false;
    return t;
}

ProductTerm term_from_value(Fp8Value v) {
    if (v.is_nan()) {
        throw std::invalid_argument("term_from_value: NaN");
    }
    ProductTerm t;
    t.sign = v.negative() ? -1 : 1;
    if (v.is_zero()) {
        return t;
    }
    t.biased_exp = v.exponent_field();
    t.significand = v.significand();
    t.is_zero = false;
    return t;
}

ProductTerm multiply_to_product_term(Fp8Value a, Fp8Value b) {
    require_not_nan(a, b, "multiply_to_product_term");
    const bool negative = a.negative() != b.negative();
    const auto mag = static_cast<std::uint64_t>(a.significand()) * static_cast<std::uint64_t>(b.significand());
    if (mag == 0) {
        ProductTerm zero;
        zero.sign = negative ? -1 : 1;
        return zero;
    }
    return round_to_term(negative, mag, a.effective_exponent() + b.effective_exponent() - 20);
}

bool is_skippable(Fp8Value a, Fp8Value b) {
    require_not_nan(a, b, "is_skippable");
    const int sig_product = a.significand() * b.significand();
    if (sig_product == 0) {
        return true;
    }
    // |a*b| = sig_product * 2^(ea + eb - 20) < 2^-9  <=>  sig_product < 2^(11 - ea - eb)
    const int headroom = 11 - a.effective_exponent() - b.effective_exponent();
    if (headroom <= 0) {
        return false;
    }
    return sig_product < (1 << headroom);
}

ProductTerm swamping_add(const ProductTerm& a, const ProductTerm& b, bool& clipped) {
    clipped = false;
    if (b.is_zero) return a;
    if (a.is_zero) return b;
    const ProductTerm& big = a.effective_exponent() >= b.effective_exponent() ? a : b;
    const ProductTerm& small = &big == &a ? b : a;
    const int shift = big.effective_exponent() - small.effective_exponent();
    // Sign-magnitude alignment: the shifted-out low bits are gone.
    const int aligned = shift >= 8 ? 0 : (small.significand >> shift);
    const int sum = big.sign * big.significand + small.sign * aligned;
    if (sum == 0) {
        return ProductTerm{};
    }
    ProductTerm r = round_to_term(sum < 0, static_cast<std::uint64_t>(sum < 0 ? -sum : sum),
                                  big.effective_exponent() - 10);
    clipped = r.was_saturated;
    return r;
}

Fp8Value naive_add_narrow(Fp8Value a, Fp8Value b) {
    require_not_nan(a, b, "naive_add_narrow");
    if (b.is_zero()) return a;
    if (a.is_zero()) return b;
    bool clipped = false;
    const ProductTerm sum = swamping_add(term_from_value(a), term_from_value(b), clipped);
    return encode_e4m3(sum.value());
}

SkipCensus skip_census() {
    SkipCensus c;
    for (int i = 0; i < 256; ++i) {
        const Fp8Value a(static_cast<std::uint8_t>(i));
        if (a.is_nan()) {
            ++c.nan_patterns;
        }
        for (int j = 0; j < 256; ++j) {
            const Fp8Value b(static_cast<std::uint8_t>(j));
            if (a.exponent_field() + b.exponent_field() <= 3) {
                ++c.exponent_sum_ordered;
            }
            if (j >= i) {
                const bool skippable = !a.is_nan() && !b.is_nan() && is_skippable(a, b);
                if (j > i) {
                    ++c.unordered_pairs;
                    if (skippable) {
                        ++c.skippable;
                        if (!a.is_zero() && !b.is_zero()) {
                            ++c.skippable_nonzero_operands;
                        }
                    }
                }
                if (skippable) {
                    ++c.skippable_with_self_pairs;
                }
            }
            if (!a.is_nan() && !b.is_nan() && is_skippable(a, b)) {
                ++c.ordered_skippable;
            }
        }
    }
    return c;
}

}  // namespace mgs::fp8
