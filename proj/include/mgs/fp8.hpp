#pragma once

// E4M3 codec and the partial-product arithmetic used by the FP8 dMAC.
//
// Layout: 1 sign bit, 4 exponent bits (bias 7), 3 mantissa bits. There are
// no infinities; S.1111.111 is NaN, so the largest finite magnitude is
// 1.75 * 2^8 = 448. Subnormals have exponent field 0 and step 2^-9.

#include <array>
#include <cstdint>
#include <string_view>

namespace mgs::fp8 {

inline constexpr int kExponentBias = 7;
inline constexpr double kMaxFinite = 448.0;
// Smallest subnormal and the unit of the wide fixed-point accumulator.
inline constexpr double kSubnormalStep = 1.0 / 512.0;
inline constexpr int kBuckets = 16;
// Largest ProductTerm magnitude: 15 * 2^(15 - 10).
inline constexpr double kMaxTermMagnitude = 480.0;

enum class OverflowMode { saturate, nan };

enum class ValueClass { zero, subnormal, normal, nan };

class Fp8Value {
public:
    constexpr Fp8Value() = default;
    constexpr explicit Fp8Value(std::uint8_t bits) : bits_(bits) {}

    static constexpr Fp8Value from_fields(bool negative, int exponent, int mantissa) {
        return Fp8Value(static_cast<std::uint8_t>((negative ? 0x80 : 0) | ((exponent & 0xF) << 3) |
                                                  (mantissa & 0x7)));
    }
    static constexpr Fp8Value quiet_nan() { return Fp8Value(0x7F); }

    constexpr std::uint8_t bits() const { return bits_; }
    constexpr bool negative() const { return (bits_ & 0x80) != 0; }
    constexpr int exponent_field() const { return (bits_ >> 3) & 0xF; }
    constexpr int mantissa_field() const { return bits_ & 0x7; }
    constexpr bool is_nan() const { return (bits_ & 0x7F) == 0x7F; }
    constexpr bool is_zero() const { return (bits_ & 0x7F) == 0; }
    // Significand with the implicit bit, in units of 2^(effective_exponent - 10).
    constexpr int significand() const {
        return mantissa_field() + (exponent_field() != 0 ? 8 : 0);
    }
    // Subnormals share the scale of exponent field 1.
    constexpr int effective_exponent() const {
        return exponent_field() == 0 ? 1 : exponent_field();
    }

    friend constexpr bool operator==(Fp8Value a, Fp8Value b) { return a.bits_ == b.bits_; }

private:
    std::uint8_t bits_ = 0;
};

ValueClass classify(Fp8Value v);
std::string_view to_string(ValueClass c);

/// Round-to-nearest-even into E4M3. Magnitudes beyond 448 (after rounding)
/// saturate to +-448, or become NaN in OverflowMode::nan.
Fp8Value encode_e4m3(double x, OverflowMode mode = OverflowMode::saturate);

/// Exact value; NaN pattern decodes to quiet NaN.
double decode_e4m3(Fp8Value v);

/// A sign/exponent/4-bit-significand partial product.
///
/// value = sign * significand * 2^(max(biased_exp, 1) - 10). Normal terms
/// (biased_exp >= 1) carry the leading one, so significand is in [8, 15];
/// biased_exp == 0 holds the subnormal multiples of 2^-9.
struct ProductTerm {
    int sign = 1;
    int biased_exp = 0;
    int significand = 0;
    bool is_zero = true;
    bool was_saturated = false;

    int effective_exponent() const { return biased_exp == 0 ? 1 : biased_exp; }
    // 5-bit two's complement mantissa fed to the bucket adder.
    int signed_significand() const { return sign * significand; }
    // Value in units of 2^-9.
    std::int64_t fixed_point() const {
        return static_cast<std::int64_t>(signed_significand()) << (effective_exponent() - 1);
    }
    double value() const;

    friend bool operator==(const ProductTerm&, const ProductTerm&) = default;
};

/// Rounds sign * magnitude * 2^exp2 onto the ProductTerm grid (nearest-even
/// on the 4-bit significand). Magnitudes below 2^-9 become zero; results
/// above 480 saturate with was_saturated set.
ProductTerm round_to_term(bool negative, std::uint64_t magnitude, int exp2);

/// Lifts an E4M3 value into the term format without rounding.
ProductTerm term_from_value(Fp8Value v);

/// Exact product rounded to a ProductTerm. Throws on NaN operands.
ProductTerm multiply_to_product_term(Fp8Value a, Fp8Value b);

/// True iff |a * b| < 2^-9. Uses only the exponent fields and a
/// significand product. Throws on NaN operands.
bool is_skippable(Fp8Value a, Fp8Value b);

/// Narrow floating add on the term format: the operand with the smaller
/// exponent is right-shifted to align (shifted-out bits are lost), the
/// aligned significands are added, and the result is renormalized and
/// rounded. Sums beyond +-480 clip and set `clipped`.
ProductTerm swamping_add(const ProductTerm& a, const ProductTerm& b, bool& clipped);

/// Single E4M3 addition through a 4-bit significand adder. Exists to show
/// swamping; result is re-encoded to E4M3 (saturating).
Fp8Value naive_add_narrow(Fp8Value a, Fp8Value b);

struct SkipCensus {
    std::int64_t patterns = 256;
    std::int64_t nan_patterns = 0;
    std::int64_t unordered_pairs = 0;        // C(256, 2)
    std::int64_t skippable = 0;              // documented convention
    std::int64_t skippable_with_self_pairs = 0;
    std::int64_t skippable_nonzero_operands = 0;
    std::int64_t ordered_skippable = 0;
    std::int64_t exponent_sum_ordered = 0;   // ordered pairs with e_a + e_b <= 3
    static constexpr std::int64_t kReferenceCount = 1280;
};

/// Exhaustive enumeration of FP8 operand pairs. Convention: unordered pairs
/// of distinct bit patterns over all 256 patterns; NaN pairs are never
/// skippable; +0 and -0 are distinct patterns.
SkipCensus skip_census();

}  // namespace mgs::fp8
