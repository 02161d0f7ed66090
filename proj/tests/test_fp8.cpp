#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mgs/fp8.hpp"
#include "oracles.hpp"

using namespace mgs::fp8;

namespace {

Fp8Value enc(double x, OverflowMode m = OverflowMode::saturate) { return encode_e4m3(x, m); }
double dec(Fp8Value v) { return decode_e4m3(v); }

}  // namespace

TEST_CASE("encode: swamping example operands") {
    const auto a = enc(-0.25);
    CHECK(a.negative());
    CHECK(a.exponent_field() == 5);
    CHECK(a.mantissa_field() == 0);

    const auto b = enc(-0.029296875);
    CHECK(b.negative());
    CHECK(b.exponent_field() == 1);
    CHECK(b.mantissa_field() == 7);

    CHECK(enc(0.0).bits() == 0x00);
    CHECK(enc(-0.0).bits() == 0x80);
}

TEST_CASE("decode: fixed points of the format") {
    CHECK(dec(Fp8Value(0x00)) == 0.0);
    CHECK_FALSE(std::signbit(dec(Fp8Value(0x00))));
    CHECK(std::signbit(dec(Fp8Value(0x80))));
    CHECK(dec(Fp8Value(0x80)) == 0.0);
    CHECK(dec(Fp8Value::from_fields(false, 15, 6)) == 448.0);
    CHECK(dec(Fp8Value(0x01)) == kSubnormalStep);
    CHECK(std::isnan(dec(Fp8Value(0x7F))));
    CHECK(std::isnan(dec(Fp8Value(0xFF))));
}

TEST_CASE("decode matches the bit-field oracle and round-trips for all 256 patterns") {
    for (int b = 0; b < 256; ++b) {
        const Fp8Value v(static_cast<std::uint8_t>(b));
        const double ref = oracle::e4m3_value(static_cast<std::uint8_t>(b));
        if (std::isnan(ref)) {
            CHECK(v.is_nan());
            continue;
        }
        CHECK(dec(v) == ref);
        CHECK(enc(dec(v)).bits() == b);
        CHECK(dec(enc(dec(v))) == dec(v));
    }
}

TEST_CASE("decoded values strictly increase with magnitude bits, per sign") {
    for (int b = 1; b < 127; ++b) {
        CHECK(dec(Fp8Value(static_cast<std::uint8_t>(b))) > dec(Fp8Value(static_cast<std::uint8_t>(b - 1))));
        CHECK(dec(Fp8Value(static_cast<std::uint8_t>(0x80 | b))) <
              dec(Fp8Value(static_cast<std::uint8_t>(0x80 | (b - 1)))));
    }
}

TEST_CASE("encode: nearest-even against an enumeration oracle") {
    std::mt19937_64 eng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> expo(-12.0, 10.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = normal(eng) * std::exp2(expo(eng));
        CHECK(enc(x).bits() == oracle::e4m3_encode(x));
    }
    // Exact midpoints between neighbours tie to the even mantissa.
    for (int b = 0; b < 125; ++b) {
        const double lo = oracle::e4m3_value(static_cast<std::uint8_t>(b));
        const double hi = oracle::e4m3_value(static_cast<std::uint8_t>(b + 1));
        const double mid = 0.5 * (lo + hi);
        CHECK(enc(mid).bits() == ((b & 1) == 0 ? b : b + 1));
    }
}

TEST_CASE("encode: overflow, underflow and NaN") {
    CHECK(dec(enc(1e9)) == 448.0);
    CHECK(dec(enc(-1e9)) == -448.0);
    CHECK(dec(enc(464.0)) == 448.0);
    CHECK(enc(1e9, OverflowMode::nan).is_nan());
    CHECK(enc(480.0, OverflowMode::nan).is_nan());
    CHECK(dec(enc(460.0, OverflowMode::nan)) == 448.0);
    CHECK(enc(std::nan("")).is_nan());
    CHECK(enc(std::ldexp(1.0, -11)).bits() == 0x00);
    CHECK(enc(-std::ldexp(1.0, -11)).bits() == 0x80);
    CHECK(enc(std::ldexp(1.0, -10)).bits() == 0x00);                 // half step ties to even (zero)
    CHECK(enc(std::ldexp(1.5, -10)).bits() == 0x01);
    CHECK(dec(enc(std::ldexp(7.5, -9))) == std::ldexp(1.0, -6));      // subnormal rounds up into normal
}

TEST_CASE("classify") {
    CHECK(classify(Fp8Value(0x00)) == ValueClass::zero);
    CHECK(classify(Fp8Value(0x80)) == ValueClass::zero);
    CHECK(classify(Fp8Value(0x03)) == ValueClass::subnormal);
    CHECK(classify(Fp8Value(0x38)) == ValueClass::normal);
    CHECK(classify(Fp8Value(0xFF)) == ValueClass::nan);
    CHECK(to_string(ValueClass::subnormal) == "subnormal");
}

TEST_CASE("multiply_to_product_term: identities") {
    const auto one = multiply_to_product_term(enc(1.0), enc(1.0));
    CHECK_FALSE(one.is_zero);
    CHECK(one.value() == 1.0);
    CHECK(one.sign == 1);
    CHECK(multiply_to_product_term(enc(-0.25), enc(1.0)).value() == -0.25);
    CHECK(multiply_to_product_term(enc(0.0), enc(3.0)).is_zero);
    CHECK_THROWS_AS(multiply_to_product_term(Fp8Value::quiet_nan(), enc(1.0)), std::invalid_argument);
}

TEST_CASE("multiply_to_product_term matches the exact-product grid oracle on all non-NaN pairs") {
    long mismatches = 0;
    long checked = 0;
    for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 256; ++j) {
            const auto a = static_cast<std::uint8_t>(i);
            const auto b = static_cast<std::uint8_t>(j);
            const double va = oracle::e4m3_value(a);
            const double vb = oracle::e4m3_value(b);
            if (std::isnan(va) || std::isnan(vb)) continue;
            ++checked;
            const auto want = oracle::round_to_grid(va * vb);
            const auto got = multiply_to_product_term(Fp8Value(a), Fp8Value(b));
            const bool same = got.is_zero == want.zero && got.value() == want.value() &&
                              got.was_saturated == want.saturated &&
                              (want.zero || (got.biased_exp == want.exp && got.significand == want.sig &&
                                             got.sign == want.sign));
            if (!same) ++mismatches;
        }
    }
    CHECK(checked == 254 * 254);
    CHECK(mismatches == 0);
}

TEST_CASE("ProductTerm invariants hold on all products") {
    for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 256; ++j) {
            const Fp8Value a(static_cast<std::uint8_t>(i));
            const Fp8Value b(static_cast<std::uint8_t>(j));
            if (a.is_nan() || b.is_nan()) continue;
            const auto t = multiply_to_product_term(a, b);
            if (t.is_zero) continue;
            REQUIRE(t.biased_exp >= 0);
            REQUIRE(t.biased_exp <= 15);
            if (t.biased_exp >= 1) {
                REQUIRE(t.significand >= 8);
                REQUIRE(t.significand <= 15);
            } else {
                REQUIRE(t.significand >= 1);
                REQUIRE(t.significand <= 7);
            }
            REQUIRE(t.value() == static_cast<double>(t.fixed_point()) / 512.0);
        }
    }
}

TEST_CASE("is_skippable") {
    const Fp8Value tiny(0x01);
    CHECK(is_skippable(tiny, tiny));
    CHECK_FALSE(is_skippable(enc(1.0), enc(1.0)));
    CHECK(is_skippable(enc(0.0), enc(448.0)));
    CHECK_FALSE(is_skippable(tiny, enc(1.0)));                  // exactly 2^-9
    CHECK(is_skippable(tiny, enc(0.5)));
    CHECK_THROWS_AS(is_skippable(Fp8Value::quiet_nan(), tiny), std::invalid_argument);

    for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 256; ++j) {
            const Fp8Value a(static_cast<std::uint8_t>(i));
            const Fp8Value b(static_cast<std::uint8_t>(j));
            if (a.is_nan() || b.is_nan()) continue;
            const double p = std::fabs(oracle::e4m3_value(a.bits()) * oracle::e4m3_value(b.bits()));
            REQUIRE(is_skippable(a, b) == (p < std::ldexp(1.0, -9)));
            REQUIRE(is_skippable(a, b) == is_skippable(b, a));
            if (is_skippable(a, b)) REQUIRE(multiply_to_product_term(a, b).is_zero);
        }
    }
}

TEST_CASE("naive_add_narrow: swamping and exact cases") {
    CHECK(dec(naive_add_narrow(enc(-0.25), enc(-0.029296875))) == -0.25);
    CHECK(dec(naive_add_narrow(enc(0.5), enc(0.5))) == 1.0);
    CHECK(naive_add_narrow(enc(3.5), enc(0.0)) == enc(3.5));
    CHECK(naive_add_narrow(enc(0.0), enc(-3.5)) == enc(-3.5));
    CHECK_THROWS_AS(naive_add_narrow(Fp8Value::quiet_nan(), enc(1.0)), std::invalid_argument);

    // Shared exponent: result is the nearest-even rounding of the exact sum.
    for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 256; ++j) {
            const Fp8Value a(static_cast<std::uint8_t>(i));
            const Fp8Value b(static_cast<std::uint8_t>(j));
            if (a.is_nan() || b.is_nan() || a.exponent_field() != b.exponent_field()) continue;
            const double exact = oracle::e4m3_value(a.bits()) + oracle::e4m3_value(b.bits());
            REQUIRE(dec(naive_add_narrow(a, b)) == dec(enc(exact)));
        }
    }
}

TEST_CASE("swamping_add clips beyond 480") {
    bool clipped = false;
    const auto big = multiply_to_product_term(enc(16.0), enc(20.0));  // 320
    const auto s = swamping_add(big, big, clipped);
    CHECK(clipped);
    CHECK(s.value() == 480.0);
    const auto ok = swamping_add(big, multiply_to_product_term(enc(-16.0), enc(20.0)), clipped);
    CHECK_FALSE(clipped);
    CHECK(ok.is_zero);
}

TEST_CASE("skip census") {
    const auto c = skip_census();
    CHECK(c.unordered_pairs == 32640);
    CHECK(c.nan_patterns == 2);
    CHECK(c.patterns == 256);
    CHECK(c.exponent_sum_ordered == 2 * SkipCensus::kReferenceCount);

    // Brute-force recount under the documented convention.
    long count = 0;
    for (int i = 0; i < 256; ++i) {
        for (int j = i + 1; j < 256; ++j) {
            const double a = oracle::e4m3_value(static_cast<std::uint8_t>(i));
            const double b = oracle::e4m3_value(static_cast<std::uint8_t>(j));
            if (std::isnan(a) || std::isnan(b)) continue;
            if (std::fabs(a * b) < std::ldexp(1.0, -9)) ++count;
        }
    }
    CHECK(c.skippable == count);
    const auto again = skip_census();
    CHECK(again.skippable == c.skippable);
    CHECK(again.ordered_skippable == c.ordered_skippable);
}
