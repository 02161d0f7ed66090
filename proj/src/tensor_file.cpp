#include "mgs/tensor_file.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

namespace mgs::tensor_file {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc(const std::uint8_t* data, std::size_t n) {
    uLong c = crc32(0L, Z_NULL, 0);
    while (n > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
        c = crc32(c, data, chunk);
        data += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(c);
}

std::size_t checked_count(const std::vector<std::uint32_t>& dims) {
    if (dims.empty() || dims.size() > kMaxRank) {
        throw FormatError("tensor rank must be in [1, 8]");
    }
    std::size_t n = 1;
    for (const auto d : dims) {
        if (d == 0) throw FormatError("tensor dimensions must be positive");
        if (n > (std::size_t{1} << 40) / d) throw FormatError("tensor too large");
        n *= d;
    }
    return n;
}

}  // namespace

std::size_t dtype_size(DType d) {
    switch (d) {
        case DType::f32: return 4;
        case DType::i8: return 1;
        case DType::i16: return 2;
        case DType::fp8: return 1;
    }
    throw FormatError("unknown dtype");
}

std::size_t Tensor::count() const { return checked_count(dims); }

Tensor Tensor::from_f32(const std::vector<float>& values, std::vector<std::uint32_t> dims) {
    Tensor t{DType::f32, std::move(dims), {}};
    if (t.count() != values.size()) throw FormatError("tensor: dims do not match data length");
    t.payload.reserve(values.size() * 4);
    for (const float f : values) put_u32(t.payload, std::bit_cast<std::uint32_t>(f));
    return t;
}

Tensor Tensor::from_int(const std::vector<std::int32_t>& values, DType dtype, std::vector<std::uint32_t> dims) {
    if (dtype != DType::i8 && dtype != DType::i16) throw FormatError("tensor: from_int needs i8 or i16");
    Tensor t{dtype, std::move(dims), {}};
    if (t.count() != values.size()) throw FormatError("tensor: dims do not match data length");
    const std::int32_t lim = dtype == DType::i8 ? 127 : 32767;
    for (const auto v : values) {
        if (v < -lim - 1 || v > lim) throw FormatError("tensor: value does not fit dtype");
        const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
        t.payload.push_back(static_cast<std::uint8_t>(u & 0xFF));
        if (dtype == DType::i16) t.payload.push_back(static_cast<std::uint8_t>(u >> 8));
    }
    return t;
}

Tensor Tensor::from_fp8(const std::vector<std::uint8_t>& bits, std::vector<std::uint32_t> dims) {
    Tensor t{DType::fp8, std::move(dims), bits};
    if (t.count() != bits.size()) throw FormatError("tensor: dims do not match data length");
    return t;
}

std::vector<float> Tensor::to_f32() const {
    if (dtype != DType::f32) throw FormatError("tensor: dtype is not f32");
    std::vector<float> out(count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::bit_cast<float>(get_u32(&payload[4 * i]));
    return out;
}

std::vector<std::int32_t> Tensor::to_int() const {
    std::vector<std::int32_t> out(count());
    if (dtype == DType::i8) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int8_t>(payload[i]);
    } else if (dtype == DType::i16) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(payload[2 * i] | payload[2 * i + 1] << 8));
        }
    } else {
        throw FormatError("tensor: dtype is not an integer type");
    }
    return out;
}

std::vector<std::uint8_t> serialize(const Tensor& t) {
    const std::size_t n = t.count();
    if (t.payload.size() != n * dtype_size(t.dtype)) {
        throw FormatError("tensor: payload length does not match dims");
    }
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(t.dtype));
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (const auto d : t.dims) put_u32(out, d);
    out.insert(out.end(), t.payload.begin(), t.payload.end());
    put_u32(out, crc(out.data(), out.size()));
    return out;
}

Tensor deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 11 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic (expected MGT1)");
    }
    if (crc(bytes.data(), bytes.size() - 4) != get_u32(&bytes[bytes.size() - 4])) {
        throw FormatError("checksum mismatch");
    }
    if (bytes[4] != kVersion) {
        throw FormatError("unsupported version " + std::to_string(bytes[4]));
    }
    if (bytes[5] > 3) {
        throw FormatError("unknown dtype code " + std::to_string(bytes[5]));
    }
    Tensor t;
    t.dtype = static_cast<DType>(bytes[5]);
    const std::size_t rank = bytes[6];
    const std::size_t header = 7 + 4 * rank;
    if (rank == 0 || rank > kMaxRank || bytes.size() < header + 4) {
        throw FormatError("bad rank");
    }
    for (std::size_t i = 0; i < rank; ++i) t.dims.push_back(get_u32(&bytes[7 + 4 * i]));
    const std::size_t expected = checked_count(t.dims) * dtype_size(t.dtype);
    if (bytes.size() != header + expected + 4) {
        throw FormatError("payload length does not match dims");
    }
    t.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                     bytes.end() - 4);
    return t;
}

void write_file(const std::filesystem::path& path, const Tensor& t) {
    const auto bytes = serialize(t);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Tensor read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return deserialize(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace mgs::tensor_file
