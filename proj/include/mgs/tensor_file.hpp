#pragma once

// TensorFile ("MGT1") binary format, all integers little-endian:
//
//   offset  size       field
//   0       4          magic "MGT1"
//   4       1          version (1)
//   5       1          dtype: 0 = f32, 1 = i8, 2 = i16, 3 = fp8 (E4M3 bit patterns)
//   6       1          rank (1..8)
//   7       4 * rank   dims, uint32, each > 0
//   ...     n * size   payload, n = product(dims)
//   end-4   4          CRC-32 (zlib polynomial) of every preceding byte

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgs::tensor_file {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DType : std::uint8_t { f32 = 0, i8 = 1, i16 = 2, fp8 = 3 };

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kMaxRank = 8;

std::size_t dtype_size(DType d);

struct Tensor {
    DType dtype = DType::f32;
    std::vector<std::uint32_t> dims;
    // Raw little-endian payload.
    std::vector<std::uint8_t> payload;

    std::size_t count() const;

    static Tensor from_f32(const std::vector<float>& values, std::vector<std::uint32_t> dims);
    static Tensor from_int(const std::vector<std::int32_t>& values, DType dtype, std::vector<std::uint32_t> dims);
    static Tensor from_fp8(const std::vector<std::uint8_t>& bits, std::vector<std::uint32_t> dims);

    std::vector<float> to_f32() const;
    std::vector<std::int32_t> to_int() const;
};

std::vector<std::uint8_t> serialize(const Tensor& t);
/// Throws FormatError on bad magic, version, dtype, rank, dims, length or CRC.
Tensor deserialize(const std::vector<std::uint8_t>& bytes);

void write_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_file(const std::filesystem::path& path);

}  // namespace mgs::tensor_file
