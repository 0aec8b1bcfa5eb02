#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace irmen {

struct WeightTensor {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<double> data;  // row-major, size = product of shape

    std::size_t size() const {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }
};

/// Named-tensor bundle stored in the IRMW container.
struct WeightsBundle {
    std::uint32_t version = 1;
    std::vector<WeightTensor> tensors;

    const WeightTensor* find(const std::string& name) const;
    /// find() that throws naming the missing tensor and the file's contents.
    const WeightTensor& at(const std::string& name) const;
};

// IRMW container: magic "IRMW", u32 version, u32 tensor count, then per tensor
// {u32 name length, name bytes, u32 rank, u32 dims[rank], f64 data[prod]},
// closed by a u32 CRC-32 of every preceding byte. All scalars little-endian
// regardless of host, so files and goldens are byte-stable across platforms.
// Corruption anywhere surfaces as a checksum error; structural damage that
// also breaks framing surfaces as a truncation error.
void save_weights(const std::string& path, const WeightsBundle& w);
WeightsBundle load_weights(const std::string& path);

std::vector<std::uint8_t> encode_weights(const WeightsBundle& w);
WeightsBundle decode_weights(const std::vector<std::uint8_t>& bytes, const std::string& origin);

/// Uniform symmetric quantizer over the tensor's own range: step = max|w| /
/// 2^(bits-1), values snap to the nearest step. bits <= 0 means unlimited
/// precision (identity). Mirrors the synapse-array quantizer exactly.
void quantize_tensor(std::vector<double>& w, int bits);

}  // namespace irmen
