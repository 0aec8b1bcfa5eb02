#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace irmen {

/// Labeled image set with pixels normalized to [-1, 1] (byte 0 -> -1, 255 -> +1).
struct Dataset {
    int count = 0;
    int rows = 0;
    int cols = 0;
    std::vector<float> pixels;          // count * rows * cols, row-major per image
    std::vector<std::uint8_t> labels;   // count entries, each in 0..9

    const float* image(int i) const {
        return pixels.data() + static_cast<std::size_t>(i) * rows * cols;
    }
};

// IDX container IO. All header words are big-endian u32; images use magic
// 0x00000803 (u8 data, 3 dims), labels 0x00000801. Malformed input (wrong
// magic, truncated payload, image/label count mismatch, label out of range)
// raises std::runtime_error naming the file and the defect.
Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path);

void save_idx_pair(const std::string& images_path, const std::string& labels_path,
                   const std::vector<std::uint8_t>& pixels,
                   const std::vector<std::uint8_t>& labels, int rows, int cols);

/// Loads the standard file pair from a directory; `which` is "train" or "t10k".
/// A missing file raises an error that names the expected path and the
/// IRMEN_DATA_DIR override.
Dataset load_mnist(const std::string& dir, const std::string& which);

/// First n records (all of them when n <= 0 or n >= count).
Dataset subset(const Dataset& d, int n);

}  // namespace irmen
